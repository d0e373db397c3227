"""Joint rates that exist and joint values that only exist on paper.

The two-particle interferometer loses a quarter of its mass to a
path-annihilating interaction, and the surviving statistics force the
conditional path bookkeeping 0, 1, 1, -1: each particle is certainly on
the indirect path, yet certainly not both.  The three-box setup does the
same with a single particle: conditioned on passing a filter, the box
values are 1, 1, -1.  In both cases the package refuses to build a joint
observable (the factors do not commute) and hands back formal values
instead, with the negative entry marking exactly where the classical
picture breaks.

Run with ``python3 demos/formal_values.py``.
"""

from povmlab.scenarios import run_hardy, run_three_boxes


def show(result):
    print(f"--- {result.scenario} ---")
    for label, pmf in result.pmfs:
        print(f"  {label}:")
        for x in pmf.outcomes:
            print(f"    {str(x):>8}  {pmf[x]:.6f}")
        if pmf.no_detection:
            print(f"    {'lost':>8}  {pmf.no_detection:.6f}")
    for label, values in result.weak_values:
        pretty = ", ".join(f"{v.real:+.3f}" for v in values)
        print(f"  {label}: {pretty}")
    for check in result.identities:
        verdict = "ok" if check.passed else "FAILED"
        print(f"  [{verdict}] {check.name}: residual {check.residual:.2e}")
    print()


def main():
    show(run_hardy())
    show(run_three_boxes())


if __name__ == "__main__":
    main()
