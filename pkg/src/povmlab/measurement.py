"""States, discrete observables, and the probability rule.

An observable is a finite family of positive effects summing to at most the
identity.  Sub-normalized families are allowed on purpose: the missing mass
is reported as a ``no detection`` outcome rather than silently renormalized.
Products of observables exist only when every pair of effects commutes;
without that gate the operator products are still available, but only as a
formal operator-valued measure whose values need not be positive or even
Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    NotPositive,
    Overcomplete,
    NonCommuting,
    ZeroDenominator,
    ValidationError,
)
from . import operators as op

__all__ = [
    "NO_DETECTION",
    "PureState",
    "DensityOperator",
    "State",
    "Povm",
    "OperatorValuedMeasure",
    "Pmf",
    "existence_observable",
    "outcome_pmf",
    "sample_pmf",
    "sample_outcomes",
    "commute",
    "product_observable",
    "tensor_observable",
    "conjugate_observable",
    "formal_product",
    "conditional_formal_values",
]

Label = Hashable

UNIT_TOL = 1e-12
EFFECT_TOL = 1e-10
COMMUTE_TOL = 1e-10
PMF_TOL = 1e-10


class _NoDetection:
    """Sentinel outcome for the mass an observable does not account for."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_DETECTION"

    def __str__(self):
        return "none"


NO_DETECTION = _NoDetection()


def _readonly(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureState:
    """Unit vector, checked at construction."""

    vector: np.ndarray

    def __post_init__(self):
        v = op.as_vector(self.vector)
        if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
            raise ValidationError(
                f"state vector norm {np.linalg.norm(v):.12g} is not 1"
            )
        object.__setattr__(self, "vector", _readonly(v))

    @property
    def dim(self) -> int:
        return self.vector.size

    def density(self) -> "DensityOperator":
        return DensityOperator(op.projector(self.vector))


@dataclass(frozen=True)
class DensityOperator:
    """Positive unit-trace operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = op.as_operator(self.matrix)
        if not op.is_positive(m, EFFECT_TOL):
            raise NotPositive("density operator is not positive semidefinite")
        if abs(np.trace(m).real - 1.0) > EFFECT_TOL or abs(np.trace(m).imag) > EFFECT_TOL:
            raise ValidationError(f"density operator trace {np.trace(m):.12g} is not 1")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


State = Union[PureState, DensityOperator]


def _expectation(state: State, a: np.ndarray) -> complex:
    if isinstance(state, PureState):
        return complex(np.vdot(state.vector, a @ state.vector))
    return complex(np.trace(state.matrix @ a))


def _coerce_effects(outcomes, effects) -> tuple[tuple[Label, ...], dict]:
    outcomes = tuple(outcomes)
    if len(outcomes) == 0:
        raise ValidationError("an observable needs at least one outcome")
    if len(set(outcomes)) != len(outcomes):
        raise ValidationError("outcome labels must be unique")
    if isinstance(effects, Mapping):
        table = {x: op.as_operator(effects[x]) for x in outcomes}
    else:
        effects = list(effects)
        if len(effects) != len(outcomes):
            raise ValidationError("effect count does not match outcome count")
        table = {x: op.as_operator(e) for x, e in zip(outcomes, effects)}
    dims = {e.shape[0] for e in table.values()}
    if len(dims) != 1:
        raise DimensionMismatch(f"effects live on different dimensions: {sorted(dims)}")
    return outcomes, table


class Povm:
    """Positive operator-valued measure over a finite, ordered outcome set.

    Construction validates every effect (Hermitian and positive within
    ``tol``) and the total (at most the identity within ``tol``).  Totals
    strictly below the identity are legal; the deficit appears as the
    no-detection mass of every pmf computed from the observable.
    """

    def __init__(self, outcomes: Sequence[Label], effects, tol: float = EFFECT_TOL):
        outcomes, table = _coerce_effects(outcomes, effects)
        for x, e in table.items():
            if not op.is_positive(e, tol):
                raise NotPositive(f"effect for outcome {x!r} is not positive")
        total = sum(table.values())
        excess = np.linalg.eigvalsh(0.5 * (total + total.conj().T)).max() - 1.0
        if excess > tol:
            raise Overcomplete(f"effects exceed the identity by {excess:.3e}")
        self.outcomes = outcomes
        self._effects = {x: _readonly(e) for x, e in table.items()}
        self._total = _readonly(total)

    @property
    def dim(self) -> int:
        return self._total.shape[0]

    def effect(self, outcome: Label) -> np.ndarray:
        return self._effects[outcome]

    def effect_of(self, outcomes: Iterable[Label]) -> np.ndarray:
        """Additive extension to subsets; the empty subset gives zero."""
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for x in outcomes:
            acc = acc + self._effects[x]
        return acc

    def total(self) -> np.ndarray:
        return self._total

    def is_normalized(self, tol: float = EFFECT_TOL) -> bool:
        return op.operator_norm(self._total - op.identity(self.dim)) <= tol

    @classmethod
    def from_vectors(cls, outcomes: Sequence[Label], vectors, tol: float = EFFECT_TOL) -> "Povm":
        """Rank-one observable |v_x><v_x| from one vector per outcome."""
        return cls(outcomes, [op.projector(op.as_vector(v)) for v in vectors], tol)

    def __repr__(self):
        return f"Povm(dim={self.dim}, outcomes={list(self.outcomes)!r})"


def existence_observable(dim: int) -> Povm:
    """The trivial one-outcome observable whose single effect is the identity."""
    return Povm((1,), [op.identity(dim)])


class OperatorValuedMeasure:
    """Finite family of arbitrary operators indexed by outcomes.

    No positivity or normalization is imposed; this is the home of formal
    products of observables that fail the commutativity gate.
    """

    def __init__(self, outcomes: Sequence[Label], values):
        outcomes, table = _coerce_effects(outcomes, values)
        self.outcomes = outcomes
        self._values = {x: _readonly(v) for x, v in table.items()}

    @property
    def dim(self) -> int:
        return next(iter(self._values.values())).shape[0]

    def value(self, outcome: Label) -> np.ndarray:
        return self._values[outcome]

    def value_of(self, outcomes: Iterable[Label]) -> np.ndarray:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for x in outcomes:
            acc = acc + self._values[x]
        return acc

    def total(self) -> np.ndarray:
        return self.value_of(self.outcomes)

    def hermiticity_residual(self) -> float:
        return max(op.hermiticity_residual(v) for v in self._values.values())

    def is_observable(self, tol: float = EFFECT_TOL) -> bool:
        """Whether the family happens to be a valid sub-normalized Povm."""
        try:
            Povm(self.outcomes, dict(self._values), tol)
        except (NotPositive, Overcomplete):
            return False
        return True

    def __repr__(self):
        return f"OperatorValuedMeasure(dim={self.dim}, outcomes={list(self.outcomes)!r})"


@dataclass(frozen=True)
class Pmf:
    """Probabilities over declared outcomes plus an explicit no-detection mass."""

    probabilities: Mapping[Label, float]
    no_detection: float = 0.0

    def __post_init__(self):
        probs = {}
        for x, p in dict(self.probabilities).items():
            p = float(p)
            if p < -PMF_TOL or p > 1.0 + PMF_TOL:
                raise ValidationError(f"probability {p:.12g} for {x!r} outside [0, 1]")
            probs[x] = min(max(p, 0.0), 1.0)
        nd = float(self.no_detection)
        if nd < -PMF_TOL or nd > 1.0 + PMF_TOL:
            raise ValidationError(f"no-detection mass {nd:.12g} outside [0, 1]")
        # sub-tolerance no-detection mass is roundoff from a complete
        # observable, not a physical deficit; snap it away
        nd = 0.0 if nd <= PMF_TOL else min(nd, 1.0)
        total = sum(probs.values()) + nd
        if abs(total - 1.0) > PMF_TOL:
            raise ValidationError(f"pmf mass {total:.12g} is not 1")
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "no_detection", nd)

    @property
    def outcomes(self) -> tuple:
        return tuple(self.probabilities.keys())

    def __getitem__(self, outcome: Label) -> float:
        return self.probabilities[outcome]

    def total_mass(self) -> float:
        return sum(self.probabilities.values()) + self.no_detection


def outcome_pmf(observable: Povm, state: State) -> Pmf:
    """Probability of each outcome: the expectation of its effect.

    Whatever mass the total effect fails to account for becomes the
    no-detection probability.
    """
    if observable.dim != state.dim:
        raise DimensionMismatch(
            f"observable dim {observable.dim} does not match state dim {state.dim}"
        )
    probs = {}
    for x in observable.outcomes:
        p = _expectation(state, observable.effect(x)).real
        probs[x] = min(max(p, 0.0), 1.0)
    accounted = _expectation(state, observable.total()).real
    nd = min(max(1.0 - accounted, 0.0), 1.0)
    return Pmf(probs, nd)


def sample_pmf(pmf: Pmf, shots: int, seed: int) -> list:
    """Draw outcomes by inverse CDF over the declared order, no-detection last."""
    if shots < 0:
        raise ValidationError("shots must be nonnegative")
    labels = list(pmf.outcomes) + [NO_DETECTION]
    weights = np.array([pmf[x] for x in pmf.outcomes] + [pmf.no_detection])
    edges = np.cumsum(weights)
    edges[-1] = max(edges[-1], 1.0)  # guard the last edge against roundoff
    rng = np.random.default_rng(seed)
    draws = rng.random(shots)
    idx = np.searchsorted(edges, draws, side="right")
    return [labels[i] for i in idx]


def sample_outcomes(observable: Povm, state: State, shots: int, seed: int) -> list:
    """Measure repeatedly: sample the observable's pmf in the given state."""
    return sample_pmf(outcome_pmf(observable, state), shots, seed)


def commute(a: Povm, b: Povm, tol: float = COMMUTE_TOL) -> bool:
    """Whether every effect of ``a`` commutes with every effect of ``b``."""
    if a.dim != b.dim:
        raise DimensionMismatch(f"observable dims {a.dim} and {b.dim} differ")
    return _max_commutator(a, b)[0] <= tol


def _max_commutator(a: Povm, b: Povm):
    worst = (0.0, None, None)
    for x in a.outcomes:
        for y in b.outcomes:
            n = op.commutator_norm(a.effect(x), b.effect(y))
            if n > worst[0]:
                worst = (n, x, y)
    return worst


def product_observable(a: Povm, b: Povm, tol: float = COMMUTE_TOL) -> Povm:
    """Simultaneous observable with effects E_a(x) E_b(y) and paired outcomes.

    Exists only when the factors commute pairwise; otherwise NonCommuting is
    raised carrying the first offending outcome pair.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"observable dims {a.dim} and {b.dim} differ")
    worst, x, y = _max_commutator(a, b)
    if worst > tol:
        raise NonCommuting(x, y, worst)
    outcomes = [(x, y) for x in a.outcomes for y in b.outcomes]
    effects = {(x, y): a.effect(x) @ b.effect(y) for x, y in outcomes}
    return Povm(outcomes, effects)


def tensor_observable(a: Povm, b: Povm) -> Povm:
    """Joint observable on the tensor product space, outcomes paired."""
    outcomes = [(x, y) for x in a.outcomes for y in b.outcomes]
    effects = {(x, y): op.tensor_op(a.effect(x), b.effect(y)) for x, y in outcomes}
    return Povm(outcomes, effects)


def conjugate_observable(observable: Povm, by) -> Povm:
    """Transform every effect E to A* E A for a unitary or projection A.

    This is how dynamics act on observables (A unitary) and how an
    observable is squeezed onto a subspace (A a projection).  The result is
    revalidated; conjugation by a contraction always passes.
    """
    a = op.as_operator(by)
    if a.shape[0] != observable.dim:
        raise DimensionMismatch(
            f"conjugator dim {a.shape[0]} does not match observable dim {observable.dim}"
        )
    ad = a.conj().T
    effects = {x: ad @ observable.effect(x) @ a for x in observable.outcomes}
    return Povm(observable.outcomes, effects)


def formal_product(a: Povm, b: Povm) -> OperatorValuedMeasure:
    """Operator products E_a(x) E_b(y) with no commutativity gate.

    The result coincides with ``product_observable`` exactly when the
    factors commute; otherwise some values are non-Hermitian and the family
    is only formal.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"observable dims {a.dim} and {b.dim} differ")
    outcomes = [(x, y) for x in a.outcomes for y in b.outcomes]
    values = {(x, y): a.effect(x) @ b.effect(y) for x, y in outcomes}
    return OperatorValuedMeasure(outcomes, values)


def conditional_formal_values(
    measure: OperatorValuedMeasure,
    state: State,
    condition: Iterable[Label],
    normalizer=None,
    zero_tol: float = 1e-13,
) -> dict:
    """Conditional values of a formal pair measure given first-slot outcomes.

    For a measure over pairs (c, y), the value assigned to y is

        sum over c in condition of <u, M(c, y) u>   divided by the denominator,

    where the denominator defaults to the total of the numerators and can be
    overridden with an explicit ``normalizer`` operator.  Because the measure
    is only formal the results are complex and may lie outside [0, 1]; that
    is the point of computing them.
    """
    condition = list(condition)
    if not condition:
        raise ValidationError("condition must name at least one first-slot outcome")
    firsts = []
    seconds = []
    for o in measure.outcomes:
        if not (isinstance(o, tuple) and len(o) == 2):
            raise ValidationError("conditional values need a measure over outcome pairs")
        if o[0] not in firsts:
            firsts.append(o[0])
        if o[1] not in seconds:
            seconds.append(o[1])
    unknown = [c for c in condition if c not in firsts]
    if unknown:
        raise ValidationError(f"condition labels {unknown!r} are not first-slot outcomes")

    numerators = {}
    for y in seconds:
        acc = 0.0 + 0.0j
        for c in condition:
            acc += _expectation(state, measure.value((c, y)))
        numerators[y] = acc
    if normalizer is not None:
        denom = _expectation(state, op.as_operator(normalizer))
    else:
        denom = sum(numerators.values())
    if abs(denom) <= zero_tol:
        raise ZeroDenominator(f"conditioning mass {abs(denom):.3e} is numerically zero")
    return {y: numerators[y] / denom for y in seconds}
