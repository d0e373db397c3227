import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from povmlab import operators as op
from povmlab.errors import (
    DimensionMismatch,
    NonCommuting,
    NotPositive,
    Overcomplete,
    ValidationError,
    ZeroDenominator,
)
from povmlab.measurement import (
    NO_DETECTION,
    DensityOperator,
    OperatorValuedMeasure,
    Pmf,
    Povm,
    PureState,
    commute,
    conditional_formal_values,
    conjugate_observable,
    existence_observable,
    formal_product,
    outcome_pmf,
    product_observable,
    sample_outcomes,
    tensor_observable,
)

from conftest import (
    random_commuting_povm_pair,
    random_effect,
    random_povm,
    random_state,
    random_unitary,
)

TOL = 1e-12

f1 = op.basis_vector(2, 0)
f2 = op.basis_vector(2, 1)
g1 = (f1 + f2) / np.sqrt(2)
g2 = (f1 - f2) / np.sqrt(2)


def two_point_observable(v1, v2):
    return Povm.from_vectors((1, 2), [v1, v2])


# ---------------------------------------------------------------- states


def test_pure_state_requires_unit_norm():
    with pytest.raises(ValidationError):
        PureState(np.array([1.0, 1.0]))


def test_density_operator_checks():
    with pytest.raises(NotPositive):
        DensityOperator(np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError):
        DensityOperator(np.diag([0.5, 0.2]))
    rho = PureState(g1).density()
    assert np.max(np.abs(rho.matrix - op.projector(g1))) <= TOL


# ------------------------------------------------------------ validation


def test_povm_rejects_negative_effect():
    with pytest.raises(NotPositive):
        Povm((1, 2), [np.diag([1.0, -0.2]), np.diag([0.0, 1.0])])


def test_povm_rejects_overcomplete_family():
    with pytest.raises(Overcomplete):
        Povm((1,), [2.0 * np.eye(2)])


def test_povm_accepts_subnormalized_family():
    o = Povm((1,), [0.5 * np.eye(2)])
    assert not o.is_normalized()
    p = outcome_pmf(o, PureState(f1))
    assert p[1] == pytest.approx(0.5, abs=TOL)
    assert p.no_detection == pytest.approx(0.5, abs=TOL)


def test_effect_of_is_additive_and_empty_is_zero():
    o = two_point_observable(f1, f2)
    assert np.max(np.abs(o.effect_of([]))) == 0.0
    assert np.max(np.abs(o.effect_of([1, 2]) - np.eye(2))) <= TOL


def test_pmf_mass_must_close():
    with pytest.raises(ValidationError):
        Pmf({1: 0.5, 2: 0.4}, no_detection=0.0)
    p = Pmf({1: 0.5, 2: 0.25}, no_detection=0.25)
    assert p.total_mass() == pytest.approx(1.0, abs=TOL)


# -------------------------------------------------------- probability rule


def test_uniform_split_for_plus_state():
    p = outcome_pmf(two_point_observable(f1, f2), PureState(g1))
    assert p[1] == pytest.approx(0.5, abs=TOL)
    assert p[2] == pytest.approx(0.5, abs=TOL)
    assert p.no_detection == pytest.approx(0.0, abs=TOL)


def test_density_and_pure_agree():
    rng = np.random.default_rng(11)
    o = random_povm(rng, 3, 3)
    s = random_state(rng, 3)
    p1 = outcome_pmf(o, s)
    p2 = outcome_pmf(o, s.density())
    for x in o.outcomes:
        assert p1[x] == pytest.approx(p2[x], abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 5000), st.integers(2, 4), st.integers(2, 4))
def test_pmf_mass_closes_for_random_instances(seed, dim, n):
    rng = np.random.default_rng(seed)
    o = random_povm(rng, dim, n)
    u = random_state(rng, dim)
    p = outcome_pmf(o, u)
    assert p.no_detection <= 1e-10
    assert sum(p[x] for x in o.outcomes) + p.no_detection == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 5000), st.integers(2, 4))
def test_effect_expectations_stay_in_unit_interval(seed, dim):
    rng = np.random.default_rng(seed)
    e = random_effect(rng, dim)
    assert op.is_positive(e)
    assert op.is_positive(np.eye(dim) - e)
    u = random_state(rng, dim)
    p = np.vdot(u.vector, e @ u.vector).real
    assert -1e-10 <= p <= 1.0 + 1e-10


# --------------------------------------------------------------- sampling


def test_sampling_is_deterministic_and_ordered():
    o = two_point_observable(f1, f2)
    u = PureState(g1)
    a = sample_outcomes(o, u, 100, seed=5)
    b = sample_outcomes(o, u, 100, seed=5)
    assert a == b
    assert set(a) <= {1, 2}


def test_sampling_includes_no_detection_mass():
    o = Povm((1,), [0.25 * np.eye(2)])
    draws = sample_outcomes(o, PureState(f1), 4000, seed=3)
    frac = draws.count(NO_DETECTION) / 4000
    assert abs(frac - 0.75) <= 3 * np.sqrt(0.75 * 0.25 / 4000)


def test_sampling_matches_pmf_at_three_sigma():
    o = two_point_observable(g1, g2)
    u = PureState(f1)
    n = 100_000
    draws = sample_outcomes(o, u, n, seed=17)
    for x, p in ((1, 0.5), (2, 0.5)):
        freq = draws.count(x) / n
        assert abs(freq - p) <= 3 * np.sqrt(p * (1 - p) / n)


# ------------------------------------------------------ products, tensors


def test_commute_and_product_for_same_basis():
    o = two_point_observable(f1, f2)
    assert commute(o, o)
    prod = product_observable(o, o)
    p = outcome_pmf(prod, PureState(g1))
    assert p[(1, 1)] == pytest.approx(0.5, abs=TOL)
    assert p[(2, 2)] == pytest.approx(0.5, abs=TOL)
    assert p[(1, 2)] == pytest.approx(0.0, abs=TOL)


def test_non_commuting_pair_is_rejected_with_witness():
    of = two_point_observable(f1, f2)
    og = two_point_observable(g1, g2)
    assert not commute(of, og)
    with pytest.raises(NonCommuting) as err:
        product_observable(of, og)
    assert err.value.norm == pytest.approx(0.5, abs=TOL)


def test_tensor_observable_uniform_case():
    o = two_point_observable(f1, f2)
    joint = tensor_observable(o, o)
    u = PureState(op.tensor_vec(g1, g1))
    p = outcome_pmf(joint, u)
    for x in joint.outcomes:
        assert p[x] == pytest.approx(0.25, abs=TOL)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000), st.integers(2, 3), st.integers(2, 3))
def test_product_marginal_recovers_factor(seed, na, nb):
    rng = np.random.default_rng(seed)
    a, b = random_commuting_povm_pair(rng, 3, na, nb)
    prod = product_observable(a, b)
    u = random_state(rng, 3)
    joint = outcome_pmf(prod, u)
    single = outcome_pmf(a, u)
    for x in a.outcomes:
        marg = sum(joint[(x, y)] for y in b.outcomes)
        assert marg == pytest.approx(single[x], abs=1e-10)


# ------------------------------------------------------------ conjugation


def test_conjugation_by_unitary_matches_evolved_state():
    rng = np.random.default_rng(23)
    o = random_povm(rng, 3, 3)
    u = random_unitary(rng, 3)
    s = random_state(rng, 3)
    pulled = outcome_pmf(conjugate_observable(o, u), s)
    pushed = outcome_pmf(o, PureState(u @ s.vector))
    for x in o.outcomes:
        assert pulled[x] == pytest.approx(pushed[x], abs=TOL)


def test_conjugation_by_projection_subnormalizes():
    o = two_point_observable(g1, g2)
    p = op.projector(f1)
    squeezed = conjugate_observable(o, p)
    pmf = outcome_pmf(squeezed, PureState(f2))
    assert pmf.no_detection == pytest.approx(1.0, abs=TOL)


def test_conjugation_guard_rejects_expanding_map():
    o = two_point_observable(f1, f2)
    with pytest.raises(Overcomplete):
        conjugate_observable(o, 2.0 * np.eye(2))


# --------------------------------------------------- formal pair measures


def test_formal_product_coincides_with_product_iff_commuting():
    rng = np.random.default_rng(31)
    a, b = random_commuting_povm_pair(rng, 3, 2, 3)
    prod = product_observable(a, b)
    form = formal_product(a, b)
    assert form.is_observable()
    for o in prod.outcomes:
        assert np.max(np.abs(prod.effect(o) - form.value(o))) <= 1e-10

    of = two_point_observable(f1, f2)
    og = two_point_observable(g1, g2)
    form2 = formal_product(of, og)
    assert not form2.is_observable()
    assert form2.hermiticity_residual() > 0.1


def test_formal_product_values_multiply():
    of = two_point_observable(f1, f2)
    og = two_point_observable(g1, g2)
    form = formal_product(of, og)
    for x, y in form.outcomes:
        expected = of.effect(x) @ og.effect(y)
        assert np.max(np.abs(form.value((x, y)) - expected)) <= TOL


def test_conditional_values_reduce_to_bayes_for_commuting_pairs():
    rng = np.random.default_rng(41)
    a, b = random_commuting_povm_pair(rng, 4, 2, 3)
    u = random_state(rng, 4)
    form = formal_product(a, b)
    joint = outcome_pmf(product_observable(a, b), u)
    cond = conditional_formal_values(form, u, condition=[1])
    p1 = sum(joint[(1, y)] for y in b.outcomes)
    for y in b.outcomes:
        assert cond[y].real == pytest.approx(joint[(1, y)] / p1, abs=1e-10)
        assert abs(cond[y].imag) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000), st.integers(2, 4))
def test_conditional_values_sum_to_one(seed, dim):
    rng = np.random.default_rng(seed)
    a = random_povm(rng, dim, 2)
    b = random_povm(rng, dim, 3)
    u = random_state(rng, dim)
    form = formal_product(a, b)
    try:
        cond = conditional_formal_values(form, u, condition=[1])
    except ZeroDenominator:
        return
    assert sum(cond.values()) == pytest.approx(1.0, abs=1e-10)


def test_conditional_values_zero_denominator():
    a = two_point_observable(f1, f2)
    form = formal_product(a, a)
    with pytest.raises(ZeroDenominator):
        conditional_formal_values(form, PureState(f2), condition=[1])


# ---------------------------------------------------------------- plumbing


def test_dimension_mismatch_is_reported():
    o2 = two_point_observable(f1, f2)
    o3 = Povm.from_vectors((1, 2, 3), [op.basis_vector(3, i) for i in range(3)])
    with pytest.raises(DimensionMismatch):
        product_observable(o2, o3)
    with pytest.raises(DimensionMismatch):
        outcome_pmf(o2, PureState(op.basis_vector(3, 0) + 0.0))


def test_existence_observable_is_trivial():
    o = existence_observable(5)
    rng = np.random.default_rng(2)
    u = random_state(rng, 5)
    p = outcome_pmf(o, u)
    assert p[1] == pytest.approx(1.0, abs=TOL)
