import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from addinfo.exceptions import DivergentTerm, NegativeWeight, SumNotOne, ZeroAtom, ZeroConditioningEvent
from addinfo.functionals import (
    Distribution,
    GeneralInformation,
    LinearCombination,
    Renyi,
    Shannon,
    StepCDF,
    Zero,
    cdf_of_distribution,
    conditional_info,
    conditional_mu,
    convolve,
    log2,
    mix,
    point_mass,
    renyi,
    renyi_functional,
    shannon,
    sym_from_json,
)
from addinfo.linalg import Projection, SignedOperator, coordinate_partition, make_state, trivial_partition

weights = st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6).map(lambda w: [x / sum(w) for x in w])


def test_shannon_known_values():
    assert shannon([F(1, 2), F(1, 2)]) == 1.0
    assert shannon([F(1, 4)] * 4) == 2.0
    assert shannon([1]) == 0.0
    assert shannon([F(1, 2), F(1, 2), 0]) == 1.0
    assert abs(shannon([0.5, 0.25, 0.25]) - 1.5) < 1e-15


def test_renyi_known_values():
    p = [F(1, 2), F(1, 4), F(1, 4)]
    assert abs(renyi(p, 2) - math.log2(8 / 3)) < 1e-14
    assert abs(renyi(p, 0) - math.log2(3)) < 1e-14
    assert abs(renyi(p, math.inf) - 1.0) < 1e-14
    assert renyi(p, 1) == shannon(p)
    # orders within rounding of 1 must not collapse to 0
    assert abs(renyi(p, 1 - 1e-16) - shannon(p)) < 1e-12
    assert abs(renyi(p, 1 + 1e-12) - shannon(p)) < 1e-10
    # uniform distributions have the same value for every order
    for a in (0.5, 2, 3):
        assert abs(renyi([F(1, 4)] * 4, a) - 2) < 1e-14


def test_log2_exact_and_near_one():
    assert log2(F(1, 8)) == -3.0
    x = 1 - 2.0 ** -40
    assert log2(x) == math.log1p(-(2.0 ** -40)) / math.log(2)


def test_distribution_validation():
    with pytest.raises(SumNotOne):
        Distribution(["1/2", "1/3"])
    with pytest.raises(NegativeWeight):
        Distribution([1.5, -0.5])


@given(weights, weights)
def test_symmetric_information_additive_on_tensor(p, q):
    P, Q = Distribution(p), Distribution(q)
    for s in (Shannon(), Renyi(0.5), Renyi(2.0), LinearCombination([(0.3, Shannon()), (0.7, Renyi(3.0))])):
        assert abs(s(P.tensor(Q)) - s(P) - s(Q)) < 1e-9


@given(weights, st.randoms())
def test_symmetric_under_permutation(p, r):
    q = list(p)
    r.shuffle(q)
    assert abs(shannon(p) - shannon(q)) < 1e-12
    assert abs(renyi(p, 2) - renyi(q, 2)) < 1e-12


@given(weights, st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_renyi_nonincreasing_in_order(p, a, b):
    lo, hi = sorted((a, b))
    assert renyi(p, hi) <= renyi(p, lo) + 1e-9


def test_sym_json_round_trip():
    s = LinearCombination([(0.25, Shannon()), (0.75, Renyi(2.0))])
    back = sym_from_json(s.to_json())
    p = Distribution([0.2, 0.3, 0.5])
    assert back(p) == s(p)
    assert sym_from_json(Zero().to_json())(p) == 0.0


def test_general_information_formula():
    rho = make_state(["1/2", "1/4", "1/4"])
    mu = SignedOperator(np.diag([0.2, -0.1, -0.1]))
    G = GeneralInformation(rho, mu, Shannon())
    P = coordinate_partition(3)
    expected = 1.5 + 0.2 * -1 + (-0.1) * -2 + (-0.1) * -2
    assert abs(G(P) - expected) < 1e-15
    assert G(trivial_partition(3)) == 0.0


def test_divergent_term():
    rho = make_state(["1", "0"])
    G = GeneralInformation(rho, SignedOperator(np.diag([0.5, -0.5])), Shannon())
    with pytest.raises(DivergentTerm):
        G(coordinate_partition(2))


def test_conditional_info_is_shannon_plus_mu_term():
    rng = np.random.default_rng(4)
    rho = make_state(["1/2", "1/4", "1/8", "1/8"])
    v = np.linalg.qr(rng.standard_normal((4, 2)))[0]
    E = Projection.from_vectors(v)
    G = GeneralInformation(rho, conditional_mu(rho, E), Shannon())
    P = coordinate_partition(4)
    assert abs(G(P) - conditional_info(rho, E, P)) < 1e-12


def test_conditional_zero_event():
    rho = make_state(["1", "0"])
    with pytest.raises(ZeroConditioningEvent):
        conditional_info(rho, Projection.from_support(2, [1]), coordinate_partition(2))


def test_step_cdf():
    F1 = StepCDF([(0.0, F(1, 2)), (1.0, F(1, 2))])
    assert F1(0.0) == 0 and F1(0.5) == F(1, 2) and F1(2) == 1
    with pytest.raises(SumNotOne):
        StepCDF([(0.0, F(1, 2))])
    with pytest.raises(ZeroAtom):
        cdf_of_distribution([F(1, 2), F(1, 2), 0])


def test_j_functional_values():
    for a in (0.5, 1.0, 2.0, 3.0):
        assert renyi_functional(point_mass(1), a) == 1.0
        assert abs(renyi_functional(point_mass(-2.5), a) + 2.5) < 1e-15


def test_j_of_distribution_is_minus_renyi():
    p = [0.5, 0.3, 0.2]
    for a in (0.5, 2.0, 3.0):
        assert abs(renyi_functional(cdf_of_distribution(p), a) + renyi(p, a)) < 1e-12


@settings(max_examples=50)
@given(weights, weights, st.sampled_from([0.5, 2.0, 3.0]), st.floats(0, 1))
def test_j_additive_and_mixing_bounds(p, q, a, t):
    Fp, Fq = cdf_of_distribution(p), cdf_of_distribution(q)
    assert abs(renyi_functional(convolve(Fp, Fq), a)
               - renyi_functional(Fp, a) - renyi_functional(Fq, a)) < 1e-9
    m = renyi_functional(mix(Fp, Fq, t), a) if 0 < t < 1 else None
    if m is not None:
        lo, hi = sorted((renyi_functional(Fp, a), renyi_functional(Fq, a)))
        assert lo - 1e-9 <= m <= hi + 1e-9
