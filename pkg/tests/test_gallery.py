import math
from fractions import Fraction as F

import numpy as np
import pytest

from addinfo.exceptions import ChainNotMonotone, ResolutionTooCoarse
from addinfo.functionals import GeneralInformation, LinearCombination, Renyi, Shannon
from addinfo.gallery import (
    check_khinchin,
    check_renyi_suite,
    epsilon_spread,
    monotone_continuity_probe,
    pi_additivity_exhaustive,
    pi_class_oracle,
    pi_reconstruction_gap,
    unbounded_example,
    unbounded_structure,
    unbounded_table,
)
from addinfo.linalg import Projection, ProjectionPartition, coordinate_partition, make_state
from addinfo.oracle import from_information


def test_khinchin_shannon_passes():
    report = check_khinchin(Shannon(), trials=200)
    assert report.passed
    assert report["4_recursive"].defect < 1e-12


def test_khinchin_renyi_fails_recursivity():
    report = check_khinchin(Renyi(2.0), trials=200)
    assert report["2_normalized"].passed
    assert not report["4_recursive"].passed


def test_khinchin_scaled_shannon_fails_normalization():
    report = check_khinchin(LinearCombination([(2.0, Shannon())]), trials=50)
    assert not report["2_normalized"].passed
    assert report["4_recursive"].passed


def test_renyi_suite():
    report = check_renyi_suite(trials=30)
    assert report.passed
    assert report["limit_shannon"].defect < 1e-4


def test_unbounded_table_values():
    rows = unbounded_table(3)
    assert [r[0] for r in rows] == [0, 1, 2, 3]
    assert rows[0][1] == F(1, 2) and rows[1][1] == F(1, 16)
    values = [r[3] for r in rows]
    assert values[0] == 0.0
    # I_s = 0 and tr mu = 0, so I(P_n) = mu(P_n) (log2 rho_n - log2(1 - rho_n))
    for n, w, m, v in rows[1:]:
        assert m == 2.0 ** (1 - n)
        w = float(w)
        assert abs(v - m * (math.log2(w) - math.log1p(-w) / math.log(2))) < 1e-9
    assert all(b < a for a, b in zip(values, values[1:]))


def test_epsilon_spread_finite():
    G = unbounded_example(unbounded_structure(2), 2)
    lo, hi = epsilon_spread(G, F(1, 16), samples=50, seed=1)
    assert math.isfinite(lo) and math.isfinite(hi) and lo <= hi
    with pytest.raises(ResolutionTooCoarse):
        epsilon_spread(G, F(1, 2), samples=5)


def test_pi_class_membership():
    rho = make_state(["1/4", "1/4", "1/4", "1/4", "0", "0"])
    e, f = Projection.from_support(6, [0]), Projection.from_support(6, [1])
    oracle = pi_class_oracle(rho, e, f)
    member = ProjectionPartition([e, f, Projection.from_support(6, [2, 3, 4, 5])])
    assert oracle(member) == 1.0
    # a null summand attached to e does not change the class
    padded = ProjectionPartition([Projection.from_support(6, [0, 4]), f, Projection.from_support(6, [2, 3, 5])])
    assert oracle(padded) == 1.0
    assert oracle(coordinate_partition(6)) == 0.0


def test_pi_exhaustive_additivity():
    report = pi_additivity_exhaustive()
    assert report.partitions == 203
    assert report.independent_pairs > 0 and report.violations == 0 and report.passed


def test_pi_reconstruction_gap():
    gap = pi_reconstruction_gap(seed=1, verify_trials=30)
    assert gap.extraction.verification.passed
    assert gap.partition_value == 1.0 and abs(gap.reconstruction) < 1e-12


def test_monotone_probe():
    rho = make_state(["1/2", "1/4", "1/8", "1/8"])
    oracle = from_information(GeneralInformation(rho, None, Shannon()))
    chain = [Projection.from_support(4, [0]), Projection.from_support(4, [0, 1])]
    report = monotone_continuity_probe(oracle, chain, Projection.from_support(4, [0, 1, 2]))
    assert len(report.values) == 2 and report.values[0] == 1.0
    with pytest.raises(ChainNotMonotone):
        monotone_continuity_probe(oracle, list(reversed(chain)), Projection.identity(4))
    assert np.isfinite(report.gap)
