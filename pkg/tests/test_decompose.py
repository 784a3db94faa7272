import math
from fractions import Fraction as F

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from addinfo.borel import MeasurablePartition
from addinfo.decompose import (
    decompose,
    extract_cell_measure,
    extract_symmetric,
    gleason_fit,
    integer_partitions,
    reconstruct,
    swap_partition,
    traceless_basis,
    verify_decomposition,
)
from addinfo.estimator import InformationDecomposer
from addinfo.exceptions import DimensionTooSmall, GridMismatch, OracleNotAdditive, RankDeficient
from addinfo.families import grouped_state, random_mu
from addinfo.functionals import Distribution, GeneralInformation, Renyi, Shannon
from addinfo.linalg import Projection, SignedOperator, haar_unitary, make_state
from addinfo.oracle import InformationOracle, from_information
from addinfo.structure import spectral_structure, uniform_structure


@pytest.fixture(scope="module")
def triple():
    rng = np.random.default_rng(11)
    rho = grouped_state(8, 2, seed=rng)
    G = GeneralInformation(rho, random_mu(8, rng), Renyi(2.0))
    return rho, G


def test_swap_partition_layout():
    a1, a2, a3 = swap_partition(8, 5, 2)
    assert a1[0] == 5 and a2[0] == 2
    assert (len(a1), len(a2), len(a3)) == (2, 4, 2)
    assert sorted(a1 + a2 + a3) == list(range(8))
    with pytest.raises(GridMismatch):
        swap_partition(6, 0, 1)


def test_integer_partitions_count():
    assert len(list(integer_partitions(4))) == 5
    assert len(list(integer_partitions(8))) == 22
    assert all(sum(p) == 8 for p in integer_partitions(8))


def test_traceless_basis_orthonormal():
    B = traceless_basis(4)
    assert B.shape == (15, 4, 4)
    gram = np.real(np.einsum("aij,bji->ab", B, B))
    assert np.allclose(gram, np.eye(15))
    assert np.allclose(np.einsum("aii->a", B), 0)


def test_swap_increments_equal_cell_differences(triple):
    rho, G = triple
    B = uniform_structure(rho, 2, 3)
    est = extract_cell_measure(from_information(G), B)
    truth = [G.mu.value(p) for p in B.projections]
    for v in range(4):
        for w in range(4):
            if v != w:
                assert abs(est.increments[v, w] - (truth[v] - truth[w])) < 1e-12
    assert np.allclose(est.values, truth, atol=1e-12)
    assert abs(est.total) < 1e-15 and est.antisymmetry < 1e-12


def test_symmetric_extraction_matches_truth(triple):
    rho, G = triple
    B = spectral_structure(rho, 2)
    oracle = from_information(G)
    table = extract_symmetric(oracle, B, extract_cell_measure(oracle, B).values)
    assert len(table) == 5
    for profile, value in table.items():
        assert abs(value - G.sym(Distribution(list(profile)))) < 1e-12


def test_gleason_fit_recovers_operator():
    rng = np.random.default_rng(5)
    mu = random_mu(3, rng)
    samples = []
    for _ in range(20):
        v = haar_unitary(3, rng)[:, :1]
        p = Projection.from_vectors(v)
        samples.append((p, mu.value(p)))
    fit = gleason_fit(samples)
    assert np.allclose(fit.mu.matrix, mu.matrix, atol=1e-12)
    assert fit.rank == 8


def test_gleason_fit_needs_dimension_three():
    p = Projection.from_support(2, [0])
    with pytest.raises(DimensionTooSmall):
        gleason_fit([(p, 0.0)])


def test_gleason_fit_rank_deficient():
    # diagonal projections only see the diagonal part of mu
    samples = [(Projection.from_support(3, [i]), 0.0) for i in range(3)]
    with pytest.raises(RankDeficient) as info:
        gleason_fit(samples)
    assert info.value.null_dim == 6


def test_decompose_round_trip(triple):
    rho, G = triple
    report = decompose(from_information(G), rho, level=2, seed=1, verify_trials=20)
    assert report.passed
    assert np.max(np.abs(report.fitted_mu.matrix - G.mu.matrix)) < 1e-10
    assert report.verification.max_residual < 1e-10
    assert report.query_count > 0


def test_decompose_rejects_nonadditive_oracle():
    rho = grouped_state(8, 2, seed=0)
    G = GeneralInformation(rho, None, Shannon())
    squared = InformationOracle(lambda P: G(P) ** 2, name="squared")
    with pytest.raises(OracleNotAdditive):
        decompose(squared, rho, level=2)


def test_decompose_level_too_small():
    rho = grouped_state(8, 2, seed=0)
    with pytest.raises(GridMismatch):
        decompose(from_information(GeneralInformation(rho, None, Shannon())), rho, level=1)


def test_reconstruct_and_verify_with_true_pieces():
    rho = make_state([F(1, 8)] * 8)
    mu = SignedOperator(np.diag([0.1, -0.1, 0, 0, 0.2, -0.2, 0, 0]))
    G = GeneralInformation(rho, mu, Shannon())
    table = {tuple(sorted((F(s, 4) for s in p), reverse=True)): Shannon()(Distribution([F(s, 4) for s in p]))
             for p in integer_partitions(4)}
    B = uniform_structure(rho, 2, 0)
    P = B.partition(MeasurablePartition(
        [B.sets[0] | B.sets[1], B.sets[2], B.sets[3]]))
    assert abs(reconstruct(P, rho, mu, table, 2) - G(P)) < 1e-12
    report = verify_decomposition(from_information(G), rho, mu, table, trials=10)
    assert report.passed and report.max_residual < 1e-12


def test_estimator_api(triple):
    rho, G = triple
    est = InformationDecomposer(verify_trials=5, seed=2)
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(NotFittedError):
        est.predict([])
    est.fit(from_information(G), rho)
    B = uniform_structure(rho, 2, 9)
    parts = [B.partition(MeasurablePartition(
        [B.sets[0], B.sets[1] | B.sets[2] | B.sets[3]]))]
    assert abs(est.predict(parts)[0] - G(parts[0])) < 1e-10
    assert math.isclose(np.trace(est.mu_.matrix).real, 0, abs_tol=1e-12)


def test_estimator_doctest_and_lazy_export():
    import doctest

    import addinfo
    import addinfo.estimator

    assert doctest.testmod(addinfo.estimator).failed == 0
    assert addinfo.InformationDecomposer is InformationDecomposer
