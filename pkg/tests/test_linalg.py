from fractions import Fraction as F

import numpy as np
import pytest

from addinfo.exceptions import (
    DimensionMismatch,
    NegativeWeight,
    NonCommuting,
    NotComplete,
    NotHermitian,
    NotOrthogonal,
    NotProjection,
    NotUnitVector,
    SumNotOne,
)
from addinfo.families import random_state
from addinfo.functionals import von_neumann_info
from addinfo.linalg import (
    Projection,
    State,
    coordinate_partition,
    haar_unitary,
    make_state,
    physically_independent,
    post_measurement_state,
    product_partition,
    projection_partition,
    tensor_independent_pair,
)


def test_diagonal_state_is_exact():
    rho = make_state(["1/2", "1/3", "1/6"])
    assert rho.weights == (F(1, 2), F(1, 3), F(1, 6))
    assert rho.probability(Projection.from_support(3, [0, 2])) == F(2, 3)


def test_state_rejects_bad_weights():
    with pytest.raises(SumNotOne):
        make_state(["1/2", "1/3"])
    with pytest.raises(NegativeWeight):
        make_state(["3/2", "-1/2"])
    with pytest.raises(NotHermitian):
        State(np.array([[0.5, 0.1], [0.2, 0.5]]))


def test_projection_checks():
    with pytest.raises(NotProjection):
        Projection(np.diag([1.0, 0.5]))
    P = Projection.from_support(3, [1])
    assert P.rank == 1 and P.complement().rank == 2
    assert P.is_orthogonal_to(P.complement())


def test_partition_checks():
    e = np.eye(3)
    with pytest.raises(NotComplete):
        projection_partition([np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0])])
    with pytest.raises(NotOrthogonal):
        projection_partition([np.diag([1.0, 1, 0]), np.diag([0, 1.0, 1])])
    assert len(projection_partition([e])) == 1


def test_random_block_probabilities_sum_to_one():
    rng = np.random.default_rng(0)
    rho = random_state(4, rng)
    u = haar_unitary(4, rng)
    P = projection_partition([Projection.from_vectors(u[:, :1]).matrix,
                              Projection.from_vectors(u[:, 1:]).matrix])
    assert abs(sum(P.probabilities(rho)) - 1) < 1e-12


def test_tensor_pair_is_independent():
    rng = np.random.default_rng(1)
    rho, P, Q = tensor_independent_pair(random_state(2, rng), random_state(3, rng),
                                        coordinate_partition(2), coordinate_partition(3))
    assert physically_independent(P, Q, rho)
    assert len(product_partition(P, Q)) == 6


def test_dependent_pair_detected():
    rho = make_state(["1/2", "1/4", "1/4"])
    P = projection_partition([np.diag([1.0, 0, 0]), np.diag([0, 1.0, 1])])
    report = physically_independent(P, P, rho)
    assert not report and report.max_defect > 0


def test_product_partition_noncommuting():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    X = projection_partition([np.outer(h[:, 0], h[:, 0]), np.outer(h[:, 1], h[:, 1])])
    with pytest.raises(NonCommuting):
        product_partition(coordinate_partition(2), X)


def test_post_measurement_entropy_matches_info():
    # the outcome entropy of measuring e equals the von Neumann entropy of the mixture
    rng = np.random.default_rng(2)
    e = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    e /= np.linalg.norm(e)
    P = coordinate_partition(4)
    sigma = post_measurement_state(e, P)
    ev = np.linalg.eigvalsh(sigma.matrix)
    ev = ev[ev > 1e-15]
    pure = State(np.outer(e, e.conj()))
    assert abs(-np.sum(ev * np.log2(ev)) - von_neumann_info(pure, P)) < 1e-12


def test_post_measurement_requires_unit_vector():
    with pytest.raises(NotUnitVector):
        post_measurement_state([1.0, 1.0], coordinate_partition(2))
    with pytest.raises(DimensionMismatch):
        post_measurement_state([1.0], coordinate_partition(2))


def test_haar_unitary_is_unitary():
    u = haar_unitary(5, np.random.default_rng(3))
    assert np.allclose(u.conj().T @ u, np.eye(5))
