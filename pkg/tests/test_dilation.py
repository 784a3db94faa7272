import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from addinfo.dilation import check_bound, dilate, dilate_refined, dilation_audit, range_basis_qr
from addinfo.exceptions import NotCommuting, NotOrthogonal, RankInfeasible
from addinfo.families import random_state
from addinfo.linalg import Projection, State, haar_unitary


def setup(k, r, extra=0, seed=0):
    rng = np.random.default_rng(seed)
    dim = k * r + extra
    u = haar_unitary(dim, rng)
    P = Projection.from_vectors(u[:, :r])
    Q = Projection.from_vectors(u[:, r:k * r]) if k > 1 else Projection.zero(dim)
    return P, Q, u, rng


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 2), st.integers(0, 10_000))
def test_dilation_properties(k, r, extra, seed):
    P, Q, _, _ = setup(k, r, extra, seed)
    blocks = dilate(P, Q, k)
    assert len(blocks) == k
    total = sum(b.matrix for b in blocks)
    assert np.allclose(total, P.matrix + Q.matrix, atol=1e-12)
    for i, a in enumerate(blocks):
        assert np.allclose(a.matrix @ a.matrix, a.matrix, atol=1e-12)
        assert np.allclose(P.matrix @ a.matrix @ P.matrix, P.matrix / k, atol=1e-12)
        for b in blocks[i + 1:]:
            assert np.allclose(a.matrix @ b.matrix, 0, atol=1e-12)


def test_audit_and_bound():
    P, Q, u, rng = setup(3, 2, extra=1, seed=4)
    blocks = dilate(P, Q, 3)
    audit = dilation_audit(P, Q, blocks)
    assert audit.passed() and audit.max_compression < 1e-12
    w = rng.dirichlet(np.ones(7))
    rho = State((u * w) @ u.conj().T, validate=False)
    report = check_bound(rho, P, Q, blocks)
    assert report.passed()
    # the first two columns are rho(P_l) = rho(P)/k + tr(rho Q P_l Q)
    for lhs, bound, slack, head, tail in report.rows:
        assert abs(lhs - head - tail) < 1e-12
        assert abs(head - rho.prob(P) / 3) < 1e-12


def test_bound_needs_commuting_state():
    P, Q, _, _ = setup(2, 1, extra=1, seed=1)
    blocks = dilate(P, Q, 2)
    with pytest.raises(NotCommuting):
        check_bound(random_state(3, 7), P, Q, blocks)


def test_rank_and_orthogonality_errors():
    P, Q, u, _ = setup(3, 1, seed=2)
    with pytest.raises(RankInfeasible):
        dilate(P, Q, 2)
    with pytest.raises(NotOrthogonal):
        dilate(P, P, 2)


def test_range_basis_qr():
    P, _, _, _ = setup(2, 3, seed=3)
    b = range_basis_qr(P)
    assert b.shape == (6, 3)
    assert np.allclose(b @ b.conj().T, P.matrix)


def test_refined_dilation():
    rng = np.random.default_rng(6)
    u = haar_unitary(6, rng)
    subP = [Projection.from_vectors(u[:, :1]), Projection.from_vectors(u[:, 1:2])]
    Q = Projection.from_vectors(u[:, 2:6])
    out = dilate_refined(subP, Q, 3)
    P = subP[0] + subP[1]
    for b in out.blocks:
        assert np.allclose(P.matrix @ b.matrix @ P.matrix, P.matrix / 3, atol=1e-12)
    assert np.allclose(sum(b.matrix for b in out.blocks), P.matrix + Q.matrix, atol=1e-12)
    with pytest.raises(RankInfeasible):
        dilate_refined(subP, Projection.from_vectors(u[:, 2:5]), 3)
