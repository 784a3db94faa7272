"""Splitting ``P + Q`` into ``k`` blocks that each compress ``P`` to ``P/k``.

Model space: basis ``e_{l,n}`` (``l < k``, ``n < rank P``), blocks
``P'_l = span{e_{l,n}}`` and ``P' = span{u_n}`` with
``u_n = (e_{1,n} + ... + e_{k,n}) / sqrt(k)``, so ``P' P'_l P' = P'/k``.
A partial isometry ``T`` sends ``u_n`` onto a basis of ``range P`` and the
orthogonal complement of ``P'`` onto a basis of ``range Q``; the blocks are
``P_l = T P'_l T*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from ._validation import DEFAULT_TOL, check_same_dim
from .exceptions import NotCommuting, NotOrthogonal, RankInfeasible
from .linalg import Projection, State

__all__ = [
    "dilate",
    "dilation_audit",
    "check_bound",
    "dilate_refined",
    "DilationAudit",
    "BoundReport",
    "RefinedDilation",
    "range_basis_qr",
]


def range_basis_qr(P: Projection) -> np.ndarray:
    """Orthonormal basis of ``range P`` from QR with column pivoting."""
    if P.rank == 0:
        return np.zeros((P.dim, 0), dtype=complex)
    q, _, _ = scipy.linalg.qr(np.asarray(P.matrix), pivoting=True)
    return q[:, :P.rank]


def _model(k: int, r: int):
    """Model vectors ``u_n`` and a basis of their orthogonal complement."""
    dim = k * r
    u = np.zeros((dim, r), dtype=complex)
    for n in range(r):
        u[[l * r + n for l in range(k)], n] = 1 / math.sqrt(k)
    if k == 1:
        return u, np.zeros((dim, 0), dtype=complex)
    comp = np.eye(dim) - u @ u.conj().T
    q, _, _ = scipy.linalg.qr(comp, pivoting=True)
    return u, q[:, :dim - r]


def dilate(P: Projection, Q: Projection, k: int, tol: float = DEFAULT_TOL) -> list:
    """``k`` orthogonal projections summing to ``P + Q`` with ``P P_l P = P/k``.

    Requires ``P`` orthogonal to ``Q`` and ``rank Q = (k - 1) rank P``.
    """
    check_same_dim(P.dim, Q.dim)
    if k < 1:
        raise RankInfeasible("k must be at least 1")
    overlap = float(np.max(np.abs(P.matrix @ Q.matrix)))
    if overlap > tol:
        raise NotOrthogonal(f"P and Q are not orthogonal (max |PQ| = {overlap:.3e})")
    r = P.rank
    if Q.rank != (k - 1) * r:
        raise RankInfeasible(f"rank Q = {Q.rank}, need (k - 1) * rank P = {(k - 1) * r}")
    if k == 1:
        return [P + Q]
    u, comp = _model(k, r)
    target = np.hstack([range_basis_qr(P), range_basis_qr(Q)])
    source = np.hstack([u, comp])
    T = target @ source.conj().T
    blocks = []
    for l in range(k):
        cols = T[:, l * r:(l + 1) * r]
        m = cols @ cols.conj().T
        blocks.append(Projection((m + m.conj().T) / 2, validate=False))
    return blocks


@dataclass
class DilationAudit:
    k: int
    orthogonality: float
    sum_defect: float
    compression: list

    @property
    def max_compression(self) -> float:
        return max(self.compression, default=0.0)

    def passed(self, tol: float = DEFAULT_TOL) -> bool:
        return max(self.orthogonality, self.sum_defect, self.max_compression) <= tol


def dilation_audit(P: Projection, Q: Projection, blocks: Sequence[Projection]) -> DilationAudit:
    """Numerical check of orthogonality, completeness and ``P P_l P = P/k``."""
    k = len(blocks)
    ortho = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            ortho = max(ortho, float(np.linalg.norm(blocks[i].matrix @ blocks[j].matrix, 2)))
    total = sum(b.matrix for b in blocks)
    sum_defect = float(np.linalg.norm(total - P.matrix - Q.matrix, 2))
    comp = [float(np.linalg.norm(P.matrix @ b.matrix @ P.matrix - P.matrix / k, 2)) for b in blocks]
    return DilationAudit(k, ortho, sum_defect, comp)


@dataclass
class BoundReport:
    """Rows ``(rho(P_l), rho(P)/k + rho(Q), slack, tr(rho P P_l P), tr(rho Q P_l Q))``."""

    rows: list

    @property
    def min_slack(self) -> float:
        return min(r[2] for r in self.rows)

    def passed(self, tol: float = 1e-12) -> bool:
        return self.min_slack >= -tol


def check_bound(rho: State, P: Projection, Q: Projection, blocks: Sequence[Projection],
                tol: float = DEFAULT_TOL) -> BoundReport:
    """Audit ``rho(P_l) <= rho(P)/k + rho(Q)`` for a state commuting with ``P``."""
    check_same_dim(rho.dim, P.dim, Q.dim)
    comm = float(np.max(np.abs(rho.matrix @ P.matrix - P.matrix @ rho.matrix)))
    if comm > tol:
        raise NotCommuting(f"rho does not commute with P (max |[rho, P]| = {comm:.3e})")
    k = len(blocks)
    bound = rho.prob(P) / k + rho.prob(Q)
    rows = []
    for b in blocks:
        lhs = rho.prob(b)
        head = rho.expectation(P.matrix @ b.matrix @ P.matrix)
        tail = rho.expectation(Q.matrix @ b.matrix @ Q.matrix)
        rows.append((lhs, bound, bound - lhs, head, tail))
    return BoundReport(rows)


@dataclass
class RefinedDilation:
    sub_blocks: list
    q_blocks: list
    blocks: list


def dilate_refined(subP: Sequence[Projection], Q: Projection, k: int,
                   tol: float = DEFAULT_TOL) -> RefinedDilation:
    """Dilate each piece ``P^s`` of ``P = sum P^s`` against its own share ``Q^s`` of ``Q``.

    ``Q`` is cut into consecutive chunks of its range basis of sizes
    ``(k - 1) rank P^s``; returns ``P_l^s``, ``Q^s`` and ``P_l = sum_s P_l^s``.
    """
    subP = list(subP)
    if not subP:
        raise RankInfeasible("need at least one sub-block")
    check_same_dim(Q.dim, *(p.dim for p in subP))
    for i in range(len(subP)):
        for j in range(i + 1, len(subP)):
            overlap = float(np.max(np.abs(subP[i].matrix @ subP[j].matrix)))
            if overlap > tol:
                raise NotOrthogonal(f"sub-blocks ({i}, {j}) are not orthogonal ({overlap:.3e})")
    need = [(k - 1) * p.rank for p in subP]
    if sum(need) != Q.rank:
        raise RankInfeasible(f"rank Q = {Q.rank}, sub-blocks need {sum(need)}")
    qbasis = range_basis_qr(Q)
    q_blocks, sub_blocks = [], []
    cursor = 0
    for p, size in zip(subP, need):
        cols = qbasis[:, cursor:cursor + size]
        cursor += size
        m = cols @ cols.conj().T
        qs = Projection((m + m.conj().T) / 2, validate=False)
        q_blocks.append(qs)
        sub_blocks.append(dilate(p, qs, k, tol))
    blocks = [Projection(sum(sb[l].matrix for sb in sub_blocks), validate=False) for l in range(k)]
    return RefinedDilation(sub_blocks, q_blocks, blocks)
