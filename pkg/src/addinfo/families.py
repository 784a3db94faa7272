"""Seeded generators for states, signed operators and symmetric informations."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ._validation import check_rng
from .exceptions import UnsplittableCell
from .functionals import LinearCombination, Renyi, Shannon
from .linalg import SignedOperator, State, haar_unitary, make_state
from .structure import spectral_structure

__all__ = [
    "random_state",
    "random_diagonal_state",
    "grouped_state",
    "random_mu",
    "random_symmetric",
    "SYMMETRIC_FAMILY",
]

SYMMETRIC_FAMILY = ("shannon", "renyi-1/2", "renyi-2", "lincomb")


def random_state(dim: int, seed=None) -> State:
    """Faithful state with a Haar eigenbasis and Dirichlet spectrum."""
    rng = check_rng(seed)
    w = rng.dirichlet(np.ones(dim))
    u = haar_unitary(dim, rng)
    m = (u * w) @ u.conj().T
    return State((m + m.conj().T) / 2, validate=False)


def random_diagonal_state(dim: int, seed=None, denominator: int = 64) -> State:
    """Diagonal state with positive rational weights of the given denominator."""
    rng = check_rng(seed)
    cuts = np.sort(rng.choice(np.arange(1, denominator), size=dim - 1, replace=False))
    parts = np.diff(np.concatenate([[0], cuts, [denominator]]))
    return make_state([Fraction(int(p), denominator) for p in parts])


def _composition(total: int, parts: int, rng) -> list:
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False))
    return [int(x) for x in np.diff(np.concatenate([[0], cuts, [total]]))]


def grouped_state(dim: int = 8, level: int = 2, seed=None, diagonal: bool = False) -> State:
    """State whose eigen-weights fall into ``2**level`` groups of equal total weight.

    Group sizes are unequal, and the grouping found by
    :func:`~addinfo.structure.spectral_structure` is checked to have cells of
    different ranks, so equal-measure cells built from it are not all of the
    same rank. Weights within a group are positive multiples of ``1/64``
    (or of a finer dyadic unit when a group is large).
    """
    rng = check_rng(seed)
    n = 2 ** level
    if dim <= n:
        raise ValueError(f"need dim > {n} for unequal group sizes")
    unit = 64
    while unit // n < dim:
        unit *= 2
    per_group = unit // n
    for _ in range(1000):
        sizes = _composition(dim, n, rng)
        if len(set(sizes)) == 1:
            continue
        weights = []
        for s in sizes:
            weights.extend(Fraction(c, unit) for c in _composition(per_group, s, rng))
        if diagonal:
            rho = make_state(weights)
        else:
            u = haar_unitary(dim, rng)
            w = np.array([float(x) for x in weights])
            m = (u * w) @ u.conj().T
            rho = State((m + m.conj().T) / 2, validate=False)
        try:
            ranks = {p.rank for p in spectral_structure(rho, level).projections}
        except UnsplittableCell:
            continue
        if len(ranks) > 1:
            return rho
    raise RuntimeError("could not draw a grouped state")  # pragma: no cover


def random_mu(dim: int, seed=None, scale: float = 0.5) -> SignedOperator:
    """Traceless Hermitian operator with Gaussian entries, spectral norm ``scale``."""
    rng = check_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (z + z.conj().T) / 2
    h = h - np.trace(h) / dim * np.eye(dim)
    h = h * (scale / np.linalg.norm(h, 2))
    return SignedOperator((h + h.conj().T) / 2, validate=False)


def random_symmetric(seed=None, kind: str | None = None):
    rng = check_rng(seed)
    if kind is None:
        kind = SYMMETRIC_FAMILY[int(rng.integers(len(SYMMETRIC_FAMILY)))]
    if kind == "shannon":
        return Shannon()
    if kind == "renyi-1/2":
        return Renyi(0.5)
    if kind == "renyi-2":
        return Renyi(2.0)
    if kind == "lincomb":
        a = float(rng.uniform(0.2, 0.8))
        return LinearCombination([(a, Shannon()), (1 - a, Renyi(2.0))])
    raise ValueError(f"unknown family member {kind!r}")
