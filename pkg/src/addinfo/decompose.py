"""Recover ``mu`` and ``I_s`` from a black-box additive information.

Pipeline:

1. Screen the oracle for additivity on independent partitions carried by
   random boolean structures.
2. For each structure with ``2**L`` equal cells, measure the swap increment
   ``I(T_VW A) - I(A) = m(V) - m(W)`` for every ordered pair of cells, where
   ``A = (A_1, A_2, A_3)`` has measures ``(1/4, 1/2, 1/4)`` with ``V`` in
   ``A_1`` and ``W`` in ``A_2``. Averaging the antisymmetrized increments over
   ``W`` gives ``m(V)`` because the cell values sum to zero.
3. Fit a traceless Hermitian ``mu`` to all (cell projection, m) samples.
4. Tabulate ``I_s`` on every equal-cell measure profile by subtracting the
   nonsymmetric part from the oracle value.
5. Check the reconstruction on held-out partitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._validation import check_rng
from .borel import IntervalSet, MeasurablePartition, swap_transport
from .exceptions import (
    DimensionTooSmall,
    GridMismatch,
    NotCellAligned,
    OracleNotAdditive,
    RankDeficient,
    UnsplittableCell,
)
from .functionals import log2
from .linalg import ProjectionPartition, SignedOperator, State
from .structure import BooleanStructure, spectral_structure, uniform_structure

__all__ = [
    "CellEstimate",
    "GleasonFit",
    "ExtractionReport",
    "InvarianceReport",
    "VerificationReport",
    "AdditivityReport",
    "swap_partition",
    "extract_cell_measure",
    "extract_symmetric",
    "structure_invariance_check",
    "gleason_fit",
    "traceless_basis",
    "reconstruct",
    "verify_decomposition",
    "check_additivity",
    "decompose",
    "integer_partitions",
]

EXTRACTION_TOL = 1e-9
FIT_TOL = 1e-8
VERIFY_TOL = 1e-8


@dataclass
class CellEstimate:
    """Per-cell values with the raw increment matrix they came from."""

    values: list
    increments: np.ndarray
    antisymmetry: float

    @property
    def total(self) -> float:
        return math.fsum(self.values)


def swap_partition(n: int, v: int, w: int) -> tuple:
    """Cell groups ``(A_1, A_2, A_3)`` of sizes ``n/4, n/2, n/4`` with ``v`` in ``A_1``, ``w`` in ``A_2``."""
    if n < 4 or n % 4:
        raise GridMismatch("swap partitions need at least 4 equal cells, a multiple of 4")
    rest = [c for c in range(n) if c not in (v, w)]
    q = n // 4
    a1 = [v] + rest[:q - 1]
    a2 = [w] + rest[q - 1:q - 1 + 2 * q - 1]
    a3 = rest[q - 1 + 2 * q - 1:]
    return a1, a2, a3


def _union(sets) -> IntervalSet:
    out = IntervalSet.empty()
    for s in sets:
        out = out | s
    return out


def extract_cell_measure(oracle, B: BooleanStructure) -> CellEstimate:
    """Estimate ``m(C) = tr(mu B(C))`` for every cell of an equal-cell structure."""
    n = B.equal_cell_count()
    if n is None:
        raise GridMismatch("structure must have equal cells")
    cells = B.sets
    d = np.zeros((n, n))
    for v in range(n):
        for w in range(n):
            if v == w:
                continue
            groups = swap_partition(n, v, w)
            A = MeasurablePartition([_union(cells[i] for i in g) for g in groups], validate=False)
            TA = swap_transport(A, cells[v], cells[w])
            d[v, w] = oracle(B.partition(TA)) - oracle(B.partition(A))
    anti = (d - d.T) / 2
    antisymmetry = float(np.max(np.abs(d + d.T))) if n > 1 else 0.0
    values = [math.fsum(anti[v]) / n for v in range(n)]
    return CellEstimate(values, d, antisymmetry)


def integer_partitions(n: int, largest: int | None = None):
    """Partitions of ``n`` into positive parts, largest part first."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def _profile_key(probs) -> tuple:
    return tuple(sorted((Fraction(p) for p in probs), reverse=True))


def extract_symmetric(oracle, B: BooleanStructure, m_hat, profiles=None) -> dict:
    """``I_s`` on measure profiles, as ``oracle(B(A)) - sum m(A_i) log2 lambda(A_i)``.

    By default every profile of the equal-cell grid is sampled. Returns a
    dict keyed by the descending tuple of block measures.
    """
    n = B.equal_cell_count()
    if n is None:
        raise GridMismatch("structure must have equal cells")
    if profiles is None:
        profiles = list(integer_partitions(n))
    out = {}
    for sizes in profiles:
        if sum(sizes) != n:
            raise NotCellAligned(f"profile {sizes} does not use all {n} cells")
        blocks, cursor = [], 0
        for s in sizes:
            blocks.append(tuple(range(cursor, cursor + s)))
            cursor += s
        A = MeasurablePartition([_union(B.sets[i] for i in b) for b in blocks], validate=False)
        value = oracle(B.partition(A))
        correction = math.fsum(
            math.fsum(m_hat[i] for i in b) * log2(Fraction(len(b), n)) for b in blocks
        )
        out[_profile_key(Fraction(s, n) for s in sizes)] = value - correction
    return out


def traceless_basis(dim: int) -> np.ndarray:
    """Orthonormal basis of traceless Hermitian matrices (generalized Gell-Mann)."""
    mats = []
    for j in range(dim):
        for k in range(j + 1, dim):
            s = np.zeros((dim, dim), dtype=complex)
            s[j, k] = s[k, j] = 1 / math.sqrt(2)
            mats.append(s)
            a = np.zeros((dim, dim), dtype=complex)
            a[j, k], a[k, j] = -1j / math.sqrt(2), 1j / math.sqrt(2)
            mats.append(a)
    for l in range(1, dim):
        diag = np.zeros(dim)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(diag / math.sqrt(l * (l + 1))).astype(complex))
    return np.array(mats).reshape(len(mats), dim, dim)


@dataclass
class GleasonFit:
    mu: SignedOperator
    residual: float
    rank: int
    n_samples: int


def gleason_fit(samples, tol: float = 1e-10) -> GleasonFit:
    """Least-squares traceless Hermitian ``mu`` with ``tr(mu P_k) ~ v_k``."""
    samples = list(samples)
    if not samples:
        raise RankDeficient("no samples", null_dim=None)
    dim = samples[0][0].dim
    if dim < 3:
        raise DimensionTooSmall(f"dimension {dim} < 3: frame functions need not be linear")
    basis = traceless_basis(dim)
    P = np.array([p.matrix for p, _ in samples])
    v = np.array([float(val) for _, val in samples])
    X = np.real(np.einsum("aij,kji->ka", basis, P))
    coef, _, rank, sv = np.linalg.lstsq(X, v, rcond=None)
    cutoff = tol * (sv[0] if sv.size else 0.0)
    rank = int(np.sum(sv > cutoff))
    if rank < basis.shape[0]:
        raise RankDeficient(
            f"sample projections span only {rank} of {basis.shape[0]} traceless directions",
            null_dim=basis.shape[0] - rank,
        )
    mu = np.einsum("a,aij->ij", coef, basis)
    residual = float(np.max(np.abs(X @ coef - v)))
    return GleasonFit(SignedOperator((mu + mu.conj().T) / 2, validate=False), residual, rank, len(samples))


def _sym_lookup(sym_table: dict, probs, level: int):
    n = 2 ** level
    grid = []
    for p in probs:
        c = round(float(p) * n)
        if abs(float(p) * n - c) > 1e-9:
            raise NotCellAligned(f"outcome weight {float(p)!r} is not on the 1/{n} grid")
        if c:
            grid.append(Fraction(c, n))
    key = _profile_key(grid)
    if key not in sym_table:
        raise NotCellAligned(f"profile {[str(x) for x in key]} was not sampled")
    return sym_table[key]


def reconstruct(P: ProjectionPartition, rho: State, mu: SignedOperator, sym_table: dict,
                level: int) -> float:
    """``I_s(profile) + sum tr(mu P_i) log2 rho(P_i)`` from the fitted pieces."""
    probs = P.probabilities(rho)
    value = _sym_lookup(sym_table, probs, level)
    terms = []
    for block, w in zip(P, probs):
        if float(w) > 1e-14:
            terms.append(mu.value(block) * log2(w))
    return value + math.fsum(terms)


@dataclass
class VerificationReport:
    trials: int
    max_residual: float
    mean_residual: float
    tol: float
    passed: bool


def _random_grouping(n: int, rng) -> list:
    m = int(rng.integers(1, n + 1))
    labels = rng.integers(0, m, size=n)
    groups = [tuple(int(i) for i in np.flatnonzero(labels == g)) for g in range(m)]
    return [g for g in groups if g]


def _held_out(rho: State, level: int, rng):
    B = uniform_structure(rho, level, rng)
    groups = _random_grouping(B.equal_cell_count(), rng)
    return ProjectionPartition([B.projection_of(g) for g in groups], validate=False)


def verify_decomposition(oracle, rho: State, mu_hat: SignedOperator, sym_hat: dict,
                         trials: int = 100, seed=0, level: int = 2,
                         tol: float = VERIFY_TOL) -> VerificationReport:
    """Compare oracle and reconstruction on random partitions of fresh structures."""
    rng = check_rng(seed)
    errs = []
    for _ in range(trials):
        P = _held_out(rho, level, rng)
        errs.append(abs(oracle(P) - reconstruct(P, rho, mu_hat, sym_hat, level)))
    worst = max(errs) if errs else 0.0
    mean = math.fsum(errs) / len(errs) if errs else 0.0
    return VerificationReport(trials, worst, mean, tol, worst <= tol)


@dataclass
class AdditivityReport:
    checks: int
    max_defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_defect <= self.tol


def check_additivity(oracle, rho: State, level: int, checks: int = 16, seed=0,
                     tol: float = 1e-4) -> AdditivityReport:
    """Screen ``I(P.Q) = I(P) + I(Q)`` on independent partitions of random structures.

    Cells are labelled by ``level`` bits; ``P`` groups cells by one subset of
    bits and ``Q`` by a disjoint subset, which makes them independent.
    """
    rng = check_rng(seed)
    n = 2 ** level
    worst = 0.0
    for _ in range(checks):
        B = uniform_structure(rho, level, rng)
        bits = list(rng.permutation(level))
        cut = int(rng.integers(1, level)) if level > 1 else 1
        s1 = bits[:cut]
        s2 = bits[cut:cut + int(rng.integers(1, level - cut + 1))] if level > cut else []

        def grouped(subset):
            keys: dict = {}
            for c in range(n):
                keys.setdefault(tuple((c >> b) & 1 for b in subset), []).append(c)
            return [tuple(v) for _, v in sorted(keys.items())]

        g1, g2 = grouped(s1), grouped(s2)
        P = ProjectionPartition([B.projection_of(g) for g in g1], validate=False)
        Q = ProjectionPartition([B.projection_of(g) for g in g2], validate=False)
        PQ = ProjectionPartition(
            [B.projection_of(tuple(sorted(set(a) & set(b)))) for a in g1 for b in g2], validate=False
        )
        worst = max(worst, abs(oracle(PQ) - oracle(P) - oracle(Q)))
    return AdditivityReport(checks, worst, tol)


@dataclass
class ExtractionReport:
    """Everything learned about an oracle at one resolution level."""

    level: int
    structures: list
    cell_measures: list
    fitted_mu: SignedOperator
    sym_samples: dict
    fit_residual: float
    design_rank: int
    antisymmetry: float
    total_m: float
    cell_fit_error: float
    additivity: AdditivityReport
    verification: VerificationReport | None
    query_count: int
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verification is not None and self.verification.passed


def _structures(rho: State, level: int, n_structures: int | None, rng, notes: list) -> list:
    n = 2 ** level
    basis_dim = rho.dim ** 2 - 1
    if n_structures is None:
        n_structures = -(-basis_dim // (n - 1)) + 2
    out = []
    try:
        out.append(spectral_structure(rho, level))
    except (UnsplittableCell, GridMismatch):
        notes.append("no spectral structure at this level; the direction rho - 1/d may be unidentified")
    while len(out) < n_structures:
        out.append(uniform_structure(rho, level, rng))
    return out


def decompose(oracle, rho: State, *, level: int = 2, n_structures: int | None = None,
              seed=0, additivity_checks: int = 16, additivity_tol: float = 1e-4,
              verify_trials: int = 100) -> ExtractionReport:
    """Run the full extraction and verification pipeline."""
    if level < 2:
        raise GridMismatch("swap increments need level >= 2")
    rng = check_rng(seed)
    start = getattr(oracle, "query_count", 0)
    add = check_additivity(oracle, rho, level, additivity_checks, rng, additivity_tol)
    if not add.passed:
        raise OracleNotAdditive(
            f"additivity defect {add.max_defect:.3e} exceeds {additivity_tol:.1e} "
            f"over {add.checks} independent pairs"
        )
    notes: list = []
    structures = _structures(rho, level, n_structures, rng, notes)
    estimates = [extract_cell_measure(oracle, B) for B in structures]
    samples = [(p, m) for B, est in zip(structures, estimates) for p, m in zip(B.projections, est.values)]
    fit = gleason_fit(samples)
    cell_err = max(abs(fit.mu.value(p) - m) for p, m in samples)
    sym = extract_symmetric(oracle, structures[0], estimates[0].values)
    verification = None
    if verify_trials:
        verification = verify_decomposition(oracle, rho, fit.mu, sym, verify_trials, rng, level)
    return ExtractionReport(
        level=level,
        structures=structures,
        cell_measures=[list(zip(B.sets, est.values)) for B, est in zip(structures, estimates)],
        fitted_mu=fit.mu,
        sym_samples=sym,
        fit_residual=fit.residual,
        design_rank=fit.rank,
        antisymmetry=max(e.antisymmetry for e in estimates),
        total_m=max(abs(e.total) for e in estimates),
        cell_fit_error=cell_err,
        additivity=add,
        verification=verification,
        query_count=getattr(oracle, "query_count", 0) - start,
        notes=notes,
    )


@dataclass
class InvarianceReport:
    sym_deviation: float
    cell_deviation: float
    prefix_deviation: float
    common_profiles: int
    matched_cells: int
    matched_prefixes: int


def structure_invariance_check(oracle, B: BooleanStructure, B1: BooleanStructure,
                               tol: float = 1e-10) -> InvarianceReport:
    """Extract through two structures and compare what should agree.

    ``I_s`` is compared on common profiles; ``m`` on cells carrying the same
    projection; cumulative ``m([0, a))`` wherever ``B([0, a)) = B1([0, a))``.
    """
    est, est1 = extract_cell_measure(oracle, B), extract_cell_measure(oracle, B1)
    sym, sym1 = extract_symmetric(oracle, B, est.values), extract_symmetric(oracle, B1, est1.values)
    common = set(sym) & set(sym1)
    sym_dev = max((abs(sym[k] - sym1[k]) for k in common), default=0.0)
    cell_dev, matched = 0.0, 0
    for p, m in zip(B.projections, est.values):
        for p1, m1 in zip(B1.projections, est1.values):
            if p.allclose(p1, tol):
                cell_dev = max(cell_dev, abs(m - m1))
                matched += 1
    prefix_dev, prefixes = 0.0, 0
    n = B.equal_cell_count()
    for j in range(1, n + 1):
        A = IntervalSet.interval(0, Fraction(j, n))
        try:
            idx, idx1 = B.cell_indices(A), B1.cell_indices(A)
        except NotCellAligned:
            continue
        if B.projection_of(idx).allclose(B1.projection_of(idx1), tol):
            a = math.fsum(est.values[i] for i in idx)
            b = math.fsum(est1.values[i] for i in idx1)
            prefix_dev = max(prefix_dev, abs(a - b))
            prefixes += 1
    return InvarianceReport(sym_dev, cell_dev, prefix_dev, len(common), matched, prefixes)
