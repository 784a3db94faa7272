"""Finite boolean structures.

A boolean structure is stored as a finite cell assignment: disjoint interval
sets covering [0, 1), each carrying a projection whose state weight equals
the Lebesgue measure of the cell. Its value on any union of cells is the sum
of the cell projections; sets cutting through a cell are outside the
structure's algebra and must be refined first.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._validation import DEFAULT_TOL, as_fraction, check_rng
from .borel import IntervalSet, MeasurablePartition, dyadic_cells
from .exceptions import (
    DimensionMismatch,
    GridMismatch,
    IncompatibleStates,
    InvalidStructure,
    NoCommonRefinement,
    NotCellAligned,
    UnsplittableCell,
    WeightMismatch,
)
from .linalg import Projection, ProjectionPartition, State, haar_unitary

__all__ = [
    "BooleanStructure",
    "MEASURE_TOL",
    "structure_through",
    "refine",
    "refine_to_level",
    "evaluate",
    "permute_structure",
    "rearrange_structure",
    "uniform_structure",
    "spectral_structure",
    "connect_chain",
    "step_support",
    "chain_supports",
]

MEASURE_TOL = 1e-12
_ZERO_WEIGHT = 1e-14


class BooleanStructure:
    """Measure-compatible assignment of projections to interval cells."""

    __slots__ = ("rho", "cells", "_align_cache")

    def __init__(self, rho: State, cells: Sequence, *, validate: bool = True):
        self.rho = rho
        self.cells = tuple((s if isinstance(s, IntervalSet) else IntervalSet(s), p) for s, p in cells)
        self._align_cache: dict = {}
        if validate:
            self.validate()

    def validate(self, tol: float = DEFAULT_TOL) -> "BooleanStructure":
        if not self.cells:
            raise InvalidStructure("structure has no cells")
        MeasurablePartition(self.sets)
        for i, (s, _) in enumerate(self.cells):
            if s.measure == 0:
                raise InvalidStructure(f"cell {i} is empty")
        ProjectionPartition(self.projections, tol=tol)
        for i, (s, p) in enumerate(self.cells):
            if p.dim != self.rho.dim:
                raise DimensionMismatch(f"cell {i} projection has dimension {p.dim}")
            exact = self.rho.exact_prob(p)
            if exact is not None:
                if exact != s.measure:
                    raise InvalidStructure(f"cell {i}: rho(R) = {exact} but lambda = {s.measure}")
            elif abs(self.rho.prob(p) - float(s.measure)) > MEASURE_TOL:
                raise InvalidStructure(
                    f"cell {i}: rho(R) = {self.rho.prob(p)!r} but lambda = {float(s.measure)!r}"
                )
        return self

    @property
    def sets(self) -> tuple:
        return tuple(s for s, _ in self.cells)

    @property
    def projections(self) -> tuple:
        return tuple(p for _, p in self.cells)

    @property
    def dim(self) -> int:
        return self.rho.dim

    def __len__(self):
        return len(self.cells)

    def cell_indices(self, A: IntervalSet) -> tuple:
        """Indices of the cells making up ``A``; raises if ``A`` cuts a cell."""
        hit = self._align_cache.get(A)
        if hit is not None:
            return hit
        out = []
        for idx, (s, _) in enumerate(self.cells):
            inter = s & A
            if inter == s:
                out.append(idx)
            elif inter:
                raise NotCellAligned(f"set {A!r} cuts cell {idx} ({s!r})")
        covered = sum((self.cells[i][0].measure for i in out), Fraction(0))
        if covered != A.measure:
            raise NotCellAligned(f"set {A!r} is not a union of cells")
        result = tuple(out)
        self._align_cache[A] = result
        return result

    def evaluate(self, A: IntervalSet) -> Projection:
        idx = self.cell_indices(A)
        return self.projection_of(idx)

    def projection_of(self, indices) -> Projection:
        if not indices:
            return Projection.zero(self.dim)
        if len(indices) == 1:
            return self.cells[indices[0]][1]
        return Projection(sum(self.cells[i][1].matrix for i in indices), validate=False)

    def partition(self, A: MeasurablePartition) -> ProjectionPartition:
        """Image of a cell-aligned measurable partition."""
        return ProjectionPartition([self.evaluate(block) for block in A], validate=False)

    def cell_measures(self) -> tuple:
        return tuple(s.measure for s, _ in self.cells)

    def equal_cell_count(self) -> int | None:
        """``n`` when every cell has measure ``1/n``, else ``None``."""
        ms = set(self.cell_measures())
        if len(ms) == 1:
            m = ms.pop()
            if m.numerator == 1:
                return m.denominator
        return None

    def _label_map(self) -> dict:
        return {p.matrix.tobytes(): s for s, p in self.cells}

    def __eq__(self, other):
        if not isinstance(other, BooleanStructure):
            return NotImplemented
        if self.rho is not other.rho and not np.array_equal(self.rho.matrix, other.rho.matrix):
            return False
        return self._label_map() == other._label_map()

    __hash__ = None

    def __repr__(self):
        return f"BooleanStructure(dim={self.dim}, cells={len(self.cells)})"


def evaluate(B: BooleanStructure, A: IntervalSet) -> Projection:
    """``B(A)`` for a cell-aligned set ``A``."""
    return B.evaluate(A)


def _to_rational_cut(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10**15)


def structure_through(P: ProjectionPartition, rho: State) -> BooleanStructure:
    """Structure with consecutive cells ``[alpha_{i-1}, alpha_i)`` carrying ``P_i``.

    Blocks of zero state weight are merged into the preceding retained block
    (or the following one when they lead).
    """
    if P.dim != rho.dim:
        raise DimensionMismatch("partition and state dimensions differ")
    probs = P.probabilities(rho)
    groups: list = []
    pending_null: list = []
    for block, w in zip(P, probs):
        null = (w == 0) if isinstance(w, Fraction) else (w <= _ZERO_WEIGHT)
        if null:
            if groups:
                groups[-1][0].append(block)
            else:
                pending_null.append(block)
            continue
        groups.append([[*pending_null, block], w])
        pending_null = []
    exact = all(isinstance(w, Fraction) for _, w in groups)
    cells = []
    cum = Fraction(0) if exact else 0.0
    prev = Fraction(0)
    for n, (blocks, w) in enumerate(groups):
        cum = cum + w
        cut = Fraction(1) if n == len(groups) - 1 else (cum if exact else _to_rational_cut(cum))
        proj = blocks[0] if len(blocks) == 1 else Projection(sum(b.matrix for b in blocks),
                                                              validate=False)
        cells.append((IntervalSet.interval(prev, cut), proj))
        prev = cut
    return BooleanStructure(rho, cells)


def _compressed_spectrum(rho: State, R: Projection):
    """Eigen-weights and eigenvectors of ``rho`` compressed to the range of ``R``."""
    if R.support is not None and rho.weights is not None:
        idx = sorted(R.support)
        return [rho.weights[i] for i in idx], idx, True
    basis = R.range_basis()
    k = basis.conj().T @ rho.matrix @ basis
    vals, vecs = np.linalg.eigh((k + k.conj().T) / 2)
    order = np.argsort(-vals, kind="stable")
    return [float(v) for v in vals[order]], basis @ vecs[:, order], False


def _group_weights(weights, targets, exact: bool, tol: float = MEASURE_TOL):
    """Assign every weight to one target bin so that bins sum to their targets.

    Depth-first search, largest weights first; returns a list of index lists
    or ``None``. Zero weights join the first bin.
    """
    order = sorted(range(len(weights)), key=lambda i: -weights[i])
    positive = [i for i in order if weights[i] > (0 if exact else _ZERO_WEIGHT)]
    nulls = [i for i in order if i not in positive]
    remaining = list(targets)
    bins: list = [[] for _ in targets]

    def fits(w, r):
        return w <= r if exact else w <= r + tol

    def done(r):
        return r == 0 if exact else abs(r) <= tol

    def dfs(pos):
        if pos == len(positive):
            return all(done(r) for r in remaining) and all(bins)
        i = positive[pos]
        w = weights[i]
        tried = set()
        for b in range(len(remaining)):
            key = (remaining[b], bool(bins[b]))
            if key in tried or not fits(w, remaining[b]):
                continue
            tried.add(key)
            remaining[b] -= w
            bins[b].append(i)
            if dfs(pos + 1):
                return True
            bins[b].pop()
            remaining[b] += w
        return False

    if not dfs(0):
        return None
    if nulls:
        bins[0].extend(nulls)
    return [sorted(b) for b in bins]


def refine(B: BooleanStructure, cell_index: int, subweights: Sequence) -> BooleanStructure:
    """Split one cell into consecutive subcells of the given measures.

    Sub-projections are spanned by eigenvectors of the state compressed to the
    cell's range, so each requested weight must be a sum of eigen-weights.
    """
    subweights = [as_fraction(w) for w in subweights]
    cell_set, R = B.cells[cell_index]
    if any(w <= 0 for w in subweights) or sum(subweights) != cell_set.measure:
        raise WeightMismatch(f"subweights {[str(w) for w in subweights]} do not sum to {cell_set.measure}")
    if len(subweights) == 1:
        return B
    weights, vectors, exact = _compressed_spectrum(B.rho, R)
    targets = subweights if exact else [float(w) for w in subweights]
    groups = _group_weights(weights, targets, exact)
    if groups is None:
        raise UnsplittableCell(
            f"cell {cell_index}: weights {[str(w) for w in subweights]} are not sums of eigen-weights"
        )
    pieces = cell_set.split_by_measure(subweights)
    new = []
    for g, piece in zip(groups, pieces):
        if exact:
            proj = Projection.from_support(B.dim, [vectors[i] for i in g])
        else:
            v = vectors[:, g]
            m = v @ v.conj().T
            proj = Projection((m + m.conj().T) / 2, validate=False)
        new.append((piece, proj))
    cells = list(B.cells)
    cells[cell_index:cell_index + 1] = new
    return BooleanStructure(B.rho, cells)


def refine_to_level(B: BooleanStructure, level: int) -> BooleanStructure:
    """Refine every cell into pieces of measure ``2**-level``."""
    unit = Fraction(1, 2 ** level)
    out = B
    idx = 0
    while idx < len(out.cells):
        m = out.cells[idx][0].measure
        count = m / unit
        if count.denominator != 1:
            raise GridMismatch(f"cell {idx} has measure {m}, not a multiple of {unit}")
        out = refine(out, idx, [unit] * int(count))
        idx += int(count)
    return out


def permute_structure(B: BooleanStructure, sigma: Sequence[int], k: int) -> BooleanStructure:
    """Move the content of slot ``sigma[l]`` to slot ``l`` (``2k`` slots of measure ``1/2k``)."""
    n = 2 * k
    sigma = [int(s) for s in sigma]
    if sorted(sigma) != list(range(n)):
        raise GridMismatch(f"sigma must be a permutation of range({n})")
    slots = [IntervalSet.interval(Fraction(l, n), Fraction(l + 1, n)) for l in range(n)]
    inverse = {s: l for l, s in enumerate(sigma)}
    cells = []
    for idx, (s, p) in enumerate(B.cells):
        home = [l for l, slot in enumerate(slots) if s.issubset(slot)]
        if not home:
            raise GridMismatch(f"cell {idx} is not contained in a single slot of the {n}-grid")
        src = home[0]
        dst = inverse[src]
        cells.append((s.shift(Fraction(dst - src, n)), p))
    return BooleanStructure(B.rho, cells, validate=False)


def rearrange_structure(B: BooleanStructure, level: int, seed=None) -> BooleanStructure:
    """Same cell projections laid out on a random arrangement of ``2**level`` slots."""
    rng = check_rng(seed)
    n = 2 ** level
    counts = []
    for idx, m in enumerate(B.cell_measures()):
        c = m * n
        if c.denominator != 1:
            raise GridMismatch(f"cell {idx} measure {m} is not a multiple of 1/{n}")
        counts.append(int(c))
    order = rng.permutation(n)
    cells = []
    pos = 0
    for (_, p), c in zip(B.cells, counts):
        chosen = order[pos:pos + c]
        pos += c
        s = IntervalSet((Fraction(int(t), n), Fraction(int(t) + 1, n)) for t in chosen)
        cells.append((s, p))
    return BooleanStructure(B.rho, cells, validate=False)


def _equalize_diagonal(rho: State, V: np.ndarray) -> np.ndarray:
    """Rotate the columns of ``V`` pairwise until ``<v|rho|v>`` is constant."""
    d = V.shape[1]
    target = float(np.real(np.trace(rho.matrix))) / d
    A = V.conj().T @ rho.matrix @ V
    for _ in range(4 * d):
        diag = np.real(np.diag(A))
        dev = diag - target
        i, j = int(np.argmax(dev)), int(np.argmin(dev))
        if dev[i] <= 1e-16 and dev[j] >= -1e-16:
            break
        a, c, b = diag[i], diag[j], A[i, j]
        cos2 = min(max((target - c) / (a - c), 0.0), 1.0)
        ct, st = math.sqrt(cos2), math.sqrt(1.0 - cos2)
        phase = 1j * np.conj(b) / abs(b) if abs(b) > 0 else 1.0
        G = np.eye(d, dtype=complex)
        G[i, i], G[j, i] = ct, phase * st
        G[i, j], G[j, j] = -st, phase * ct
        V = V @ G
        A = G.conj().T @ A @ G
    return V


def uniform_structure(rho: State, level: int, seed=None) -> BooleanStructure:
    """Random structure with ``2**level`` equal cells of equal rank.

    The cell basis is a Haar-random basis rotated so every vector carries
    state weight ``1/dim``; cell ``j`` spans consecutive basis vectors.
    """
    rng = check_rng(seed)
    n = 2 ** level
    d = rho.dim
    if d % n:
        raise GridMismatch(f"dimension {d} is not divisible by {n} cells")
    r = d // n
    V = _equalize_diagonal(rho, haar_unitary(d, rng))
    cells = []
    for j, s in enumerate(dyadic_cells(level)):
        v = V[:, j * r:(j + 1) * r]
        m = v @ v.conj().T
        cells.append((s, Projection((m + m.conj().T) / 2, validate=False)))
    return BooleanStructure(rho, cells)


def spectral_structure(rho: State, level: int) -> BooleanStructure:
    """Equal cells at ``level`` built from grouped eigenvectors of the state."""
    base = BooleanStructure(rho, [(IntervalSet.full(), Projection.identity(rho.dim))])
    n = 2 ** level
    return refine(base, 0, [Fraction(1, n)] * n)


# ---------------------------------------------------------------------------
# connectedness chains


def step_support(Ba: BooleanStructure, Bb: BooleanStructure) -> IntervalSet:
    """Set of points whose cell projection differs between two structures."""
    other = Bb._label_map()
    support = IntervalSet.empty()
    for s, p in Ba.cells:
        s_other = other.get(p.matrix.tobytes())
        if s_other is None:
            support = support | s
        elif s_other != s:
            support = support | (s - s_other)
    mine = Ba._label_map()
    for s, p in Bb.cells:
        s_mine = mine.get(p.matrix.tobytes())
        if s_mine is None:
            support = support | s
        elif s_mine != s:
            support = support | (s - s_mine)
    return support


def chain_supports(chain: Sequence[BooleanStructure]) -> list:
    return [step_support(a, b) for a, b in zip(chain, chain[1:])]


def _components(B: BooleanStructure, B1: BooleanStructure, tol: float) -> list:
    """Groups of cells whose projections overlap across the two structures."""
    n, m = len(B.cells), len(B1.cells)
    parent = list(range(n + m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (_, p) in enumerate(B.cells):
        for j, (_, q) in enumerate(B1.cells):
            if float(np.max(np.abs(p.matrix @ q.matrix))) > tol:
                parent[find(i)] = find(n + j)
    groups: dict = {}
    for x in range(n + m):
        groups.setdefault(find(x), []).append(x)
    out = []
    for members in groups.values():
        a = sorted(x for x in members if x < n)
        b = sorted(x - n for x in members if x >= n)
        out.append((a, b))
    out.sort(key=lambda ab: ab[0][0] if ab[0] else n)
    return out


def _rank_one_vector(p: Projection) -> np.ndarray:
    return p.range_basis()[:, 0]


def _givens_plan(M: np.ndarray) -> list:
    """Rotations reducing the unitary ``M`` to a diagonal, as (i, j, G2) on rows."""
    M = M.copy()
    m = M.shape[0]
    plan = []
    for i in range(m - 1):
        for j in range(i + 1, m):
            c2 = M[j, i]
            if abs(c2) <= 1e-15:
                continue
            c1 = M[i, i]
            r = math.hypot(abs(c1), abs(c2))
            G2 = np.array([[np.conj(c1), np.conj(c2)], [-c2, c1]]) / r
            rows = G2 @ M[[i, j], :]
            M[i, :], M[j, :] = rows[0], rows[1]
            plan.append((i, j, G2))
    return plan


def connect_chain(B: BooleanStructure, B1: BooleanStructure, k: int,
                  tol: float = DEFAULT_TOL) -> list:
    """Chain ``B = B^0, ..., B^N = B1`` whose steps each differ on measure ``<= 1/k``.

    Cells whose projections overlap across the two structures form components.
    A component of total measure ``<= 1/k`` is re-decomposed in one step; a
    larger component of rank-one cells over a scalar compressed state is
    rotated pairwise (two cells per step). Afterwards both structures carry
    the same projections and the layouts are matched by transposing slots of
    a common grid, in lexicographic order. Consecutive steps are merged while
    their joint support stays within ``1/k``.
    """
    if B.dim != B1.dim or not np.allclose(B.rho.matrix, B1.rho.matrix, atol=tol, rtol=0):
        raise IncompatibleStates("structures are over different states")
    if k < 1:
        raise ValueError("k must be positive")
    limit = Fraction(1, k)
    if B == B1:
        return [B]
    rho = B.rho
    chain = [B]
    work = [[s, p] for s, p in B.cells]
    pos_of = {id(p): i for i, (_, p) in enumerate(B.cells)}

    def emit():
        chain.append(BooleanStructure(rho, [(s, p) for s, p in work], validate=False))

    for a_idx, b_idx in _components(B, B1, tol):
        a_cells = [B.cells[i] for i in a_idx]
        b_cells = [B1.cells[j] for j in b_idx]
        if len(a_idx) == 1 and len(b_idx) == 1 and a_cells[0][1] == b_cells[0][1]:
            work[pos_of[id(a_cells[0][1])]][1] = b_cells[0][1]
            continue
        region_measure = sum((s.measure for s, _ in a_cells), Fraction(0))
        if region_measure <= limit:
            region = IntervalSet.empty()
            for s, _ in a_cells:
                region = region | s
            pieces = region.split_by_measure([s.measure for s, _ in b_cells])
            positions = sorted(pos_of[id(p)] for _, p in a_cells)
            for pos, piece, (_, q) in zip(positions, pieces, b_cells):
                work[pos] = [piece, q]
            for pos in positions[len(b_cells):]:
                work[pos] = None
            work = [w for w in work if w is not None]
            pos_of = {id(p): i for i, (_, p) in enumerate(work)}
            emit()
            continue
        _rotate_component(rho, a_cells, b_cells, work, pos_of, limit, tol, emit)

    _transpose_layout(work, B1, limit, emit)

    merged = [chain[0]]
    pending = None
    for nxt in chain[1:]:
        if step_support(merged[-1], nxt).measure <= limit:
            pending = nxt
        else:
            merged.append(pending)
            pending = nxt
    if pending is not None:
        merged.append(pending)
    if merged[-1] != B1:
        raise NoCommonRefinement("chain construction did not reach the target structure")
    merged[-1] = B1
    return merged


def _rotate_component(rho, a_cells, b_cells, work, pos_of, limit, tol, emit):
    m = len(a_cells)
    measures = {s.measure for s, _ in a_cells} | {s.measure for s, _ in b_cells}
    if (len(b_cells) != m or len(measures) != 1
            or any(p.rank != 1 for _, p in a_cells) or any(q.rank != 1 for _, q in b_cells)):
        raise NoCommonRefinement(
            "component exceeds 1/k and is not made of equal rank-one cells; "
            "no finite small-step chain is available"
        )
    cell_measure = measures.pop()
    if 2 * cell_measure > limit:
        raise NoCommonRefinement(f"pairwise rotations need 2*{cell_measure} <= {limit}")
    basis = np.column_stack([_rank_one_vector(p) for _, p in a_cells])
    target = np.column_stack([_rank_one_vector(q) for _, q in b_cells])
    compressed = basis.conj().T @ rho.matrix @ basis
    scalar = np.trace(compressed).real / m
    if float(np.max(np.abs(compressed - scalar * np.eye(m)))) > tol:
        raise NoCommonRefinement("state is not scalar on the component; rotations break measure")
    plan = _givens_plan(basis.conj().T @ target)
    last_touch = {}
    for step, (i, j, _) in enumerate(plan):
        last_touch[i] = step
        last_touch[j] = step
    positions = [pos_of[id(p)] for _, p in a_cells]
    for step, (i, j, G2) in enumerate(plan):
        # new basis B' = B G^*, restricted to columns i, j
        new = basis[:, [i, j]] @ G2.conj().T
        basis[:, i], basis[:, j] = new[:, 0], new[:, 1]
        for col in (i, j):
            v = basis[:, col]
            if last_touch[col] == step:
                if abs(abs(np.vdot(target[:, col], v)) - 1) > 1e-9:
                    raise NoCommonRefinement("rotation plan failed to align a cell")
                proj = b_cells[col][1]
            else:
                mat = np.outer(v, v.conj())
                proj = Projection((mat + mat.conj().T) / 2, validate=False)
            work[positions[col]][1] = proj
        emit()
    untouched = [c for c in range(m) if c not in last_touch]
    for col in untouched:
        if work[positions[col]][1] is not b_cells[col][1]:
            if cell_measure > limit:
                raise NoCommonRefinement("cannot relabel a cell larger than 1/k")
            work[positions[col]][1] = b_cells[col][1]
            emit()


def _transpose_layout(work, B1: BooleanStructure, limit: Fraction, emit):
    label = {id(p): j for j, (_, p) in enumerate(B1.cells)}
    for _, p in work:
        if id(p) not in label:
            raise NoCommonRefinement("projections do not match the target after rotation")
    denoms = set()
    for s, _ in work:
        denoms |= s.denominators()
    for s, _ in B1.cells:
        denoms |= s.denominators()
    N = 1
    for d in denoms:
        N = N * d // math.gcd(N, d)
    mult = 1
    while Fraction(2, N * mult) > limit:
        mult += 1
    N *= mult

    def slots_of(s: IntervalSet):
        out = []
        for a, b in s.intervals:
            out.extend(range(int(a * N), int(b * N)))
        return out

    current = [None] * N
    target = [None] * N
    for w_idx, (s, p) in enumerate(work):
        for t in slots_of(s):
            current[t] = w_idx
    work_of_label = {label[id(p)]: w_idx for w_idx, (_, p) in enumerate(work)}
    for j, (s, _) in enumerate(B1.cells):
        for t in slots_of(s):
            target[t] = work_of_label[j]
    for t in range(N):
        if current[t] == target[t]:
            continue
        want = target[t]
        u = next(u for u in range(t + 1, N) if current[u] == want and target[u] != want)
        have = current[t]
        slot_t = IntervalSet.interval(Fraction(t, N), Fraction(t + 1, N))
        slot_u = IntervalSet.interval(Fraction(u, N), Fraction(u + 1, N))
        work[have][0] = (work[have][0] - slot_t) | slot_u
        work[want][0] = (work[want][0] - slot_u) | slot_t
        current[t], current[u] = want, have
        emit()
