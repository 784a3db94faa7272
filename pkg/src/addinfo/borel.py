"""Exact set algebra on [0, 1).

Sets are finite unions of half-open intervals with rational endpoints.
No floating point is used anywhere in this module.
"""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import Iterable, Sequence

from ._validation import as_fraction
from .exceptions import NotNested, NotPartition, UnequalMeasure

__all__ = [
    "IntervalSet",
    "MeasurablePartition",
    "lebesgue",
    "union",
    "intersect",
    "complement",
    "symmdiff",
    "independent_partitions",
    "partition_product",
    "swap_transport",
    "dyadic_cells",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def _normalize(pairs) -> tuple:
    """Sort, drop empty pieces, merge overlapping and adjacent intervals."""
    items = sorted((a, b) for a, b in pairs if a < b)
    out: list = []
    for a, b in items:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return tuple(out)


class IntervalSet:
    """Finite union of half-open intervals ``[a, b)`` inside ``[0, 1]``.

    The representation is canonical (sorted, disjoint, non-adjacent), so
    equality and hashing are structural.
    """

    __slots__ = ("intervals", "_measure")

    def __init__(self, intervals: Iterable = ()):
        pairs = []
        for item in intervals:
            a, b = item
            a, b = as_fraction(a), as_fraction(b)
            if not (ZERO <= a <= ONE and ZERO <= b <= ONE):
                raise ValueError(f"interval [{a}, {b}) not inside [0, 1]")
            pairs.append((a, b))
        self.intervals = _normalize(pairs)
        self._measure = sum((b - a for a, b in self.intervals), ZERO)

    @classmethod
    def _raw(cls, intervals: tuple) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj.intervals = intervals
        obj._measure = sum((b - a for a, b in intervals), ZERO)
        return obj

    @classmethod
    def interval(cls, a, b) -> "IntervalSet":
        return cls([(a, b)])

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls._raw(((ZERO, ONE),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls._raw(())

    @property
    def measure(self) -> Fraction:
        return self._measure

    def is_empty(self) -> bool:
        return not self.intervals

    def __bool__(self):
        return bool(self.intervals)

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        if not self.intervals:
            return "IntervalSet(∅)"
        body = " ∪ ".join(f"[{a}, {b})" for a, b in self.intervals)
        return f"IntervalSet({body})"

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet._raw(_normalize(self.intervals + other.intervals))

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        xs, ys = self.intervals, other.intervals
        while i < len(xs) and j < len(ys):
            a = max(xs[i][0], ys[j][0])
            b = min(xs[i][1], ys[j][1])
            if a < b:
                out.append((a, b))
            if xs[i][1] < ys[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet._raw(tuple(out))

    def complement(self) -> "IntervalSet":
        out = []
        cursor = ZERO
        for a, b in self.intervals:
            if cursor < a:
                out.append((cursor, a))
            cursor = b
        if cursor < ONE:
            out.append((cursor, ONE))
        return IntervalSet._raw(tuple(out))

    __invert__ = complement

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return self & other.complement()

    def __xor__(self, other: "IntervalSet") -> "IntervalSet":
        return (self - other) | (other - self)

    def issubset(self, other: "IntervalSet") -> bool:
        return (self - other).is_empty()

    __le__ = issubset

    def isdisjoint(self, other: "IntervalSet") -> bool:
        return (self & other).is_empty()

    def contains_point(self, x) -> bool:
        x = as_fraction(x)
        starts = [a for a, _ in self.intervals]
        k = bisect.bisect_right(starts, x) - 1
        return k >= 0 and x < self.intervals[k][1]

    def shift(self, delta) -> "IntervalSet":
        """Translate by ``delta``; the result must stay inside [0, 1]."""
        delta = as_fraction(delta)
        return IntervalSet((a + delta, b + delta) for a, b in self.intervals)

    def split_by_measure(self, weights: Sequence) -> list:
        """Cut into consecutive pieces (left to right) of the given measures."""
        weights = [as_fraction(w) for w in weights]
        if sum(weights) != self.measure or any(w < 0 for w in weights):
            raise UnequalMeasure(f"weights sum to {sum(weights)}, set measure is {self.measure}")
        pieces = []
        queue = list(self.intervals)
        for w in weights:
            need = w
            chunk = []
            while need > 0:
                a, b = queue[0]
                take = min(need, b - a)
                chunk.append((a, a + take))
                need -= take
                if a + take == b:
                    queue.pop(0)
                else:
                    queue[0] = (a + take, b)
            pieces.append(IntervalSet._raw(_normalize(chunk)))
        return pieces

    def denominators(self) -> set:
        return {x.denominator for pair in self.intervals for x in pair}

    def to_json(self) -> list:
        return [[str(a), str(b)] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        return cls((a, b) for a, b in data)


def lebesgue(A: IntervalSet) -> Fraction:
    """Exact Lebesgue measure."""
    return A.measure


def union(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    return A | B


def intersect(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    return A & B


def complement(A: IntervalSet) -> IntervalSet:
    return A.complement()


def symmdiff(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    return A ^ B


class MeasurablePartition(Sequence):
    """Ordered tuple of pairwise disjoint interval sets covering [0, 1)."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Iterable, *, validate: bool = True):
        blocks = tuple(b if isinstance(b, IntervalSet) else IntervalSet(b) for b in blocks)
        if not blocks:
            raise NotPartition("a partition needs at least one block")
        if validate:
            total = sum((b.measure for b in blocks), ZERO)
            cover = IntervalSet.empty()
            for b in blocks:
                cover = cover | b
            # union = [0,1) together with total measure 1 forces pairwise disjointness
            if cover != IntervalSet.full() or total != ONE:
                raise NotPartition(f"blocks cover measure {cover.measure} with total {total}")
        self.blocks = blocks

    def __getitem__(self, idx):
        return self.blocks[idx]

    def __len__(self):
        return len(self.blocks)

    def __eq__(self, other):
        if not isinstance(other, MeasurablePartition):
            return NotImplemented
        return self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def measures(self) -> tuple:
        return tuple(b.measure for b in self.blocks)

    def __repr__(self):
        return f"MeasurablePartition({list(self.blocks)!r})"

    def to_json(self) -> list:
        return [b.to_json() for b in self.blocks]

    @classmethod
    def from_json(cls, data) -> "MeasurablePartition":
        return cls(IntervalSet.from_json(b) for b in data)


def independent_partitions(A: MeasurablePartition, B: MeasurablePartition) -> bool:
    """``lambda(A_i & B_j) == lambda(A_i) * lambda(B_j)`` for every pair, exactly."""
    return all((a & b).measure == a.measure * b.measure for a in A for b in B)


def partition_product(A: MeasurablePartition, B: MeasurablePartition) -> MeasurablePartition:
    """Blocks ``A_i & B_j`` in row-major order (empty blocks kept)."""
    return MeasurablePartition([a & b for a in A for b in B], validate=False)


def swap_transport(A: MeasurablePartition, V: IntervalSet, W: IntervalSet,
                   first: int = 0, second: int = 1) -> MeasurablePartition:
    """Exchange ``V`` (inside block ``first``) with ``W`` (inside block ``second``).

    Both affected blocks become ``A_i ^ V ^ W``; the others are untouched.
    Measure profile is preserved and the map is an involution.
    """
    a1, a2 = A[first], A[second]
    if not V.issubset(a1) or not W.issubset(a2):
        raise NotNested("V must lie in the first block and W in the second")
    if not V.isdisjoint(W):
        raise NotNested("V and W must be disjoint")
    if V.measure != W.measure:
        raise UnequalMeasure(f"lambda(V) = {V.measure} != lambda(W) = {W.measure}")
    vw = V | W
    blocks = list(A.blocks)
    blocks[first] = a1 ^ vw
    blocks[second] = a2 ^ vw
    return MeasurablePartition(blocks, validate=False)


def dyadic_cells(level: int) -> list:
    """The ``2**level`` consecutive cells ``[j/2^L, (j+1)/2^L)``."""
    n = 2 ** level
    return [IntervalSet._raw(((Fraction(j, n), Fraction(j + 1, n)),)) for j in range(n)]
