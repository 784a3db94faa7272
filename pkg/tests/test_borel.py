from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from addinfo.borel import (
    IntervalSet,
    MeasurablePartition,
    complement,
    dyadic_cells,
    independent_partitions,
    lebesgue,
    partition_product,
    swap_transport,
    symmdiff,
)
from addinfo.exceptions import NotPartition, UnequalMeasure

dyadic = st.integers(0, 16).map(lambda i: F(i, 16))


@st.composite
def interval_sets(draw):
    out = IntervalSet.empty()
    for _ in range(draw(st.integers(0, 4))):
        a, b = sorted((draw(dyadic), draw(dyadic)))
        out = out | IntervalSet.interval(a, b)
    return out


def test_basic_measure():
    A = IntervalSet.interval(0, F(1, 2)) | IntervalSet.interval(F(3, 4), 1)
    assert A.measure == F(3, 4)
    assert lebesgue(complement(A)) == F(1, 4)
    assert A.contains_point(F(1, 4)) and not A.contains_point(F(1, 2))


def test_adjacent_intervals_merge():
    A = IntervalSet.interval(0, F(1, 4)) | IntervalSet.interval(F(1, 4), F(1, 2))
    assert A == IntervalSet.interval(0, F(1, 2))
    assert len(A.to_json()) == 1


def test_json_round_trip():
    A = IntervalSet.interval(F(1, 3), F(1, 2)) | IntervalSet.interval(F(2, 3), 1)
    assert IntervalSet.from_json(A.to_json()) == A


@given(interval_sets(), interval_sets())
def test_inclusion_exclusion(A, B):
    assert (A | B).measure + (A & B).measure == A.measure + B.measure


@given(interval_sets(), interval_sets())
def test_symmdiff_measure(A, B):
    assert symmdiff(A, B).measure == (A - B).measure + (B - A).measure
    assert symmdiff(A, B) == (A | B) - (A & B)


@given(interval_sets())
def test_complement_involution(A):
    assert ~~A == A
    assert (A | ~A) == IntervalSet.full()
    assert A.isdisjoint(~A)


def test_split_by_measure():
    A = IntervalSet.interval(0, F(1, 4)) | IntervalSet.interval(F(1, 2), F(3, 4))
    pieces = A.split_by_measure([F(1, 8), F(3, 8)])
    assert [p.measure for p in pieces] == [F(1, 8), F(3, 8)]
    assert pieces[0] | pieces[1] == A


def test_partition_validation():
    with pytest.raises(NotPartition):
        MeasurablePartition([IntervalSet.interval(0, F(1, 2)), IntervalSet.interval(F(1, 4), 1)])
    with pytest.raises(NotPartition):
        MeasurablePartition([IntervalSet.interval(0, F(1, 2))])


def test_independent_product():
    halves = MeasurablePartition([IntervalSet.interval(0, F(1, 2)), IntervalSet.interval(F(1, 2), 1)])
    alt = MeasurablePartition([
        IntervalSet.interval(0, F(1, 4)) | IntervalSet.interval(F(1, 2), F(3, 4)),
        IntervalSet.interval(F(1, 4), F(1, 2)) | IntervalSet.interval(F(3, 4), 1),
    ])
    assert independent_partitions(halves, alt)
    assert not independent_partitions(halves, halves)
    prod = partition_product(halves, alt)
    assert all(m == F(1, 4) for m in prod.measures())


def test_swap_transport_exchanges_pieces():
    cells = dyadic_cells(2)
    A = MeasurablePartition([cells[0], cells[1] | cells[2], cells[3]])
    T = swap_transport(A, cells[0], cells[1])
    assert T.measures() == A.measures()
    assert T[0] == cells[1] and T[1] == cells[0] | cells[2]


def test_swap_transport_needs_equal_measure():
    cells = dyadic_cells(2)
    A = MeasurablePartition([cells[0], cells[1] | cells[2], cells[3]])
    with pytest.raises(UnequalMeasure):
        swap_transport(A, cells[0], cells[1] | cells[2])


def test_dyadic_cells():
    cells = dyadic_cells(3)
    assert len(cells) == 8 and all(c.measure == F(1, 8) for c in cells)
