from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from addinfo.borel import IntervalSet, MeasurablePartition, dyadic_cells
from addinfo.exceptions import (
    GridMismatch,
    IncompatibleStates,
    InvalidStructure,
    NoCommonRefinement,
    NotCellAligned,
    UnsplittableCell,
    WeightMismatch,
)
from addinfo.families import grouped_state
from addinfo.linalg import Projection, ProjectionPartition, coordinate_partition, make_state
from addinfo.structure import (
    BooleanStructure,
    chain_supports,
    connect_chain,
    permute_structure,
    rearrange_structure,
    refine,
    refine_to_level,
    spectral_structure,
    step_support,
    structure_through,
    uniform_structure,
)

RHO4 = make_state(["1/4"] * 4)


def test_structure_through_partition():
    rho = make_state(["1/2", "1/4", "1/8", "1/8"])
    B = structure_through(coordinate_partition(4), rho)
    assert [s.measure for s in B.sets] == [F(1, 2), F(1, 4), F(1, 8), F(1, 8)]
    assert B.evaluate(IntervalSet.interval(0, F(3, 4))) == Projection.from_support(4, [0, 1])
    assert B.evaluate(IntervalSet.full()) == Projection.identity(4)


def test_zero_weight_blocks_are_absorbed():
    rho = make_state(["0", "1/2", "1/2"])
    B = structure_through(coordinate_partition(3), rho)
    assert len(B.cells) == 2
    assert B.cells[0][1] == Projection.from_support(3, [0, 1])


def test_measure_compatibility_is_checked():
    rho = make_state(["1/2", "1/2"])
    cells = [(IntervalSet.interval(0, F(1, 4)), Projection.from_support(2, [0])),
             (IntervalSet.interval(F(1, 4), 1), Projection.from_support(2, [1]))]
    with pytest.raises(InvalidStructure):
        BooleanStructure(rho, cells)


def test_cell_alignment():
    B = structure_through(coordinate_partition(4), RHO4)
    assert B.cell_indices(IntervalSet.interval(0, F(1, 2))) == (0, 1)
    with pytest.raises(NotCellAligned):
        B.cell_indices(IntervalSet.interval(0, F(1, 8)))


def test_partition_image_probabilities():
    B = structure_through(coordinate_partition(4), RHO4)
    A = MeasurablePartition([IntervalSet.interval(0, F(3, 4)), IntervalSet.interval(F(3, 4), 1)])
    P = B.partition(A)
    assert isinstance(P, ProjectionPartition)
    assert P.probabilities(RHO4) == [F(3, 4), F(1, 4)]


def test_refine():
    rho = make_state(["1/2", "1/4", "1/4"])
    B = structure_through(ProjectionPartition([Projection.identity(3)]), rho)
    B2 = refine(B, 0, ["3/4", "1/4"])
    assert [s.measure for s in B2.sets] == [F(3, 4), F(1, 4)]
    assert B2.cells[0][1].rank == 2
    with pytest.raises(UnsplittableCell):
        refine(B, 0, ["1/3", "2/3"])
    with pytest.raises(WeightMismatch):
        refine(B, 0, ["1/2", "1/4"])


def test_refine_to_level_and_spectral():
    rho8 = make_state([F(1, 8)] * 8)
    B = refine_to_level(structure_through(ProjectionPartition([Projection.identity(8)]), rho8), 3)
    assert B.equal_cell_count() == 8 and all(p.rank == 1 for p in B.projections)
    with pytest.raises(UnsplittableCell):
        refine_to_level(structure_through(coordinate_partition(4), RHO4), 3)
    S = spectral_structure(grouped_state(8, 2, seed=0), 2)
    assert S.equal_cell_count() == 4
    # unequal group sizes make the ranks differ
    assert len({p.rank for p in S.projections}) > 1


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_uniform_structure_is_valid(seed):
    rho = make_state([F(1, 8)] * 8)
    B = uniform_structure(rho, 2, seed)
    assert B.validate() is B
    assert all(p.rank == 2 for p in B.projections)
    total = sum(p.matrix for p in B.projections)
    assert np.allclose(total, np.eye(8))


def test_uniform_structure_grid_mismatch():
    with pytest.raises(GridMismatch):
        uniform_structure(make_state([F(1, 6)] * 6), 2, 0)


def test_permute_structure():
    B = structure_through(coordinate_partition(4), RHO4)
    B1 = permute_structure(B, [1, 0, 3, 2], 2)
    assert B1.cells[0][0] == dyadic_cells(2)[1]
    assert B1.evaluate(dyadic_cells(2)[0]) == B.evaluate(dyadic_cells(2)[1])
    with pytest.raises(GridMismatch):
        permute_structure(B, [0, 0, 1, 2], 2)


def test_rearrange_keeps_projections():
    B = structure_through(coordinate_partition(4), RHO4)
    B1 = rearrange_structure(B, 2, seed=5)
    assert set(p.matrix.tobytes() for p in B.projections) == set(p.matrix.tobytes() for p in B1.projections)


def test_step_support():
    B = structure_through(coordinate_partition(4), RHO4)
    B1 = permute_structure(B, [1, 0, 2, 3], 2)
    assert step_support(B, B1) == IntervalSet.interval(0, F(1, 2))
    assert step_support(B, B).is_empty


@pytest.mark.parametrize("k", [2, 4, 8])
def test_connect_chain_generic_pairs(k):
    rho = make_state([F(1, 16)] * 16)
    rng = np.random.default_rng(k)
    B, B1 = uniform_structure(rho, 4, rng), uniform_structure(rho, 4, rng)
    chain = connect_chain(B, B1, k)
    assert chain[0] == B and chain[-1] == B1
    assert all(s.measure <= F(1, k) for s in chain_supports(chain))


def test_connect_chain_layout_pair_small_dimension():
    B = structure_through(coordinate_partition(4), RHO4)
    B1 = rearrange_structure(B, 2, seed=1)
    chain = connect_chain(B, B1, 4)
    assert chain[-1] == B1
    assert all(s.measure <= F(1, 4) for s in chain_supports(chain))


def test_connect_chain_rotation_too_coarse():
    # rank-one cells of weight 1/4 cannot be rotated within steps of measure 1/4
    B = uniform_structure(RHO4, 2, 0)
    B1 = uniform_structure(RHO4, 2, 1)
    with pytest.raises(NoCommonRefinement):
        connect_chain(B, B1, 4)


def test_connect_chain_state_mismatch():
    B = structure_through(coordinate_partition(2), make_state(["1/2", "1/2"]))
    B1 = structure_through(coordinate_partition(2), make_state(["3/4", "1/4"]))
    with pytest.raises(IncompatibleStates):
        connect_chain(B, B1, 2)
