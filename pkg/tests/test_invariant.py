import itertools

import numpy as np
import pytest

from app.core.grid import BinaryGrid, IntGrid
from app.core.instrumentation import OpCounter
from app.core.invariant import rec_const_cols, rec_const_cols_step1, rec_const_rows, rec_const_rows_step1
from app.core.oracle import generate, oracle_preimages
from app.core.scan import is_invariant_at, rectangular_scan
from app.errors import InvalidInputError
from app.schemas import GridFamily, Infeasible, InstanceSpec, PartialFill
from tests.helpers import window


def constant_rows(first_column, width=1) -> IntGrid:
    return IntGrid(np.repeat(np.array(first_column)[:, None], width, axis=1))


def is_row_invariant(g: BinaryGrid, q: int) -> bool:
    return all(is_invariant_at(g, i, j, 0, q) for i in range(1, g.rows + 1) for j in range(1, g.cols + 1))


def test_single_scan_row_places_nothing():
    fill = rec_const_rows_step1(IntGrid([[4, 4, 4]]), window(3, 2))
    assert fill.pent == (0, 0, 0)
    assert fill.k_remaining == 4


def test_step1_case_one_one():
    fill = rec_const_rows_step1(IntGrid([[0], [1]]), window(1, 1))
    assert fill.pent == (0, 1)
    assert fill.partial == BinaryGrid([[0], [1]])


def test_step1_lifts_class_on_deficit():
    fill = rec_const_rows_step1(IntGrid([[3], [1]]), window(1, 3))
    assert fill.pent == (2, 0)
    assert fill.k_remaining == 1
    result = rec_const_rows(IntGrid([[3], [1]]), window(1, 3))
    assert rectangular_scan(result, window(1, 3)) == IntGrid([[3], [1]])
    assert result.cells[0].sum() == 3


def test_step1_case_sequence_on_deltas_plus2_minus1_plus2_minus3():
    scan = constant_rows([5, 7, 6, 8, 5])
    w = window(3, 4)
    fill = rec_const_rows_step1(scan, w)
    assert fill.pent == (1, 1, 0, 3, 0, 2, 0)
    assert fill.k_remaining == 3
    result = rec_const_rows(scan, w)
    assert result.shape == (7, 4)
    assert rectangular_scan(result, w) == scan


def test_step1_difference_identity_on_partial(rng):
    w = window(2, 3)
    for s in range(30):
        g = generate(InstanceSpec(m=7, n=8, window=w, seed=s, family=GridFamily.ROW_INVARIANT))
        scan = rectangular_scan(g, w)
        fill = rec_const_rows_step1(scan, w)
        assert isinstance(fill, PartialFill)
        first = rectangular_scan(fill.partial, w).cells[:, 0]
        assert np.array_equal(np.diff(first), np.diff(scan.cells[:, 0]))
        assert np.array_equal(fill.partial.cells[:, :3].sum(axis=1), np.array(fill.pent))


def test_pent_is_minimal_profile_per_class():
    fill = rec_const_rows_step1(constant_rows([5, 7, 6, 8, 5]), window(3, 4))
    for c in range(3):
        assert min(fill.pent[c::3]) == 0


def test_full_luminosity_gives_all_ones():
    assert rec_const_rows(IntGrid([[6]]), window(2, 3)) == BinaryGrid.ones(2, 3)


def test_two_units_stack_in_first_column():
    result = rec_const_rows(IntGrid([[2]]), window(2, 2))
    assert result == BinaryGrid([[1, 0], [1, 0]])


def test_binary_cell_cannot_be_two():
    assert isinstance(rec_const_rows(IntGrid([[2], [1]]), window(1, 1)), Infeasible)


def test_overflowing_row_is_infeasible():
    result = rec_const_rows(IntGrid([[0], [3]]), window(1, 2))
    assert isinstance(result, Infeasible)
    assert result.stage == "step1"


def test_negative_residue_is_infeasible():
    result = rec_const_rows(IntGrid([[0], [1], [0]]), window(2, 1))
    assert isinstance(result, Infeasible)


def test_requires_constant_rows():
    with pytest.raises(InvalidInputError):
        rec_const_rows(IntGrid([[1, 2]]), window(1, 1))


def test_round_trip_row_invariant():
    for s in range(40):
        p, q = 1 + s % 3, 1 + (s // 3) % 4
        w = window(p, q)
        g = generate(InstanceSpec(m=6 + s % 3, n=9, window=w, seed=s, family=GridFamily.ROW_INVARIANT))
        scan = rectangular_scan(g, w)
        result = rec_const_rows(scan, w)
        assert isinstance(result, BinaryGrid)
        assert rectangular_scan(result, w) == scan
        assert is_row_invariant(result, q)


def test_cols_is_transpose_dual():
    w = window(2, 3)
    for s in range(20):
        g = generate(InstanceSpec(m=8, n=7, window=w, seed=s, family=GridFamily.COL_INVARIANT))
        scan = rectangular_scan(g, w)
        result = rec_const_cols(scan, w)
        assert result == rec_const_rows(scan.transpose(), w.transposed()).transpose()
        assert rectangular_scan(result, w) == scan
    assert rec_const_cols(IntGrid([[0]]), window(2, 2)) == BinaryGrid(np.zeros((2, 2)))
    assert len(rec_const_cols_step1(IntGrid([[1, 2, 1]]), window(1, 2)).pent) == 4


def test_operation_count_is_linear():
    w = window(2, 3)
    ratios = []
    for size in (16, 32, 64, 128):
        g = generate(InstanceSpec(m=size, n=size, window=w, seed=size, family=GridFamily.ROW_INVARIANT))
        counter = OpCounter()
        assert isinstance(rec_const_rows(rectangular_scan(g, w), w, counter), BinaryGrid)
        ratios.append(counter.total / (size * size))
    assert max(ratios) <= 2 * min(ratios)


@pytest.mark.slow
def test_agrees_with_oracle_and_pent_lower_bound():
    for p, q in itertools.product((1, 2), (1, 2, 3)):
        w = window(p, q)
        for m_scan in (1, 2, 3):
            for first in itertools.product(range(p * q + 1), repeat=m_scan):
                scan = constant_rows(first, width=2)
                preimages = oracle_preimages(scan, w)
                invariant = [g for g in preimages if is_row_invariant(g, q)]
                result = rec_const_rows(scan, w)
                if isinstance(result, Infeasible):
                    assert not invariant
                else:
                    assert rectangular_scan(result, w) == scan
                fill = rec_const_rows_step1(scan, w)
                if isinstance(fill, PartialFill):
                    for g in preimages:
                        counts = g.cells[:, :q].sum(axis=1)
                        assert all(counts[i] >= fill.pent[i] for i in range(len(fill.pent)))
