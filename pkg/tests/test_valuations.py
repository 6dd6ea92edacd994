import numpy as np
import pytest

from app.core.grid import BinaryGrid, IntGrid
from app.core.oracle import oracle_minimal_valuations
from app.core.scan import chi, extract_subgrid
from app.core.valuations import (
    RowKind,
    combine_valuations,
    enumerate_minimal,
    is_valuation,
    reduce_valuation,
    row_kind,
    sweep_minimal,
    trace_minimal,
    zero_rows,
)
from app.errors import GridShapeError, UnrealizableError
from app.schemas import FrontierStep, SubgridRef, Valuation
from tests.helpers import random_binary, window


def whole(rows, cols):
    return SubgridRef(a=1, b=1, window=window(1, 1), rows=rows, cols=cols)


def as_set(valuations):
    return {v.grid for v in valuations}


def test_zero_target_has_only_the_zero_valuation():
    ref = whole(3, 4)
    (only,) = enumerate_minimal(IntGrid(np.zeros((2, 3))), ref)
    assert only.grid.is_zero()


def test_isolated_plus_one_has_two_block_valuations():
    ref = whole(3, 4)
    target = np.zeros((2, 3), dtype=np.int64)
    target[1, 0] = 1
    found = as_set(enumerate_minimal(IntGrid(target), ref))
    top_left = np.zeros((3, 4), dtype=np.int64)
    top_left[:2, :1] = 1
    bottom_right = np.zeros((3, 4), dtype=np.int64)
    bottom_right[2:, 1:] = 1
    assert found == {BinaryGrid(top_left), BinaryGrid(bottom_right)}


def test_plus_two_forces_the_diagonal():
    (only,) = enumerate_minimal(IntGrid([[2]]), whole(2, 2))
    assert only.grid == BinaryGrid([[1, 0], [0, 1]])
    (anti,) = enumerate_minimal(IntGrid([[-2]]), whole(2, 2))
    assert anti.grid == BinaryGrid([[0, 1], [1, 0]])


def test_out_of_range_target_is_unrealizable():
    assert enumerate_minimal(IntGrid([[3]]), whole(2, 2)) == []


def test_single_row_or_column_subgrid_only_zero():
    assert as_set(enumerate_minimal(IntGrid(np.zeros((0, 3))), whole(1, 4))) == {BinaryGrid(np.zeros((1, 4)))}
    assert as_set(enumerate_minimal(IntGrid(np.zeros((2, 0))), whole(3, 1))) == {BinaryGrid(np.zeros((3, 1)))}


def test_target_shape_is_checked():
    with pytest.raises(GridShapeError):
        enumerate_minimal(IntGrid([[0, 0]]), whole(2, 2))


def test_reduce_valuation():
    ref = whole(2, 3)
    full = Valuation(grid=BinaryGrid.ones(2, 3), support=ref)
    assert reduce_valuation(full).grid.is_zero()
    minimal = Valuation(grid=BinaryGrid([[1, 0, 0], [0, 0, 0]]), support=ref)
    assert reduce_valuation(minimal) == minimal
    with_full_column = Valuation(grid=BinaryGrid([[1, 1, 0], [0, 1, 0]]), support=ref)
    assert reduce_valuation(with_full_column).grid == BinaryGrid([[1, 0, 0], [0, 0, 0]])


def test_valuation_support_is_enforced():
    ref = SubgridRef(a=1, b=2, window=window(2, 2), rows=3, cols=4)
    outside = BinaryGrid([[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    with pytest.raises(ValueError):
        Valuation(grid=outside, support=ref)
    assert is_valuation(BinaryGrid([[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]), IntGrid([[1]]), ref)
    assert not is_valuation(outside, IntGrid([[1]]), ref)
    assert not is_valuation(BinaryGrid([[0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]), IntGrid([[1]]), ref)


def test_enumeration_matches_brute_force_on_scan_targets(rng):
    checked = 0
    for _ in range(120):
        p, q = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        m, n = int(rng.integers(p, p * 4 + 1)), int(rng.integers(q, q * 4 + 1))
        w = window(p, q)
        target_grid = chi(random_binary(rng, m, n), w)
        for a in range(1, p + 1):
            for b in range(1, q + 1):
                ref = SubgridRef(a=a, b=b, window=w, rows=m, cols=n)
                r, c = ref.subgrid_shape
                if r * c > 12:
                    continue
                target = extract_subgrid(target_grid, ref)
                found = enumerate_minimal(target, ref)
                assert as_set(found) == as_set(oracle_minimal_valuations(target, ref))
                assert len(as_set(found)) == len(found)
                checked += 1
    assert checked > 100


def test_enumeration_matches_brute_force_on_arbitrary_targets(rng):
    for _ in range(150):
        r, c = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        if r * c > 12:
            continue
        target = IntGrid(rng.choice([-2, -1, 0, 0, 0, 1, 2], size=(r - 1, c - 1)))
        ref = whole(r, c)
        assert as_set(enumerate_minimal(target, ref)) == as_set(oracle_minimal_valuations(target, ref))


def test_outputs_are_valid_minimal_and_share_no_zero_row(rng):
    for _ in range(60):
        m, n = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        ref = whole(m, n)
        target = chi(random_binary(rng, m, n, density=0.4), window(1, 1))
        found = enumerate_minimal(target, ref)
        assert found
        for v in found:
            assert is_valuation(v.grid, target, ref)
            assert reduce_valuation(v) == v
        for x in range(len(found)):
            for y in range(x + 1, len(found)):
                assert not zero_rows(found[x]) & zero_rows(found[y])


def test_row_kinds():
    sub = np.array([[0, 0, 0], [1, 1, 0], [1, 0, 1]])
    assert row_kind(sub, 1, 1) == RowKind.ZERO_ROW
    assert row_kind(sub, 2, 1) == RowKind.STAR1_ROW
    assert row_kind(sub, 3, 1) == RowKind.STAR0_ROW


def test_combine_valuations_products():
    w = window(1, 2)
    left = SubgridRef(a=1, b=1, window=w, rows=3, cols=4)
    right = SubgridRef(a=1, b=2, window=w, rows=3, cols=4)
    left_choices = enumerate_minimal(IntGrid([[1], [0]]), left)
    right_choices = enumerate_minimal(IntGrid([[0], [0]]), right) * 3
    assert len(left_choices) == 2
    combined = combine_valuations([left_choices, right_choices])
    assert len(combined) == 6
    for g in combined:
        assert extract_subgrid(chi(g, w), left) == IntGrid([[1], [0]])
    with pytest.raises(UnrealizableError):
        combine_valuations([left_choices, []])


def test_all_zero_sequences_combine_to_zero():
    w = window(2, 2)
    per = [
        enumerate_minimal(IntGrid(np.zeros((1, 1))), SubgridRef(a=a, b=b, window=w, rows=4, cols=4))
        for a in (1, 2)
        for b in (1, 2)
    ]
    (only,) = combine_valuations(per)
    assert only.is_zero()


def frontier_targets(rng, count):
    for k in range(count):
        r, c = int(rng.integers(2, 11)), int(rng.integers(2, 11))
        if k % 2:
            target = IntGrid(rng.choice([-1, 0, 0, 0, 0, 1], size=(r - 1, c - 1)))
        else:
            target = chi(random_binary(rng, r, c, density=0.2), window(1, 1))
        yield target, whole(r, c)


def test_frontier_trace_of_an_isolated_one():
    trace = []
    found = trace_minimal(IntGrid([[1]]), whole(2, 2), trace=trace)
    assert as_set(found) == {BinaryGrid([[0, 0], [0, 1]]), BinaryGrid([[1, 0], [0, 0]])}
    assert trace == [
        FrontierStep(column=1, forced=False, children=[2], parent_zero_rows=[2], frontier_size=2, zero_row_states=2)
    ]


def test_frontier_matches_depth_first_sweep(rng):
    for target, ref in frontier_targets(rng, 200):
        assert [v.grid for v in enumerate_minimal(target, ref)] == [v.grid for v in sweep_minimal(target, ref)]


def test_frontier_extension_bounds(rng):
    widest = 0
    for target, ref in frontier_targets(rng, 200):
        trace = []
        trace_minimal(target, ref, trace=trace)
        for step in trace:
            for kept, open_rows in zip(step.children, step.parent_zero_rows):
                assert kept <= 2
                if open_rows == 0:
                    assert kept <= 1
                if step.forced:
                    assert kept <= 1
                widest = max(widest, kept)
    assert widest == 2


def test_frontier_size_bounds(rng):
    for target, ref in frontier_targets(rng, 200):
        r, _ = ref.subgrid_shape
        trace = []
        trace_minimal(target, ref, trace=trace)
        for step in trace:
            assert step.zero_row_states <= r
            assert step.frontier_size <= r * (2 * step.column + 1)


def test_empty_frontier_stops_early():
    trace = []
    assert trace_minimal(IntGrid([[3, 0, 0]]), whole(2, 4), trace=trace) == []
    assert len(trace) == 1 and trace[0].frontier_size == 0
