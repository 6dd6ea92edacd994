import itertools

import numpy as np
import pytest

from app.core.decompose import decompose
from app.core.grid import IntGrid
from app.core.oracle import scan_of
from app.core.scan import has_constant_columns, has_constant_rows
from app.errors import InvalidInputError, NonSmoothScanError
from app.schemas import GridFamily, InstanceSpec
from tests.helpers import window


def test_small_example_has_two_decompositions():
    result = decompose(IntGrid([[1, 2], [2, 3]]))
    assert [d.t for d in result] == [0, 1]
    assert result[0].row_part == IntGrid([[0, 0], [1, 1]])
    assert result[0].col_part == IntGrid([[1, 2], [1, 2]])
    assert result[1].row_part == IntGrid([[1, 1], [2, 2]])
    assert result[1].col_part == IntGrid([[0, 1], [0, 1]])


def test_zero_scan_has_single_decomposition():
    (only,) = decompose(IntGrid(np.zeros((3, 2))))
    assert only.row_part.is_zero() and only.col_part.is_zero()


def test_constant_scan_lists_k_plus_one():
    assert len(decompose(IntGrid(np.full((2, 3), 4)))) == 5


def test_non_smooth_scan_raises():
    with pytest.raises(NonSmoothScanError):
        decompose(IntGrid([[1, 0], [0, 1]]))


def test_negative_cells_rejected():
    with pytest.raises(InvalidInputError):
        decompose(IntGrid([[-1]]))


def test_decompositions_of_smooth_scans():
    for seed_value in range(60):
        m, n = 4 + seed_value % 4, 5 + seed_value % 3
        p, q = 1 + seed_value % 3, 1 + (seed_value // 3) % 3
        spec = InstanceSpec(m=m, n=n, window=window(p, q), seed=seed_value, family=GridFamily.SMOOTH)
        scan = scan_of(spec)
        result = decompose(scan)
        assert len(result) == int(scan.cells.min()) + 1
        for d in result:
            assert d.row_part + d.col_part == scan
            assert has_constant_rows(d.row_part) and has_constant_columns(d.col_part)
            assert d.row_part.cells.min() >= 0 and d.col_part.cells.min() >= 0


def test_no_further_decompositions_by_brute_force():
    scan = IntGrid([[2, 3], [3, 4], [1, 2]])
    expected = {(d.row_part, d.col_part) for d in decompose(scan)}
    found = set()
    for rows in itertools.product(range(5), repeat=3):
        for cols in itertools.product(range(5), repeat=2):
            row_part = IntGrid(np.repeat(np.array(rows)[:, None], 2, axis=1))
            col_part = IntGrid(np.repeat(np.array(cols)[None, :], 3, axis=0))
            if row_part + col_part == scan:
                found.add((row_part, col_part))
    assert found == expected
