"""Reconstruction from scans with constant rows (or, dually, constant columns).

A scan with constant rows comes from a (0,q)-invariant grid. Step 1 walks the
first scan column top to bottom and places the fewest row entries that explain
each consecutive difference. Step 2 spends the remaining units on whole
residue-class columns of the top-left p×q window. Step 3 repeats the first q
columns across the grid.
"""

from typing import Optional, Union

import numpy as np
from loguru import logger

from app.core.grid import BinaryGrid, IntGrid
from app.core.instrumentation import OpCounter, tick
from app.core.scan import has_constant_columns, has_constant_rows
from app.errors import InvalidInputError
from app.schemas import Infeasible, PartialFill, WindowSpec


def rec_const_rows_step1(
    scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None
) -> Union[PartialFill, Infeasible]:
    if scan.is_empty:
        raise InvalidInputError("cannot reconstruct from an empty scan")
    if not has_constant_rows(scan):
        raise InvalidInputError("scan rows must be constant")
    p, q = window.p, window.q
    m_scan, n_scan = scan.shape
    m, n = m_scan + p - 1, n_scan + q - 1
    first = scan.cells[:, 0]
    pent = [0] * m
    partial = np.zeros((m, n), dtype=np.int64)

    for i in range(m_scan - 1):
        delta = int(first[i + 1] - first[i])
        if delta >= 0 or pent[i] >= -delta:
            target = pent[i] + delta
            if target > q:
                return Infeasible(stage="step1", reason=f"row {i + p + 1} needs {target} entries but a window row holds {q}")
            partial[i + p, :target] = 1
            pent[i + p] = target
            tick(counter, "cells", target)
        else:
            # lift the whole residue class up to row i so row i+p can stay empty
            deficit = -delta - pent[i]
            for row in range(i % p, i + 1, p):
                start = pent[row]
                pent[row] = start + deficit
                if pent[row] > q:
                    return Infeasible(stage="step1", reason=f"row {row + 1} needs {pent[row]} entries but a window row holds {q}")
                partial[row, start : pent[row]] = 1
                tick(counter, "cells", deficit)

    k_remaining = int(first[0]) - sum(pent[:p])
    return PartialFill(pent=tuple(pent), k_remaining=k_remaining, partial=BinaryGrid(partial))


def rec_const_cols_step1(
    scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None
) -> Union[PartialFill, Infeasible]:
    if not has_constant_columns(scan):
        raise InvalidInputError("scan columns must be constant")
    result = rec_const_rows_step1(scan.transpose(), window.transposed(), counter)
    if isinstance(result, Infeasible):
        return result
    return PartialFill(pent=result.pent, k_remaining=result.k_remaining, partial=result.partial.transpose())


def rec_const_rows(
    scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None
) -> Union[BinaryGrid, Infeasible]:
    """A (0,q)-invariant binary grid whose scan is ``scan``, or Infeasible."""
    fill = rec_const_rows_step1(scan, window, counter)
    if isinstance(fill, Infeasible):
        logger.debug(f"Row-invariant fill: {fill.reason}")
        return fill
    if fill.k_remaining < 0:
        return Infeasible(stage="step2", reason=f"first window already holds {-fill.k_remaining} more than the scan allows")

    p, q = window.p, window.q
    grid = fill.partial.cells.copy()
    for placed in range(fill.k_remaining):
        slot = _first_free_class_column(grid, p, q)
        if slot is None:
            return Infeasible(stage="step2", reason=f"no free residue column for unit {placed + 1} of {fill.k_remaining}")
        a, j = slot
        grid[a::p, j] = 1
        tick(counter, "cells", len(range(a, grid.shape[0], p)))

    # (0,q)-invariance: every column repeats its residue among the first q
    n = grid.shape[1]
    grid = grid[:, np.arange(n) % q]
    tick(counter, "cells", grid.size)
    return BinaryGrid(grid)


def _first_free_class_column(grid: np.ndarray, p: int, q: int) -> Optional[tuple[int, int]]:
    for j in range(q):
        for a in range(p):
            if not grid[a::p, j].any():
                return a, j
    return None


def rec_const_cols(
    scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None
) -> Union[BinaryGrid, Infeasible]:
    if not has_constant_columns(scan):
        raise InvalidInputError("scan columns must be constant")
    result = rec_const_rows(scan.transpose(), window.transposed(), counter)
    if isinstance(result, Infeasible):
        return result
    return result.transpose()
