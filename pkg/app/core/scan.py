from typing import Optional

import numpy as np

from app.core.grid import BinaryGrid, IntGrid
from app.core.instrumentation import OpCounter, tick
from app.errors import InvalidInputError, PreconditionError
from app.schemas import SubgridRef, WindowSpec

UNIT_WINDOW = WindowSpec(p=1, q=1)


def rectangular_scan(grid: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None) -> IntGrid:
    """Sum of every p×q window, indexed by its top-left cell.

    Uses a summed-area table, so the cost is linear in the grid size.
    """
    m, n = grid.shape
    window.check_fits(m, n)
    p, q = window.p, window.q
    table = np.zeros((m + 1, n + 1), dtype=np.int64)
    table[1:, 1:] = grid.cells.cumsum(axis=0).cumsum(axis=1)
    scan = table[p:, q:] - table[: m - p + 1, q:] - table[p:, : n - q + 1] + table[: m - p + 1, : n - q + 1]
    tick(counter, "scan_cells", m * n)
    return IntGrid(scan)


def chi(grid: IntGrid, window: WindowSpec) -> IntGrid:
    """Second difference M[i,j] + M[i+p,j+q] - M[i+p,j] - M[i,j+q], shape (m-p)×(n-q)."""
    m, n = grid.shape
    p, q = window.p, window.q
    if p > m or q > n:
        raise InvalidInputError(f"chi with window {p}x{q} needs at least that many rows and columns, got {m}x{n}")
    c = grid.cells
    return IntGrid(c[: m - p, : n - q] + c[p:, q:] - c[p:, : n - q] - c[: m - p, q:])


def is_smooth(grid: IntGrid, window: WindowSpec) -> bool:
    return chi(grid, window).is_zero()


def chi11_of_scan(scan: IntGrid) -> IntGrid:
    return chi(scan, UNIT_WINDOW)


def has_constant_rows(grid: IntGrid) -> bool:
    cells = grid.cells
    return bool((cells == cells[:, :1]).all())


def has_constant_columns(grid: IntGrid) -> bool:
    cells = grid.cells
    return bool((cells == cells[:1, :]).all())


def is_homogeneous(grid: IntGrid, window: WindowSpec) -> bool:
    scan = rectangular_scan(grid, window).cells
    return bool((scan == scan[0, 0]).all())


def is_invariant_at(grid: IntGrid, i: int, j: int, dr: int, dc: int) -> bool:
    """True when every in-range cell (i + α·dr, j + α·dc) equals grid[i, j]."""
    value = grid[i, j]
    if dr == 0 and dc == 0:
        return True
    m, n = grid.shape
    for direction in (1, -1):
        r, c = i + direction * dr, j + direction * dc
        while 1 <= r <= m and 1 <= c <= n:
            if grid[r, c] != value:
                return False
            r += direction * dr
            c += direction * dc
    return True


def classify_smooth_cells(grid: BinaryGrid, window: WindowSpec) -> tuple[BinaryGrid, BinaryGrid]:
    """Split a smooth grid into its (p,0)-invariant ones and the (0,q)-invariant rest.

    A one that is invariant both ways goes to the first grid.
    """
    if not is_smooth(grid, window):
        raise PreconditionError(f"grid is not ({window.p},{window.q})-smooth")
    cells = grid.cells
    vertical = np.zeros_like(cells)
    for a in range(window.p):
        block = cells[a :: window.p, :]
        constant = block.min(axis=0) == block.max(axis=0)
        vertical[a :: window.p, :] = block * constant
    return BinaryGrid(vertical), BinaryGrid(cells - vertical)


def extract_subgrid(grid: IntGrid, ref: SubgridRef) -> IntGrid:
    """Cells of ``grid`` whose 1-based indices are ≡ (a, b) modulo (p, q).

    ``grid`` may be the parent grid itself or its χ, which is p rows and q
    columns shorter.
    """
    return IntGrid(grid.cells[ref.a - 1 :: ref.window.p, ref.b - 1 :: ref.window.q])


def embed_subgrid(sub: np.ndarray, ref: SubgridRef) -> np.ndarray:
    full = np.zeros((ref.rows, ref.cols), dtype=np.int64)
    full[ref.row_slice, ref.col_slice] = sub
    return full
