"""Ground truth for tests: exhaustive searches and seeded instance generators."""

from itertools import product
from typing import Optional

import numpy as np
from loguru import logger

from app.config import settings
from app.core.grid import BinaryGrid, IntGrid
from app.core.scan import embed_subgrid, is_smooth, rectangular_scan
from app.errors import InvalidInputError, SizeGuardError
from app.schemas import GridFamily, InstanceSpec, SubgridRef, Valuation, WindowSpec


def oracle_preimages(
    scan: IntGrid,
    window: WindowSpec,
    cap: Optional[int] = None,
    max_cells: Optional[int] = None,
) -> list[BinaryGrid]:
    """Every binary grid whose scan is ``scan`` (up to ``cap``), by exhaustive search.

    Columns are fixed left to right; a column pattern is kept only while every
    window it touches can still reach its target.
    """
    if scan.is_empty:
        raise InvalidInputError("scan must have at least one row and one column")
    m, n = scan.rows + window.p - 1, scan.cols + window.q - 1
    guard = min(max_cells or settings.ORACLE_MAX_CELLS, settings.ORACLE_HARD_CAP)
    if m * n > guard:
        raise SizeGuardError(f"{m}x{n} preimages exceed the exhaustive guard of {guard} cells")
    if m > n:
        found = oracle_preimages(scan.transpose(), window.transposed(), cap, max_cells)
        return sorted((grid.transpose() for grid in found), key=lambda g: g.cells.tobytes())

    p, q = window.p, window.q
    target = scan.cells
    patterns = np.array(list(product((0, 1), repeat=m)), dtype=np.int64)
    prefix = np.concatenate([np.zeros((len(patterns), 1), dtype=np.int64), patterns.cumsum(axis=1)], axis=1)
    window_sums = prefix[:, p:] - prefix[:, : m - p + 1]
    results: list[BinaryGrid] = []
    chosen: list[int] = []

    def descend(j: int, acc: np.ndarray) -> None:
        if cap is not None and len(results) >= cap:
            return
        if j == n:
            results.append(BinaryGrid(patterns[chosen].T))
            return
        lo, hi = max(0, j - q + 1), min(j, scan.cols - 1)
        touched = acc[None, :, lo : hi + 1] + window_sums[:, :, None]
        goal = target[None, :, lo : hi + 1]
        columns_left = (np.arange(lo, hi + 1) + q - 1 - j)[None, None, :]
        fits = ((touched <= goal) & (touched + p * columns_left >= goal)).all(axis=(1, 2))
        for index in np.flatnonzero(fits):
            nxt = acc.copy()
            nxt[:, lo : hi + 1] = touched[index]
            chosen.append(int(index))
            descend(j + 1, nxt)
            chosen.pop()

    descend(0, np.zeros_like(target))
    logger.debug(f"Oracle: {len(results)} preimage(s) of a {scan.rows}x{scan.cols} scan")
    return results


def oracle_minimal_valuations(target: IntGrid, ref: SubgridRef) -> list[Valuation]:
    """Binary subgrids matching ``target`` with no full row and no full column, by brute force."""
    r, c = ref.subgrid_shape
    if target.shape != (r - 1, c - 1):
        raise InvalidInputError(f"target {target.shape} does not fit a {r}x{c} subgrid")
    if r * c > settings.ORACLE_MAX_SUBGRID_AREA:
        raise SizeGuardError(f"subgrid area {r * c} exceeds the guard of {settings.ORACLE_MAX_SUBGRID_AREA}")
    codes = np.arange(1 << (r * c), dtype=np.int64)
    grids = ((codes[:, None] >> np.arange(r * c)) & 1).reshape(-1, r, c)
    chi = grids[:, :-1, :-1] + grids[:, 1:, 1:] - grids[:, 1:, :-1] - grids[:, :-1, 1:]
    matches = (chi == target.cells[None]).all(axis=(1, 2))
    full_row = grids.all(axis=2).any(axis=1)
    full_col = grids.all(axis=1).any(axis=1)
    keep = matches & ~full_row & ~full_col
    return [Valuation(grid=BinaryGrid(embed_subgrid(sub, ref)), support=ref) for sub in grids[keep]]


def generate(spec: InstanceSpec) -> BinaryGrid:
    """Seeded random grid of the requested family."""
    m, n, p, q = spec.m, spec.n, spec.window.p, spec.window.q
    spec.window.check_fits(m, n)
    rng = np.random.default_rng(spec.seed)

    def bits(shape: tuple[int, int]) -> np.ndarray:
        return (rng.random(shape) < spec.density).astype(np.int64)

    if spec.family == GridFamily.GENERAL:
        cells = bits((m, n))
    elif spec.family == GridFamily.ROW_INVARIANT:
        cells = bits((m, q))[:, np.arange(n) % q]
    elif spec.family == GridFamily.COL_INVARIANT:
        cells = bits((p, n))[np.arange(m) % p, :]
    elif spec.family == GridFamily.HOMOGENEOUS:
        cells = bits((p, q))[np.arange(m) % p][:, np.arange(n) % q]
    else:
        cells = _smooth_cells(m, n, window=spec.window, rng=rng, density=spec.density)

    grid = BinaryGrid(cells)
    if spec.family == GridFamily.SMOOTH and not is_smooth(grid, spec.window):
        raise RuntimeError("smooth generator produced a non-smooth grid")
    return grid


def _smooth_cells(m: int, n: int, window: WindowSpec, rng: np.random.Generator, density: float) -> np.ndarray:
    """Each residue class gets full subgrid rows or full subgrid columns, never both."""
    p, q = window.p, window.q
    cells = np.zeros((m, n), dtype=np.int64)
    for a in range(p):
        for b in range(q):
            rows = range(a, m, p)
            cols = range(b, n, q)
            if rng.random() < 0.5:
                for i in rows:
                    if rng.random() < density:
                        cells[i, b::q] = 1
            else:
                for j in cols:
                    if rng.random() < density:
                        cells[a::p, j] = 1
    return cells


def scan_of(spec: InstanceSpec) -> IntGrid:
    return rectangular_scan(generate(spec), spec.window)
