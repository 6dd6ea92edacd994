"""Minimal χ-valuations of one residue-class subgrid.

A valuation of a target T is a binary subgrid G with χ_{1,1}(G) = T. Clearing
full rows or full columns keeps χ unchanged, so the minimal valuations are
exactly those with neither. G is fixed by its first row's horizontal
differences: every lower row differs from it by the column sums of T above
it. The enumeration sweeps columns left to right choosing that first-row
difference, keeps each row's walk inside {0, 1} and leaves rows that never
move at zero.
"""

from enum import Enum
from itertools import product
from typing import Iterator, Optional, Sequence

import numpy as np
from loguru import logger

from app.core.grid import BinaryGrid, IntGrid
from app.core.instrumentation import OpCounter, tick
from app.core.scan import chi11_of_scan, embed_subgrid, rectangular_scan
from app.errors import GridShapeError, UnrealizableError
from app.schemas import FrontierStep, ReconstructionStats, SubgridRef, Valuation, WindowSpec

UNDETERMINED = -1


class RowKind(str, Enum):
    ZERO_ROW = "0-row"
    STAR1_ROW = "*1-row"
    STAR0_ROW = "*0-row"


def row_kind(sub: np.ndarray, i: int, j: int) -> RowKind:
    """Kind of subgrid row ``i`` seen from column ``j`` (1-based): all zero, or
    nonzero with a 1 or a 0 at column j+1."""
    row = sub[i - 1]
    if not row.any():
        return RowKind.ZERO_ROW
    return RowKind.STAR1_ROW if row[j] == 1 else RowKind.STAR0_ROW


def zero_rows(valuation: Valuation) -> frozenset[int]:
    sub = valuation.subgrid()
    return frozenset(i for i in range(1, sub.shape[0] + 1) if row_kind(sub, i, 0) == RowKind.ZERO_ROW)


def _valuation(sub: np.ndarray, ref: SubgridRef) -> Valuation:
    return Valuation(grid=BinaryGrid(embed_subgrid(sub, ref)), support=ref)


def _check_target(target: IntGrid, ref: SubgridRef) -> tuple[int, int]:
    r, c = ref.subgrid_shape
    if target.shape != (r - 1, c - 1):
        raise GridShapeError(f"target {target.shape} does not fit a {r}x{c} subgrid")
    return r, c


def is_valuation(grid: BinaryGrid, target: IntGrid, ref: SubgridRef) -> bool:
    _check_target(target, ref)
    try:
        valuation = Valuation(grid=grid, support=ref)
    except ValueError:
        return False
    return chi11_of_scan(IntGrid(valuation.subgrid())) == target


def reduce_valuation(valuation: Valuation) -> Valuation:
    """Clear full rows, then full columns, until none is left."""
    sub = valuation.subgrid().copy()
    while True:
        full_rows = np.flatnonzero(sub.all(axis=1))
        if full_rows.size:
            sub[full_rows[0], :] = 0
            continue
        full_cols = np.flatnonzero(sub.all(axis=0))
        if full_cols.size:
            sub[:, full_cols[0]] = 0
            continue
        break
    return _valuation(sub, valuation.support)


def _column_sums_above(target: IntGrid, r: int, c: int) -> np.ndarray:
    # column sums of the target above each row, one entry per column step
    above = np.zeros((r, c - 1), dtype=np.int64)
    if r > 1 and c > 1:
        above[1:] = target.cells.cumsum(axis=0)
    return above


def _extend(grid: np.ndarray, state: np.ndarray, j: int, above_j: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Children of one partial valuation across column step ``j`` (0-based), one per admissible first-row step."""
    children = []
    open_rows = state == UNDETERMINED
    for first_step in (0, 1, -1):
        steps = first_step + above_j
        if np.abs(steps).max() > 1:
            continue
        moved = state + steps
        if ((moved[~open_rows] < 0) | (moved[~open_rows] > 1)).any():
            continue
        turning = open_rows & (steps != 0)
        start = np.where(steps == 1, 0, 1)
        nxt_state = np.where(open_rows, UNDETERMINED, moved)
        nxt_state[turning] = start[turning] + steps[turning]
        nxt_grid = grid.copy()
        nxt_grid[turning, : j + 1] = start[turning][:, None]
        settled = nxt_state != UNDETERMINED
        nxt_grid[settled, j + 1] = nxt_state[settled]
        if settled.all() and (nxt_grid[:, : j + 2] == 1).all(axis=0).any():
            continue
        children.append((nxt_grid, nxt_state))
    return children


def _finish(grid: np.ndarray, state: np.ndarray) -> Optional[np.ndarray]:
    final = grid.copy()
    final[state == UNDETERMINED, :] = 0
    return None if final.all(axis=0).any() else final


def _initial(r: int, c: int) -> tuple[np.ndarray, np.ndarray]:
    return np.full((r, c), UNDETERMINED, dtype=np.int64), np.full(r, UNDETERMINED, dtype=np.int64)


def trace_minimal(
    target: IntGrid,
    ref: SubgridRef,
    counter: Optional[OpCounter] = None,
    trace: Optional[list[FrontierStep]] = None,
) -> list[Valuation]:
    """Minimal valuations grown one target column at a time.

    The frontier holds every partial valuation of the columns seen so far.
    Each column step extends a state by at most two first-row steps, and by
    at most one when none of its rows is still undetermined. States sharing
    an undetermined row share their whole history, so at most r of them
    carry one. ``trace`` receives a FrontierStep per column step.
    """
    r, c = _check_target(target, ref)
    above = _column_sums_above(target, r, c)
    frontier = [_initial(r, c)]
    for j in range(c - 1):
        step = FrontierStep(column=j + 1, forced=bool((np.abs(target.cells[:, j]) == 2).any()))
        seen: set[tuple[bytes, bytes]] = set()
        extended = []
        for grid, state in frontier:
            tick(counter, "valuation_nodes")
            kept = 0
            for child in _extend(grid, state, j, above[:, j]):
                key = (child[0].tobytes(), child[1].tobytes())
                if key in seen:
                    continue
                seen.add(key)
                extended.append(child)
                kept += 1
            step.children.append(kept)
            step.parent_zero_rows.append(int((state == UNDETERMINED).sum()))
        frontier = extended
        step.frontier_size = len(frontier)
        step.zero_row_states = sum(1 for _, state in frontier if (state == UNDETERMINED).any())
        if trace is not None:
            trace.append(step)
        if not frontier:
            logger.debug(f"Valuations of subgrid ({ref.a},{ref.b}): frontier empty after column {j + 1}")
            return []

    found = [final for final in (_finish(grid, state) for grid, state in frontier) if final is not None]
    return [_valuation(sub, ref) for sub in found]


def enumerate_minimal(target: IntGrid, ref: SubgridRef, counter: Optional[OpCounter] = None) -> list[Valuation]:
    """Every minimal valuation of ``target`` on subgrid ``ref``."""
    return trace_minimal(target, ref, counter)


def sweep_minimal(target: IntGrid, ref: SubgridRef, counter: Optional[OpCounter] = None) -> list[Valuation]:
    """Depth-first form of the same column walk, kept as a cross-check of the frontier."""
    r, c = _check_target(target, ref)
    above = _column_sums_above(target, r, c)
    found: list[np.ndarray] = []

    def descend(j: int, grid: np.ndarray, state: np.ndarray) -> None:
        tick(counter, "valuation_nodes")
        if j == c - 1:
            final = _finish(grid, state)
            if final is not None:
                found.append(final)
            return
        for nxt_grid, nxt_state in _extend(grid, state, j, above[:, j]):
            descend(j + 1, nxt_grid, nxt_state)

    descend(0, *_initial(r, c))
    return [_valuation(sub, ref) for sub in found]


def combine_valuations(per_subgrid: Sequence[Sequence[Valuation]]) -> list[BinaryGrid]:
    """Sum one valuation per subgrid, over the full product in lexicographic order."""
    for choices in per_subgrid:
        if not choices:
            raise UnrealizableError("a subgrid has no minimal valuation")
    return [BinaryGrid(sum(v.grid.cells for v in combo)) for combo in product(*per_subgrid)]


def iter_combinations(
    scan: IntGrid,
    window: WindowSpec,
    per_subgrid: Sequence[Sequence[Valuation]],
    stats: Optional[ReconstructionStats] = None,
) -> Iterator[tuple[int, ...]]:
    """Valuation index tuples in lexicographic order whose summed scan stays below ``scan``."""
    scans = [[rectangular_scan(v.grid, window).cells for v in choices] for choices in per_subgrid]
    limit = scan.cells
    chosen: list[int] = []

    def descend(level: int, acc: np.ndarray) -> Iterator[tuple[int, ...]]:
        if level == len(scans):
            yield tuple(chosen)
            return
        for index, contribution in enumerate(scans[level]):
            total = acc + contribution
            if (total > limit).any():
                if stats is not None:
                    stats.candidates_pruned += 1
                continue
            chosen.append(index)
            yield from descend(level + 1, total)
            chosen.pop()

    yield from descend(0, np.zeros_like(limit))
