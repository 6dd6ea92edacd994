"""Reconstruction from (1,1)-smooth scans.

A smooth binary grid splits into (0,q)-invariant runs and (p,0)-invariant
runs, each residue class carrying only one kind. The decomposition of the scan
gives the row and column profiles, the invariant Step 1 turns each profile
into per-line entry counts, and a p×q template decides which residue classes
host which runs.
"""

from typing import Iterator, Optional, Sequence, Union

import numpy as np
from loguru import logger

from app.core.decompose import decompose
from app.core.grid import BinaryGrid, IntGrid
from app.core.instrumentation import OpCounter, tick
from app.core.invariant import rec_const_cols_step1, rec_const_rows_step1
from app.core.symbolic import SymbolicGrid, SymbolKind, WindowTemplate
from app.errors import InvalidInputError, NonSmoothScanError
from app.schemas import Infeasible, PartialFill, WindowSpec

ZERO, ONE, P, Q, ONE_P, ONE_Q = (
    SymbolKind.ZERO,
    SymbolKind.ONE,
    SymbolKind.P,
    SymbolKind.Q,
    SymbolKind.ONE_P,
    SymbolKind.ONE_Q,
)

_PLAIN_ORDER = (ZERO, ONE, P, Q)


def pent_class_max(pent: Sequence[int], period: int, bound: Optional[int] = None) -> tuple[int, ...]:
    """Largest entry count inside each residue class of ``pent``.

    >>> pent_class_max((0, 0, 2, 0, 1, 0, 0), 3)
    (0, 1, 2)
    """
    if period < 1:
        raise InvalidInputError(f"period must be positive, got {period}")
    limit = len(pent) if bound is None else bound
    values = list(pent[:limit])
    return tuple(max(values[r::period], default=0) for r in range(period))


def _check_template_vectors(pp: Sequence[int], pq: Sequence[int], window: WindowSpec) -> None:
    if len(pp) != window.p or len(pq) != window.q:
        raise InvalidInputError(f"class vectors of length {len(pp)}, {len(pq)} do not match window {window.p}x{window.q}")


def _vectors_fit(pp: Sequence[int], pq: Sequence[int], extra: int, window: WindowSpec) -> bool:
    return (
        extra >= 0
        and all(0 <= x <= window.q for x in pp)
        and all(0 <= x <= window.p for x in pq)
        and sum(pp) + sum(pq) + extra <= window.area
    )


def iter_window_templates(
    pp: Sequence[int], pq: Sequence[int], ones: int, window: WindowSpec
) -> Iterator[WindowTemplate]:
    """Every p×q template with ``pp[a]`` Q cells in row a, ``pq[b]`` P cells in
    column b and ``ones`` cells equal to 1, in backtracking order 0 < 1 < P < Q."""
    _check_template_vectors(pp, pq, window)
    if not _vectors_fit(pp, pq, ones, window):
        return
    p, q = window.p, window.q
    cells = p * q
    kinds = np.zeros((p, q), dtype=np.int8)
    q_used = [0] * p
    p_used = [0] * q
    demand = sum(pp) + sum(pq) + ones

    def place(cell: int, ones_used: int, placed: int) -> Iterator[WindowTemplate]:
        if cell == cells:
            if placed == demand:
                yield WindowTemplate(kinds.copy())
            return
        a, b = divmod(cell, q)
        for kind in _PLAIN_ORDER:
            if kind == ONE and ones_used >= ones:
                continue
            if kind == P and p_used[b] >= pq[b]:
                continue
            if kind == Q and q_used[a] >= pp[a]:
                continue
            kinds[a, b] = kind
            p_used[b] += kind == P
            q_used[a] += kind == Q
            now_placed = placed + (kind != ZERO)
            if (
                pp[a] - q_used[a] <= q - b - 1
                and pq[b] - p_used[b] <= p - a - 1
                and demand - now_placed <= cells - cell - 1
            ):
                yield from place(cell + 1, ones_used + (kind == ONE), now_placed)
            p_used[b] -= kind == P
            q_used[a] -= kind == Q
            kinds[a, b] = ZERO

    yield from place(0, 0, 0)


def find_window_template(
    pp: Sequence[int], pq: Sequence[int], ones: int, window: WindowSpec
) -> Optional[WindowTemplate]:
    return next(iter_window_templates(pp, pq, ones, window), None)


def iter_marker_templates(
    pp: Sequence[int], pq: Sequence[int], k_row: int, k_col: int, window: WindowSpec
) -> Iterator[WindowTemplate]:
    """Templates over {0, P, Q, 1P<i>, 1Q<j>} with k_col column markers and k_row row markers.

    All cells of one column marker share a column, all cells of one row marker
    share a row. New markers are introduced in scan order so relabellings are
    never produced twice; column markers are then renumbered by column.
    """
    _check_template_vectors(pp, pq, window)
    if k_row < 0 or k_col < 0 or not _vectors_fit(pp, pq, k_row + k_col, window):
        return
    p, q = window.p, window.q
    cells = p * q
    kinds = np.zeros((p, q), dtype=np.int8)
    indices = np.zeros((p, q), dtype=np.int64)
    q_used = [0] * p
    p_used = [0] * q
    p_marker_cols: list[int] = []
    p_marker_first_rows: list[int] = []
    q_marker_rows: list[int] = []
    runs_demand = sum(pp) + sum(pq)

    def options(a: int, b: int) -> list[tuple[SymbolKind, int]]:
        choices: list[tuple[SymbolKind, int]] = [(ZERO, 0)]
        if p_used[b] < pq[b]:
            choices.append((P, 0))
        if q_used[a] < pp[a]:
            choices.append((Q, 0))
        choices.extend((ONE_P, x + 1) for x, col in enumerate(p_marker_cols) if col == b)
        if len(p_marker_cols) < k_col:
            choices.append((ONE_P, len(p_marker_cols) + 1))
        choices.extend((ONE_Q, y + 1) for y, row in enumerate(q_marker_rows) if row == a)
        if len(q_marker_rows) < k_row:
            choices.append((ONE_Q, len(q_marker_rows) + 1))
        return choices

    def place(cell: int, runs_placed: int) -> Iterator[WindowTemplate]:
        if cell == cells:
            if len(p_marker_cols) == k_col and len(q_marker_rows) == k_row and runs_placed == runs_demand:
                yield _canonical_markers(kinds, indices, p_marker_cols, p_marker_first_rows)
            return
        a, b = divmod(cell, q)
        for kind, index in options(a, b):
            new_p = kind == ONE_P and index > len(p_marker_cols)
            new_q = kind == ONE_Q and index > len(q_marker_rows)
            kinds[a, b] = kind
            indices[a, b] = index
            p_used[b] += kind == P
            q_used[a] += kind == Q
            if new_p:
                p_marker_cols.append(b)
                p_marker_first_rows.append(a)
            if new_q:
                q_marker_rows.append(a)
            placed = runs_placed + (kind in (P, Q))
            missing = (runs_demand - placed) + (k_col - len(p_marker_cols)) + (k_row - len(q_marker_rows))
            if (
                pp[a] - q_used[a] <= q - b - 1
                and pq[b] - p_used[b] <= p - a - 1
                and missing <= cells - cell - 1
            ):
                yield from place(cell + 1, placed)
            if new_p:
                p_marker_cols.pop()
                p_marker_first_rows.pop()
            if new_q:
                q_marker_rows.pop()
            p_used[b] -= kind == P
            q_used[a] -= kind == Q
            kinds[a, b] = ZERO
            indices[a, b] = 0

    yield from place(0, 0)


def _canonical_markers(
    kinds: np.ndarray, indices: np.ndarray, marker_cols: list[int], first_rows: list[int]
) -> WindowTemplate:
    order = sorted(range(len(marker_cols)), key=lambda x: (marker_cols[x], first_rows[x]))
    rank = {old + 1: new + 1 for new, old in enumerate(order)}
    relabelled = indices.copy()
    mask = kinds == ONE_P
    relabelled[mask] = [rank[int(x)] for x in indices[mask]]
    return WindowTemplate(kinds.copy(), relabelled)


def _materialize(
    template: WindowTemplate,
    pent_row: Sequence[int],
    pent_col: Sequence[int],
    window: WindowSpec,
    shape: tuple[int, int],
    counter: Optional[OpCounter] = None,
) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Spend the per-row and per-column budgets on the template's runs and
    propagate every symbol along its invariance. None on a collision."""
    p, q = window.p, window.q
    m, n = shape
    tk, ti = template.kinds, template.indices
    kinds = np.zeros((m, n), dtype=np.int8)
    indices = np.zeros((m, n), dtype=np.int64)

    q_columns = [np.flatnonzero(tk[a] == Q) for a in range(p)]
    for i in range(m):
        columns = q_columns[i % p]
        if pent_row[i] > len(columns):
            return None
        for j in columns[: pent_row[i]]:
            kinds[i, j::q] = Q

    p_rows = [np.flatnonzero(tk[:, b] == P) for b in range(q)]
    for j in range(n):
        rows = p_rows[j % q]
        if pent_col[j] > len(rows):
            return None
        for a in rows[: pent_col[j]]:
            if kinds[a::p, j].any():
                return None
            kinds[a::p, j] = P

    for a, b in zip(*np.nonzero((tk == ONE) | (tk == ONE_P) | (tk == ONE_Q))):
        if kinds[a::p, b::q].any():
            return None
        kinds[a::p, b::q] = tk[a, b]
        indices[a::p, b::q] = ti[a, b]

    tick(counter, "cells", m * n)
    return kinds, indices


def _step1_pair(
    row_part: IntGrid, col_part: IntGrid, window: WindowSpec, counter: Optional[OpCounter]
) -> Union[tuple[PartialFill, PartialFill], Infeasible]:
    rows_fill = rec_const_rows_step1(row_part, window, counter)
    if isinstance(rows_fill, Infeasible):
        return rows_fill
    cols_fill = rec_const_cols_step1(col_part, window, counter)
    if isinstance(cols_fill, Infeasible):
        return cols_fill
    return rows_fill, cols_fill


def _luminosity_violation(scan: IntGrid, window: WindowSpec) -> Optional[Infeasible]:
    if scan.is_empty:
        raise InvalidInputError("cannot reconstruct from an empty scan")
    cells = scan.cells
    if cells.min() < 0 or cells.max() > window.area:
        return Infeasible(stage="luminosity", reason=f"scan cells must lie in [0, {window.area}]")
    return None


def rec_smooth(scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None) -> Union[BinaryGrid, Infeasible]:
    """One binary grid whose scan is the (1,1)-smooth ``scan``, or Infeasible."""
    violation = _luminosity_violation(scan, window)
    if violation is not None:
        return violation
    shape = (scan.rows + window.p - 1, scan.cols + window.q - 1)
    decompositions = decompose(scan, counter)

    for dec in decompositions:
        fills = _step1_pair(dec.row_part, dec.col_part, window, counter)
        if isinstance(fills, Infeasible):
            logger.debug(f"Smooth reconstruction t={dec.t}: {fills.reason}")
            continue
        rows_fill, cols_fill = fills
        pp = pent_class_max(rows_fill.pent, window.p)
        pq = pent_class_max(cols_fill.pent, window.q)
        ones = rows_fill.k_remaining + cols_fill.k_remaining
        for template in iter_window_templates(pp, pq, ones, window):
            planted = _materialize(template, rows_fill.pent, cols_fill.pent, window, shape, counter)
            if planted is None:
                logger.warning(f"Smooth reconstruction t={dec.t}: template collided during materialisation, trying the next one")
                continue
            return BinaryGrid((planted[0] != ZERO).astype(np.int64))

    return Infeasible(stage="template", reason=f"no window template for any of {len(decompositions)} decomposition(s)")


def iter_smooth_family(scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None) -> Iterator[SymbolicGrid]:
    """Lazy, deduplicated symbolic solutions over every decomposition and marker template."""
    if _luminosity_violation(scan, window) is not None:
        return
    shape = (scan.rows + window.p - 1, scan.cols + window.q - 1)
    seen: set[SymbolicGrid] = set()
    for dec in decompose(scan, counter):
        fills = _step1_pair(dec.row_part, dec.col_part, window, counter)
        if isinstance(fills, Infeasible):
            continue
        rows_fill, cols_fill = fills
        if rows_fill.k_remaining < 0 or cols_fill.k_remaining < 0:
            continue
        pp = pent_class_max(rows_fill.pent, window.p)
        pq = pent_class_max(cols_fill.pent, window.q)
        for template in iter_marker_templates(pp, pq, rows_fill.k_remaining, cols_fill.k_remaining, window):
            planted = _materialize(template, rows_fill.pent, cols_fill.pent, window, shape, counter)
            if planted is None:
                continue
            grid = SymbolicGrid(*planted)
            if grid in seen:
                continue
            seen.add(grid)
            yield grid


def rec_smooth_all(scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None) -> list[SymbolicGrid]:
    return list(iter_smooth_family(scan, window, counter))


class _AxisProfile:
    """Run bookkeeping along one axis of the grid.

    Line ``l`` of residue class ``c`` carries ``base[c] + offsets[l]`` runs;
    ``lower[c]`` keeps every line non-negative and ``upper[c][mask]`` is the
    largest base that fits when the class may use the other-axis residues in
    ``mask`` on every line.
    """

    def __init__(self, values: np.ndarray, period: int, length: int, free: np.ndarray) -> None:
        self.period = period
        offsets = np.zeros(length, dtype=np.int64)
        for i in range(len(values) - 1):
            offsets[i + period] = offsets[i] + values[i + 1] - values[i]
        self.offsets = offsets
        self.lines = [np.arange(c, length, period) for c in range(period)]
        self.lower = [int((-offsets[lines]).max()) for lines in self.lines]
        width = free.shape[1]
        self.free_masks = [int(x) for x in (free.astype(np.int64) * (1 << np.arange(width))).sum(axis=1)]
        self.upper = [
            [min((mask & self.free_masks[line]).bit_count() - int(offsets[line]) for line in lines) for mask in range(1 << width)]
            for lines in self.lines
        ]


def _column_masks(row_masks: Sequence[int], p: int, q: int) -> list[int]:
    """Residue rows left to column runs; rows without a decision count as available."""
    masks = []
    for b in range(q):
        mask = 0
        for a in range(p):
            if a >= len(row_masks) or not (row_masks[a] >> b) & 1:
                mask |= 1 << a
        masks.append(mask)
    return masks


def _choose_class_kinds(rows: _AxisProfile, cols: _AxisProfile, total: int) -> Optional[list[int]]:
    p, q = rows.period, cols.period
    if sum(rows.lower) + sum(cols.lower) > total:
        return None
    everything = (1 << q) - 1
    row_best = [rows.upper[a][everything] for a in range(p)]
    masks_by_size = sorted(range(1 << q), key=lambda x: (-x.bit_count(), x))

    def search(chosen: list[int], row_upper_sum: int) -> Optional[list[int]]:
        a = len(chosen)
        col_masks = _column_masks(chosen, p, q)
        col_upper = [cols.upper[b][col_masks[b]] for b in range(q)]
        if any(col_upper[b] < cols.lower[b] for b in range(q)):
            return None
        if row_upper_sum + sum(row_best[a:]) + sum(col_upper) < total:
            return None
        if a == p:
            return chosen
        for mask in masks_by_size:
            upper = rows.upper[a][mask]
            if upper < rows.lower[a]:
                continue
            found = search(chosen + [mask], row_upper_sum + upper)
            if found is not None:
                return found
        return None

    return search([], 0)


def _spread(lower: Sequence[int], upper: Sequence[int], amount: int) -> list[int]:
    counts = list(lower)
    extra = amount - sum(lower)
    for c in range(len(counts)):
        step = min(extra, upper[c] - lower[c])
        counts[c] += step
        extra -= step
    return counts


def complete_smooth(
    scan: IntGrid,
    window: WindowSpec,
    occupied: Optional[BinaryGrid] = None,
    counter: Optional[OpCounter] = None,
) -> Optional[BinaryGrid]:
    """``occupied`` plus a smooth binary D with scan(D) = ``scan`` avoiding its ones.

    Each residue class is given either row runs or column runs; the run counts
    then follow from the decomposition profiles. Returns None exactly when no
    such D exists.
    """
    if scan.is_empty or scan.cells.min() < 0:
        return None
    p, q = window.p, window.q
    m, n = scan.rows + p - 1, scan.cols + q - 1
    try:
        base = decompose(scan, counter)[0]
    except NonSmoothScanError:
        return None
    occ = np.zeros((m, n), dtype=np.int64) if occupied is None else occupied.cells
    if occ.shape != (m, n):
        raise InvalidInputError(f"occupied grid {occ.shape} does not match the {m}x{n} preimage")

    free_rows = np.array([[not occ[i, b::q].any() for b in range(q)] for i in range(m)], dtype=bool).reshape(m, q)
    free_cols = np.array([[not occ[a::p, j].any() for a in range(p)] for j in range(n)], dtype=bool).reshape(n, p)
    rows = _AxisProfile(base.row_part.cells[:, 0], p, m, free_rows)
    cols = _AxisProfile(base.col_part.cells[0, :], q, n, free_cols)
    tick(counter, "cells", 2 * m * n)
    total = int(scan.cells[0, 0])

    row_masks = _choose_class_kinds(rows, cols, total)
    if row_masks is None:
        return None
    col_masks = _column_masks(row_masks, p, q)
    row_upper = [rows.upper[a][row_masks[a]] for a in range(p)]
    col_upper = [cols.upper[b][col_masks[b]] for b in range(q)]
    row_total = max(sum(rows.lower), total - sum(col_upper))
    row_counts = _spread(rows.lower, row_upper, row_total)
    col_counts = _spread(cols.lower, col_upper, total - row_total)

    grid = occ.copy()
    for a in range(p):
        for line in rows.lines[a]:
            need = row_counts[a] + int(rows.offsets[line])
            slots = [b for b in range(q) if (row_masks[a] & rows.free_masks[line]) >> b & 1]
            for b in slots[:need]:
                grid[line, b::q] = 1
    for b in range(q):
        for line in cols.lines[b]:
            need = col_counts[b] + int(cols.offsets[line])
            slots = [a for a in range(p) if (col_masks[b] & cols.free_masks[line]) >> a & 1]
            for a in slots[:need]:
                grid[a::p, line] = 1
    tick(counter, "cells", m * n)
    return BinaryGrid(grid)
