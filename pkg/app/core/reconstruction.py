"""General reconstruction of a binary grid from its rectangular scan.

The χ of the scan fixes, class by class, which minimal valuations the grid
can contain. Every admissible combination leaves a (1,1)-smooth residual scan
that a smooth grid avoiding the combination's ones has to explain.
"""

from typing import Optional

import numpy as np
from loguru import logger

from app.config import settings
from app.core.grid import BinaryGrid, IntGrid
from app.core.instrumentation import OpCounter, tick
from app.core.scan import chi11_of_scan, extract_subgrid, rectangular_scan
from app.core.smooth import complete_smooth, iter_smooth_family
from app.core.symbolic import SymbolicGrid, SymbolKind
from app.core.valuations import enumerate_minimal, iter_combinations
from app.errors import ConsistencyError, InvalidInputError
from app.schemas import ReconstructionOutcome, ReconstructionStats, SubgridRef, Valuation, WindowSpec


def verify(scan: IntGrid, grid: BinaryGrid, window: WindowSpec) -> bool:
    if grid.rows != scan.rows + window.p - 1 or grid.cols != scan.cols + window.q - 1:
        return False
    return rectangular_scan(grid, window) == scan


def merge_symbolic(base: BinaryGrid, symbolic: SymbolicGrid, window: WindowSpec) -> Optional[BinaryGrid]:
    """Lay a symbolic smooth grid over ``base``, choosing a free class for every marker.

    Plain symbols must land on zeros. A column marker needs, in each column it
    occupies, one residue class whose cells in that column are all free; a
    row marker likewise along rows. Returns None when some marker has no free
    class or a plain symbol hits a one.
    """
    if base.shape != symbolic.shape:
        raise InvalidInputError(f"base {base.shape} and symbolic grid {symbolic.shape} differ in shape")
    p, q = window.p, window.q
    grid = base.cells.copy()
    kinds = symbolic.kinds.copy()
    indices = symbolic.indices
    m, n = grid.shape

    for i, j in zip(*np.nonzero(kinds)):
        kind = kinds[i, j]
        if kind == SymbolKind.ZERO:
            continue  # cleared by an earlier marker choice
        if kind in (SymbolKind.ONE, SymbolKind.P, SymbolKind.Q):
            if grid[i, j]:
                return None
            grid[i, j] = 1
        elif kind == SymbolKind.ONE_P:
            in_column = (kinds[:, j] == SymbolKind.ONE_P) & (indices[:, j] == indices[i, j])
            orbit = np.zeros(m, dtype=bool)
            orbit[i % p :: p] = True
            if not grid[orbit, j].any():
                grid[orbit, j] = 1
                kinds[in_column, j] = SymbolKind.ZERO
            else:
                kinds[in_column & orbit, j] = SymbolKind.ZERO
                if not (in_column & ~orbit).any():
                    return None
        elif kind == SymbolKind.ONE_Q:
            in_row = (kinds[i, :] == SymbolKind.ONE_Q) & (indices[i, :] == indices[i, j])
            orbit = np.zeros(n, dtype=bool)
            orbit[j % q :: q] = True
            if not grid[i, orbit].any():
                grid[i, orbit] = 1
                kinds[i, in_row] = SymbolKind.ZERO
            else:
                kinds[i, in_row & orbit] = SymbolKind.ZERO
                if not (in_row & ~orbit).any():
                    return None
    return BinaryGrid(grid)


def _validate_scan(scan: IntGrid, window: WindowSpec) -> None:
    if scan.is_empty:
        raise InvalidInputError("scan must have at least one row and one column")
    if scan.cells.min() < 0 or scan.cells.max() > window.area:
        raise InvalidInputError(f"scan cells must lie in [0, {window.area}] for a {window.p}x{window.q} window")


def minimal_valuations_per_subgrid(
    scan: IntGrid, window: WindowSpec, counter: Optional[OpCounter] = None
) -> list[tuple[SubgridRef, list[Valuation]]]:
    """Minimal valuations of every residue class, in (a, b) order."""
    m, n = scan.rows + window.p - 1, scan.cols + window.q - 1
    target = chi11_of_scan(scan)
    result = []
    for a in range(1, window.p + 1):
        for b in range(1, window.q + 1):
            ref = SubgridRef(a=a, b=b, window=window, rows=m, cols=n)
            result.append((ref, enumerate_minimal(extract_subgrid(target, ref), ref, counter)))
    return result


def _merge_family(
    scan: IntGrid,
    base: BinaryGrid,
    residual: IntGrid,
    window: WindowSpec,
    stats: ReconstructionStats,
    counter: Optional[OpCounter],
) -> Optional[BinaryGrid]:
    """First symbolic smooth grid of ``residual`` that merges with ``base`` into a preimage."""
    limit = settings.SYMBOLIC_MERGE_LIMIT
    for index, symbolic in enumerate(iter_smooth_family(residual, window, counter)):
        if index == limit:
            stats.merge_limit_hits += 1
            logger.info(f"Reconstruct: symbolic family of candidate {stats.candidates_tried} cut at {limit} grids")
            break
        stats.symbolic_grids_tried += 1
        merged = merge_symbolic(base, symbolic, window)
        tick(counter, "cells", merged.rows * merged.cols if merged is not None else 0)
        if merged is not None and verify(scan, merged, window):
            return merged
        stats.merge_conflicts += 1
    return None


def reconstruct(
    scan: IntGrid,
    window: WindowSpec,
    counter: Optional[OpCounter] = None,
    candidate_seed: Optional[int] = None,
    exact_completion: bool = True,
) -> ReconstructionOutcome:
    """A binary grid whose (p,q) scan is ``scan``, or a failure with diagnostics.

    With ``exact_completion`` off, a candidate is answered only by merging
    members of its residual's symbolic family, without the feasibility gate
    and without the exact smooth completion behind it. That pipeline can miss
    preimages, so it is kept for comparison only.
    """
    _validate_scan(scan, window)
    stats = ReconstructionStats()
    logger.info(f"Reconstruct: {scan.rows}x{scan.cols} scan, window {window.p}x{window.q}")

    per_subgrid = [valuations for _, valuations in minimal_valuations_per_subgrid(scan, window, counter)]
    stats.valuation_counts = [len(v) for v in per_subgrid]
    if any(not v for v in per_subgrid):
        stats.stage = "valuations"
        return ReconstructionOutcome(failure="some residue class has no valuation of its χ target", stats=stats)

    if candidate_seed is not None:
        rng = np.random.default_rng(candidate_seed)
        per_subgrid = [[choices[k] for k in rng.permutation(len(choices))] for choices in per_subgrid]

    for combo in iter_combinations(scan, window, per_subgrid, stats):
        stats.candidates_tried += 1
        base = BinaryGrid(sum(per_subgrid[level][index].grid.cells for level, index in enumerate(combo)))
        residual = scan - rectangular_scan(base, window, counter)
        tick(counter, "candidates")
        if not chi11_of_scan(residual).is_zero():
            raise ConsistencyError(f"residual of valuation combination {combo} is not (1,1)-smooth")

        witness = None
        if exact_completion:
            witness = complete_smooth(residual, window, occupied=base, counter=counter)
            if witness is None:
                stats.smooth_infeasible += 1
                continue

        merged = _merge_family(scan, base, residual, window, stats, counter)
        if merged is not None:
            stats.stage = "symbolic-merge"
            logger.success(f"Reconstruct: merged after {stats.candidates_tried} candidate(s)")
            return ReconstructionOutcome(solution=merged, stats=stats)

        if witness is None:
            continue
        if not verify(scan, witness, window):
            raise ConsistencyError("exact smooth completion does not re-scan to the residual")
        stats.exact_completions += 1
        stats.stage = "exact-completion"
        logger.warning(
            f"Reconstruct: no symbolic merge fits candidate {stats.candidates_tried}, using the exact smooth completion"
        )
        return ReconstructionOutcome(solution=witness, stats=stats)

    stats.stage = "exhausted"
    return ReconstructionOutcome(failure="no valuation combination admits a smooth completion", stats=stats)
