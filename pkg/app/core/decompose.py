from typing import Optional

import numpy as np
from loguru import logger

from app.core.grid import IntGrid
from app.core.instrumentation import OpCounter, tick
from app.errors import InvalidInputError, NonSmoothScanError
from app.schemas import Decomposition


def decompose(scan: IntGrid, counter: Optional[OpCounter] = None) -> list[Decomposition]:
    """All splits of a (1,1)-smooth scan into constant rows plus constant columns.

    The global minimum k goes to the column part, the row minima of the rest
    form the row part, and the residual must have constant columns. The k+1
    results shift t units from the column part to the row part, t = 0..k.
    """
    if scan.is_empty:
        raise InvalidInputError("cannot decompose an empty scan")
    cells = scan.cells
    if cells.min() < 0:
        raise InvalidInputError("scan cells must be non-negative")

    k = int(cells.min())
    residual = cells - k
    row_minima = residual.min(axis=1)
    residual = residual - row_minima[:, None]
    tick(counter, "decompose_cells", 2 * cells.size)
    if not (residual == residual[:1, :]).all():
        raise NonSmoothScanError("scan residual after removing row minima does not have constant columns")

    row_part = np.repeat(row_minima[:, None], scan.cols, axis=1)
    logger.debug(f"Decompose: k={k}, row minima={row_minima.tolist()}")
    return [
        Decomposition(row_part=IntGrid(row_part + t), col_part=IntGrid(residual + (k - t)), t=t)
        for t in range(k + 1)
    ]
