"""Plain-text matrix files: a "rows cols" header, then one line per row.

Lines starting with '#' and blank lines are ignored on read.
"""

from pathlib import Path
from typing import Union

import numpy as np

from app.core.grid import BinaryGrid, IntGrid
from app.errors import InvalidInputError, MatrixFormatError


def parse_matrix(text: str, binary: bool = False) -> IntGrid:
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise MatrixFormatError("matrix file is empty")
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixFormatError(f"header must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(header[0]), int(header[1])
        cells = [[int(token) for token in line.split()] for line in lines[1:]]
    except ValueError as e:
        raise MatrixFormatError(f"non-integer token: {e}") from e
    if rows < 0 or cols < 0:
        raise MatrixFormatError(f"negative dimensions {rows}x{cols}")

    if rows == 0 or cols == 0:
        if cells:
            raise MatrixFormatError(f"declared {rows}x{cols} but the body has {len(cells)} row(s)")
        body = np.zeros((rows, cols), dtype=np.int64)
    else:
        if len(cells) != rows or any(len(row) != cols for row in cells):
            raise MatrixFormatError(f"declared {rows}x{cols} but the body does not match")
        body = np.array(cells, dtype=np.int64)

    try:
        return BinaryGrid(body) if binary else IntGrid(body)
    except InvalidInputError as e:
        raise MatrixFormatError(str(e)) from e


def format_matrix(grid: IntGrid) -> str:
    lines = [f"{grid.rows} {grid.cols}"]
    if grid.cols:
        lines.extend(" ".join(str(v) for v in row) for row in grid.cells.tolist())
    return "\n".join(lines) + "\n"


def read_matrix(path: Union[str, Path], binary: bool = False) -> IntGrid:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as e:
        raise MatrixFormatError(f"cannot read {path}: {e}") from e
    return parse_matrix(text, binary=binary)
