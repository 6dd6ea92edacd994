from __future__ import annotations

from typing import Any

import numpy as np

from app.errors import GridShapeError, InvalidInputError


class IntGrid:
    """Immutable integer matrix with 1-based ``grid[i, j]`` access.

    Cells live in a read-only ``numpy.int64`` array. Zero rows or zero columns
    are allowed, since the χ of an m×n grid under an m×q window has no rows.
    """

    __slots__ = ("_cells",)

    def __init__(self, cells: Any) -> None:
        if isinstance(cells, IntGrid):
            cells = cells.cells
        arr = np.array(cells, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise InvalidInputError(f"grid must be two-dimensional, got {arr.ndim} dimension(s)")
        arr.setflags(write=False)
        self._cells = arr
        self._validate()

    def _validate(self) -> None:
        pass

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntGrid":
        return cls(np.zeros((rows, cols), dtype=np.int64))

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def rows(self) -> int:
        return int(self._cells.shape[0])

    @property
    def cols(self) -> int:
        return int(self._cells.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_empty(self) -> bool:
        return self._cells.size == 0

    def is_zero(self) -> bool:
        return not self._cells.any()

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise IndexError(f"cell ({i}, {j}) outside a {self.rows}x{self.cols} grid")
        return int(self._cells[i - 1, j - 1])

    def transpose(self) -> "IntGrid":
        return type(self)(self._cells.T)

    def to_lists(self) -> list[list[int]]:
        return self._cells.tolist()

    def __add__(self, other: "IntGrid") -> "IntGrid":
        return add(self, other)

    def __sub__(self, other: "IntGrid") -> "IntGrid":
        return subtract(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntGrid):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._cells, other._cells))

    def __hash__(self) -> int:
        return hash((self.shape, self._cells.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_lists()})"


class BinaryGrid(IntGrid):
    """An :class:`IntGrid` whose cells are 0 or 1, with at least one row and column."""

    __slots__ = ()

    def _validate(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise InvalidInputError(f"binary grid needs at least one row and column, got {self.shape}")
        if not np.isin(self._cells, (0, 1)).all():
            raise InvalidInputError("binary grid cells must be 0 or 1")

    @classmethod
    def ones(cls, rows: int, cols: int) -> "BinaryGrid":
        return cls(np.ones((rows, cols), dtype=np.int64))


def _check_same_shape(a: IntGrid, b: IntGrid) -> None:
    if a.shape != b.shape:
        raise GridShapeError(f"shape mismatch: {a.shape} vs {b.shape}")


def add(a: IntGrid, b: IntGrid) -> IntGrid:
    _check_same_shape(a, b)
    return IntGrid(a.cells + b.cells)


def subtract(a: IntGrid, b: IntGrid) -> IntGrid:
    _check_same_shape(a, b)
    return IntGrid(a.cells - b.cells)


def residue_representative(i: int, p: int) -> int:
    """Representative of ``i`` modulo ``p`` in ``[1, p]``."""
    if p < 1:
        raise InvalidInputError(f"period must be positive, got {p}")
    return (i - 1) % p + 1


def residue_rows(i: int, p: int, m: int) -> list[int]:
    """All 1-based indices in ``[1, m]`` congruent to ``i`` modulo ``p``, ascending.

    >>> residue_rows(5, 3, 7)
    [2, 5]
    """
    if p < 1 or not 1 <= i <= m:
        raise InvalidInputError(f"index {i} with period {p} outside [1, {m}]")
    return list(range(residue_representative(i, p), m + 1, p))
