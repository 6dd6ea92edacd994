from __future__ import annotations

from enum import IntEnum
from typing import NamedTuple

import numpy as np

from app.errors import InvalidInputError


class SymbolKind(IntEnum):
    ZERO = 0
    ONE = 1
    P = 2  # (p,0)-invariant run
    Q = 3  # (0,q)-invariant run
    ONE_P = 4  # one unit per column, class chosen at merge time
    ONE_Q = 5  # one unit per row, class chosen at merge time

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    SymbolKind.ZERO: "0",
    SymbolKind.ONE: "1",
    SymbolKind.P: "P",
    SymbolKind.Q: "Q",
    SymbolKind.ONE_P: "1P",
    SymbolKind.ONE_Q: "1Q",
}


class Symbol(NamedTuple):
    kind: SymbolKind
    index: int = 0

    def __str__(self) -> str:
        if self.kind in (SymbolKind.ONE_P, SymbolKind.ONE_Q):
            return f"{self.kind.label}{self.index}"
        return self.kind.label


class SymbolArray:
    """Immutable grid of symbols stored as a kind array plus a marker-index array."""

    __slots__ = ("_kinds", "_indices")

    def __init__(self, kinds: np.ndarray, indices: np.ndarray | None = None) -> None:
        kinds = np.array(kinds, dtype=np.int8)
        indices = np.zeros_like(kinds, dtype=np.int64) if indices is None else np.array(indices, dtype=np.int64)
        if kinds.ndim != 2 or kinds.shape != indices.shape:
            raise InvalidInputError("symbol kinds and indices must be equally shaped 2-D arrays")
        kinds.setflags(write=False)
        indices.setflags(write=False)
        self._kinds = kinds
        self._indices = indices

    @property
    def kinds(self) -> np.ndarray:
        return self._kinds

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def shape(self) -> tuple[int, int]:
        return int(self._kinds.shape[0]), int(self._kinds.shape[1])

    def symbol_at(self, i: int, j: int) -> Symbol:
        """1-based access, like the integer grids."""
        return Symbol(SymbolKind(int(self._kinds[i - 1, j - 1])), int(self._indices[i - 1, j - 1]))

    def count(self, kind: SymbolKind) -> int:
        return int((self._kinds == kind).sum())

    def render(self) -> str:
        return "\n".join(
            " ".join(str(Symbol(SymbolKind(int(k)), int(x))) for k, x in zip(kind_row, index_row))
            for kind_row, index_row in zip(self._kinds, self._indices)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolArray):
            return NotImplemented
        return (
            self.shape == other.shape
            and bool(np.array_equal(self._kinds, other._kinds))
            and bool(np.array_equal(self._indices, other._indices))
        )

    def __hash__(self) -> int:
        return hash((self.shape, self._kinds.tobytes(), self._indices.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(\n{self.render()}\n)"


class WindowTemplate(SymbolArray):
    """p×q pattern deciding which residue classes carry which kind of run."""

    __slots__ = ()


class SymbolicGrid(SymbolArray):
    """m×n grid whose marker cells still need a class choice before they become ones."""

    __slots__ = ()
