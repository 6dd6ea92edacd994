import numpy as np

from app.core.grid import BinaryGrid, IntGrid
from app.schemas import WindowSpec


def random_binary(rng: np.random.Generator, m: int, n: int, density: float = 0.5) -> BinaryGrid:
    return BinaryGrid((rng.random((m, n)) < density).astype(np.int64))


def window(p: int, q: int) -> WindowSpec:
    return WindowSpec(p=p, q=q)


def grid(rows) -> IntGrid:
    return IntGrid(np.array(rows, dtype=np.int64))


def all_binary(m: int, n: int):
    for code in range(1 << (m * n)):
        bits = [(code >> k) & 1 for k in range(m * n)]
        yield BinaryGrid(np.array(bits, dtype=np.int64).reshape(m, n))
