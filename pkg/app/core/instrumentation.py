from collections import Counter
from typing import Optional


class OpCounter:
    """Tallies elementary operations per named bucket.

    Algorithms accept ``counter=None`` and only tick when one is passed, so
    complexity checks can compare totals across instance sizes.
    """

    def __init__(self) -> None:
        self.counts: Counter[str] = Counter()

    def tick(self, bucket: str, amount: int = 1) -> None:
        self.counts[bucket] += amount

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_dict(self) -> dict[str, int]:
        return dict(sorted(self.counts.items()))


def tick(counter: Optional[OpCounter], bucket: str, amount: int = 1) -> None:
    if counter is not None:
        counter.tick(bucket, amount)
