"""System Usability Scale scoring (standard Brooke weighting)."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfRangeItem

ITEM_COUNT = 10


@dataclass(frozen=True)
class SusResponse:
    item_scores: tuple

    def __post_init__(self):
        scores = tuple(self.item_scores)
        object.__setattr__(self, "item_scores", scores)
        if len(scores) != ITEM_COUNT:
            raise OutOfRangeItem(f"need {ITEM_COUNT} items, got {len(scores)}")
        for i, s in enumerate(scores, start=1):
            if not isinstance(s, int) or isinstance(s, bool) or not 1 <= s <= 5:
                raise OutOfRangeItem(f"item {i} must be an integer in [1,5], got {s!r}")


def sus_score(response: SusResponse) -> float:
    """Odd items contribute (score-1), even items (5-score), total scaled
    by 2.5 onto [0,100]."""
    total = 0
    for i, s in enumerate(response.item_scores, start=1):
        total += (s - 1) if i % 2 == 1 else (5 - s)
    return 2.5 * total
