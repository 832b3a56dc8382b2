"""Ranked URI candidates produced by filtering, traversal or LLM selection."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Iterable

TEXT_FILTER = "text-filter"
TRAVERSAL = "traversal"
LLM_SELECTED = "llm-selected"


@dataclass(frozen=True)
class UriCandidate:
    uri: str
    label: str
    score: float
    rank: int
    source: str = TEXT_FILTER

    def to_dict(self) -> dict:
        return asdict(self)


def rerank(cands: Iterable[UriCandidate], source: str | None = None) -> list[UriCandidate]:
    """Reassign consecutive 1-based ranks in the given order."""
    return [replace(c, rank=i, source=source or c.source) for i, c in enumerate(cands, start=1)]
