"""Corpus-level statistics: band histograms and task rankings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyList
from .fusion import DEFAULT_THRESHOLDS, Band, band


@dataclass(frozen=True)
class BandHistogram:
    counts: dict[Band, int]
    total: int

    def count(self, b: Band) -> int:
        return self.counts.get(b, 0)

    def to_rows(self) -> list[tuple[str, int]]:
        """(label, count) pairs in Low -> High order."""
        return [(b.label, self.counts.get(b, 0)) for b in Band]

    def to_csv(self) -> str:
        lines = ["band,count"]
        lines += [f"{label},{count}" for label, count in self.to_rows()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {label: count for label, count in self.to_rows()}
        payload["total"] = self.total
        return json.dumps(payload, indent=2) + "\n"


def histogram(
    assignment_scores: Sequence[float],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> BandHistogram:
    counts = {b: 0 for b in Band}
    for score in assignment_scores:
        counts[band(score, thresholds)] += 1
    return BandHistogram(counts=counts, total=len(assignment_scores))


@dataclass(frozen=True)
class RankRow:
    index: int
    question_text: str
    score: float
    mean_tfidf: float
    semantic_subscore: float
    extra: dict = field(default_factory=dict, compare=False)


def rank_tasks(rows: Sequence[RankRow]) -> list[RankRow]:
    """Rank questions by AI susceptibility: fused score descending, then
    higher semantic similarity, then lower lexical rarity, then input order."""
    if not rows:
        raise EmptyList("no rows to rank")
    return sorted(
        rows,
        key=lambda r: (-r.score, -r.semantic_subscore, r.mean_tfidf, r.index),
    )
