"""Subscore fusion, ease banding, and assignment aggregation."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptyList, NoSignals, OutOfRange

# Band cut points: scores below the first are Low, below the second Medium,
# below the third Medium-High, and everything up to 100 is High.
DEFAULT_THRESHOLDS: tuple[float, float, float] = (50.0, 65.0, 75.0)


class Band(enum.IntEnum):
    LOW = 0
    MEDIUM = 1
    MEDIUM_HIGH = 2
    HIGH = 3

    @property
    def label(self) -> str:
        return _BAND_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "Band":
        for band, name in _BAND_LABELS.items():
            if name == label:
                return band
        raise ValueError(f"unknown band label: {label!r}")


_BAND_LABELS = {
    Band.LOW: "Low",
    Band.MEDIUM: "Medium",
    Band.MEDIUM_HIGH: "Medium-High",
    Band.HIGH: "High",
}


@dataclass(frozen=True)
class FusionWeights:
    """Convex weights over the four signals (judge, bloom, semantic, lexical)."""

    judge: float = 0.50
    bloom: float = 0.20
    semantic: float = 0.20
    lexical: float = 0.10

    def __post_init__(self):
        for name, w in self.as_dict().items():
            if w < 0:
                raise ValueError(f"weight {name} must be non-negative, got {w}")
        total = sum(self.as_dict().values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1.0, got {total}")

    def as_dict(self) -> dict[str, float]:
        return {
            "judge": self.judge,
            "bloom": self.bloom,
            "semantic": self.semantic,
            "lexical": self.lexical,
        }


SIGNAL_NAMES = ("judge", "bloom", "semantic", "lexical")


@dataclass(frozen=True)
class SolvabilityScore:
    """Fused AI-solvability percentage with its inputs.

    ``subscores`` holds one entry per signal; ``None`` marks a signal that was
    unavailable for this question. ``weights_used`` are the weights after
    pro-rata redistribution, zero for unavailable signals.
    """

    value: float
    subscores: dict[str, Optional[float]]
    weights_used: dict[str, float]


def fuse(
    judge: Optional[float],
    bloom: Optional[float],
    semantic: Optional[float],
    lexical: Optional[float],
    weights: FusionWeights | None = None,
) -> SolvabilityScore:
    """Weighted fusion of the available subscores.

    Weights of unavailable subscores are redistributed proportionally among
    the available ones, so the effective weights always sum to 1.
    """
    weights = weights or FusionWeights()
    subscores = {"judge": judge, "bloom": bloom, "semantic": semantic, "lexical": lexical}
    base = weights.as_dict()

    available = {k: v for k, v in subscores.items() if v is not None}
    if not available:
        raise NoSignals("all four subscores unavailable")
    for name, v in available.items():
        if not 0.0 <= v <= 100.0:
            raise OutOfRange(f"subscore {name}={v} outside [0, 100]")

    mass = sum(base[k] for k in available)
    if len(available) == len(SIGNAL_NAMES):
        used = dict(base)
    elif mass > 0:
        used = {k: (base[k] / mass if k in available else 0.0) for k in SIGNAL_NAMES}
    else:
        # All remaining signals carry zero configured weight; fall back to
        # an equal split so the fused value is still defined.
        share = 1.0 / len(available)
        used = {k: (share if k in available else 0.0) for k in SIGNAL_NAMES}

    value = sum(used[k] * available[k] for k in available)
    value = min(100.0, max(0.0, value))
    return SolvabilityScore(value=value, subscores=subscores, weights_used=used)


def band(score: float, thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> Band:
    """Map a solvability score to its ease band via half-open intervals."""
    if not 0.0 <= score <= 100.0:
        raise OutOfRange(f"score {score} outside [0, 100]")
    low, med, high = thresholds
    if score < low:
        return Band.LOW
    if score < med:
        return Band.MEDIUM
    if score < high:
        return Band.MEDIUM_HIGH
    return Band.HIGH


def aggregate_assignment(
    question_scores: Sequence[SolvabilityScore | float],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> tuple[float, Band]:
    """Mean question score and the band of that mean."""
    if not question_scores:
        raise EmptyList("no question scores to aggregate")
    values = [s.value if isinstance(s, SolvabilityScore) else float(s) for s in question_scores]
    mean = sum(values) / len(values)
    return mean, band(mean, thresholds)
