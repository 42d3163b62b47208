"""Rule-based strengths/weaknesses feedback and redesign recommendations."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional, Sequence

from .analytics import RankRow, rank_tasks
from .bloom import BloomLevel, BloomProfile
from .errors import EmptyAnalysis
from .fusion import Band
from .ingest import AssessmentDocument


class RecommendationKind(enum.Enum):
    RAISE_BLOOM_LEVEL = "RaiseBloomLevel"
    ADD_CONTEXTUAL_SCENARIO = "AddContextualScenario"
    REQUIRE_JUSTIFICATION = "RequireJustification"
    ADD_MULTI_STEP_REASONING = "AddMultiStepReasoning"
    REPLACE_DEFINITIONAL = "ReplaceDefinitional"


@dataclass(frozen=True)
class Recommendation:
    question_index: int
    kind: RecommendationKind
    text: str
    trigger: str


@dataclass(frozen=True)
class QuestionAnalysis:
    """One analyzed question: classification, subscores, fused verdict."""

    index: int
    text: str
    bloom: BloomProfile
    subscores: dict[str, Optional[float]]
    score: float
    band: Band
    weights_used: dict[str, float]
    mean_tfidf: Optional[float] = None
    max_boilerplate_similarity: Optional[float] = None
    nearest_prompt: Optional[str] = None
    judge_rationale: Optional[str] = None
    flags: tuple[str, ...] = ()


@dataclass
class AnalysisReport:
    id: str
    title: str
    created_at: datetime
    tool_version: str
    config_hash: str
    questions: list[QuestionAnalysis]
    assignment_score: float
    assignment_band: Band
    strengths: list[str]
    weaknesses: list[str]
    recommendations: list[Recommendation]
    ranking: list[int] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "created_at": self.created_at.isoformat(),
            "tool_version": self.tool_version,
            "config_hash": self.config_hash,
            "questions": [
                {
                    "index": q.index,
                    "text": q.text,
                    "bloom": {
                        "weights": [round(w, 12) for w in q.bloom.weights],
                        "dominant": q.bloom.dominant.label,
                        "matched_terms": [
                            [term, level.label] for term, level in q.bloom.matched_terms
                        ],
                        "low_confidence": q.bloom.low_confidence,
                    },
                    "subscores": {
                        name: (None if v is None else round(v, 6))
                        for name, v in q.subscores.items()
                    },
                    "score": round(q.score, 6),
                    "band": q.band.label,
                    "features": {
                        "mean_tfidf": _round(q.mean_tfidf),
                        "max_boilerplate_similarity": _round(q.max_boilerplate_similarity),
                        "nearest_prompt": q.nearest_prompt,
                        "judge_rationale": q.judge_rationale,
                        "weights_used": {k: round(v, 12) for k, v in q.weights_used.items()},
                    },
                    "flags": list(q.flags),
                }
                for q in self.questions
            ],
            "assignment": {
                "score": round(self.assignment_score, 6),
                "band": self.assignment_band.label,
                "judge_mean": self._judge_mean(),
            },
            "strengths": list(self.strengths),
            "weaknesses": list(self.weaknesses),
            "recommendations": [
                {
                    "question_index": r.question_index,
                    "kind": r.kind.value,
                    "text": r.text,
                    "trigger": r.trigger,
                }
                for r in self.recommendations
            ],
            "ranking": list(self.ranking),
            "notices": list(self.notices),
        }

    def _judge_mean(self) -> float | None:
        """Holistic judge-only view of the assignment, alongside the default
        mean-of-fused-scores aggregate."""
        judged = [q.subscores["judge"] for q in self.questions if q.subscores["judge"] is not None]
        if not judged:
            return None
        return round(sum(judged) / len(judged), 6)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_markdown(self) -> str:
        lines = [
            f"# Assessment analysis: {self.title}",
            "",
            f"Assignment AI-solvability: **{self.assignment_score:.1f}%** "
            f"(band: **{self.assignment_band.label}**)",
            "",
            "## Questions",
            "",
            "| # | Question | Bloom | Judge | Bloom sub | Semantic | Lexical | Score | Band |",
            "|---|----------|-------|-------|-----------|----------|---------|-------|------|",
        ]
        for q in self.questions:
            subs = {k: ("n/a" if v is None else f"{v:.1f}") for k, v in q.subscores.items()}
            text = q.text if len(q.text) <= 60 else q.text[:57] + "..."
            lines.append(
                f"| {q.index + 1} | {text} | {q.bloom.dominant.label} | {subs['judge']} "
                f"| {subs['bloom']} | {subs['semantic']} | {subs['lexical']} "
                f"| {q.score:.1f} | {q.band.label} |"
            )
        lines += ["", "## Strengths", ""]
        lines += [f"- {s}" for s in self.strengths]
        lines += ["", "## Weaknesses", ""]
        lines += [f"- {w}" for w in self.weaknesses]
        lines += ["", "## Recommendations", ""]
        if self.recommendations:
            lines += [
                f"- Q{r.question_index + 1} [{r.kind.value}] {r.text}"
                for r in self.recommendations
            ]
        else:
            lines.append("- none")
        if self.notices:
            lines += ["", "## Notices", ""]
            lines += [f"- {n}" for n in self.notices]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["index", "text", "dominant_bloom", "judge", "bloom", "semantic", "lexical", "score", "band"]
        )
        for q in self.questions:
            writer.writerow(
                [
                    q.index,
                    q.text,
                    q.bloom.dominant.label,
                    _csv_num(q.subscores["judge"]),
                    _csv_num(q.subscores["bloom"]),
                    _csv_num(q.subscores["semantic"]),
                    _csv_num(q.subscores["lexical"]),
                    f"{q.score:.4f}",
                    q.band.label,
                ]
            )
        return buf.getvalue()


def _round(v: Optional[float]) -> Optional[float]:
    return None if v is None else round(v, 6)


def _csv_num(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.4f}"


# Rule predicates, keyed by trigger id. Each takes a QuestionAnalysis and
# reports whether the rule fires for that question.
RULES = {
    "W1": lambda q: q.band == Band.HIGH,
    "W2": lambda q: q.bloom.dominant in (BloomLevel.REMEMBER, BloomLevel.UNDERSTAND),
    "W3": lambda q: q.subscores.get("semantic") is not None and q.subscores["semantic"] > 80.0,
    "S1": lambda q: q.band == Band.LOW,
    "S2": lambda q: q.bloom.dominant in (BloomLevel.EVALUATE, BloomLevel.CREATE),
}

NEUTRAL_STRENGTH = "Balanced cognitive profile across the assignment."
NEUTRAL_WEAKNESS = "No dominant risk identified."


def generate_report(
    rows: Sequence[QuestionAnalysis],
    doc: AssessmentDocument,
    assignment_score: float,
    assignment_band: Band,
    tool_version: str,
    config_hash: str,
    created_at: datetime,
    notices: Sequence[str] = (),
) -> AnalysisReport:
    """Apply the feedback rule table and assemble the full report.

    Strengths and weaknesses are never empty: if no rule of a kind fires,
    the neutral statement for that kind is emitted instead.
    """
    if not rows:
        raise EmptyAnalysis("no analyzed questions")

    strengths: list[str] = []
    weaknesses: list[str] = []
    recommendations: list[Recommendation] = []

    for q in rows:
        n = q.index + 1
        if RULES["W1"](q):
            weaknesses.append(
                f"Q{n} is a definitional/low-complexity task: generative AI can "
                f"complete it with minimal human input (band High)."
            )
            recommendations.append(
                Recommendation(
                    question_index=q.index,
                    kind=RecommendationKind.REPLACE_DEFINITIONAL,
                    text="Replace the definitional prompt with a task that applies "
                    "the concept to an unfamiliar, concrete situation.",
                    trigger="W1",
                )
            )
        if RULES["W2"](q):
            recommendations.append(
                Recommendation(
                    question_index=q.index,
                    kind=RecommendationKind.RAISE_BLOOM_LEVEL,
                    text=f"Q{n} targets {q.bloom.dominant.label}; rewrite it to demand "
                    "analysis, evaluation, or original design.",
                    trigger="W2",
                )
            )
        if RULES["W3"](q):
            weaknesses.append(
                f"Q{n} is a close paraphrase of boilerplate prompt "
                f"{q.nearest_prompt!r}."
            )
            recommendations.append(
                Recommendation(
                    question_index=q.index,
                    kind=RecommendationKind.ADD_CONTEXTUAL_SCENARIO,
                    text="Anchor the question in a specific scenario, dataset, or case "
                    "study so a generic answer no longer fits.",
                    trigger="W3",
                )
            )
        if RULES["S1"](q):
            strengths.append(f"Q{n} is resistant to AI completion (band Low).")
        if RULES["S2"](q):
            strengths.append(
                f"Q{n} targets higher-order thinking ({q.bloom.dominant.label})."
            )

    if not strengths:
        strengths.append(NEUTRAL_STRENGTH)
    if not weaknesses:
        weaknesses.append(NEUTRAL_WEAKNESS)

    ranked = rank_tasks(
        [
            RankRow(
                index=q.index,
                question_text=q.text,
                score=q.score,
                mean_tfidf=q.mean_tfidf if q.mean_tfidf is not None else 0.0,
                semantic_subscore=(
                    q.subscores.get("semantic")
                    if q.subscores.get("semantic") is not None
                    else 0.0
                ),
            )
            for q in rows
        ]
    )

    return AnalysisReport(
        id=doc.id,
        title=doc.title,
        created_at=created_at,
        tool_version=tool_version,
        config_hash=config_hash,
        questions=list(rows),
        assignment_score=assignment_score,
        assignment_band=assignment_band,
        strengths=strengths,
        weaknesses=weaknesses,
        recommendations=recommendations,
        ranking=[r.index for r in ranked],
        notices=list(notices),
    )
