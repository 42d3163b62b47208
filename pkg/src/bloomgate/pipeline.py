"""End-to-end analysis pipeline shared by the CLI and the HTTP service."""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import __version__
from .bloom import VerbLexicon, bloom_subscore, classify, default_lexicon
from .config import AppConfig, config_hash
from .errors import JudgeUnparseable, ProviderUnavailable
from .feedback import AnalysisReport, QuestionAnalysis, generate_report
from .fusion import aggregate_assignment, band, fuse
from .ingest import AssessmentDocument, Question, SourceFormat, extract_text, segment_questions
from .judge import PROMPT_VERSION, ProviderConfig, build_prompt, judge_question
from .lexical import complexity, default_seed_corpus, fit_corpus
from .providers import (
    CachingEmbedder,
    DeterministicChatProvider,
    ScriptedChatProvider,
    TermFrequencyEmbedder,
    build_chat_provider,
    build_embedding_provider,
)
from .semantic import BoilerplateBank, default_bank, semantic_features
from .store import AnalysisRecord, JudgeTranscript

CUSTOM_THRESHOLD_NOTICE = (
    "custom-thresholds: band boundaries differ from the shipped defaults, so "
    "band labels are not comparable with standard reports"
)


@dataclass
class AnalysisContext:
    """Everything an analysis run needs: config, reference data, providers."""

    cfg: AppConfig
    lexicon: VerbLexicon
    seed_corpus: list[str]
    bank: BoilerplateBank
    chat_provider: object
    embedder: object
    provider_cfg: ProviderConfig
    fixed_time: Optional[datetime] = None
    cfg_hash: str = field(init=False)
    judge_semaphore: threading.Semaphore = field(init=False)

    def __post_init__(self):
        self.cfg_hash = config_hash(
            self.cfg, self.lexicon.version, self.bank.version, PROMPT_VERSION
        )
        # Caps in-flight judge calls across ALL concurrent analyses sharing
        # this context, not just within one document.
        self.judge_semaphore = threading.Semaphore(max(1, self.cfg.provider_parallelism))

    def now(self) -> datetime:
        return self.fixed_time or datetime.now(timezone.utc)


def build_context(
    cfg: AppConfig,
    mock: bool = False,
    mock_script: str | Path | None = None,
    fixed_time: Optional[datetime] = None,
) -> AnalysisContext:
    """Construct providers and load reference data.

    With ``mock`` set, the judge is a deterministic stub (or a scripted one
    when ``mock_script`` is given) and embeddings use the offline
    term-frequency embedder, so runs are fully reproducible offline.
    """
    provider_cfg = ProviderConfig(
        base_url=cfg.chat_base_url,
        model_name=cfg.chat_model,
        timeout_ms=cfg.chat_timeout_ms,
        max_retries=cfg.chat_max_retries,
        temperature=cfg.chat_temperature,
    )
    if mock_script is not None:
        chat = ScriptedChatProvider.from_file(mock_script)
    elif mock:
        chat = DeterministicChatProvider()
    else:
        chat = build_chat_provider(provider_cfg)
    if mock or not cfg.embed_base_url:
        embed = TermFrequencyEmbedder()
    else:
        embed = build_embedding_provider(
            cfg.embed_base_url, timeout_ms=cfg.chat_timeout_ms
        )
    return AnalysisContext(
        cfg=cfg,
        lexicon=default_lexicon(),
        seed_corpus=default_seed_corpus(),
        bank=default_bank(),
        chat_provider=chat,
        embedder=CachingEmbedder(embed),
        provider_cfg=provider_cfg,
        fixed_time=fixed_time,
    )


@dataclass
class AnalysisOutcome:
    document: AssessmentDocument
    questions: list[Question]
    report: AnalysisReport
    transcripts: list[JudgeTranscript]


def _judge_one(ctx: AnalysisContext, question: Question, profile, chat) -> tuple:
    """Returns (judge_subscore | None, transcript, flags)."""
    prompt = build_prompt(question.text, profile)
    try:
        with ctx.judge_semaphore:
            response = judge_question(question.text, profile, ctx.provider_cfg, chat)
        transcript = JudgeTranscript(
            question_index=question.index,
            prompt=prompt.user_text,
            raw_text=response.raw_text,
        )
        return response.solvability, response.rationale, transcript, ()
    except (ProviderUnavailable, JudgeUnparseable) as exc:
        transcript = JudgeTranscript(
            question_index=question.index,
            prompt=prompt.user_text,
            raw_text=f"<judge-unavailable: {exc}>",
        )
        return None, None, transcript, ("judge-unavailable",)


def analyze_document(
    ctx: AnalysisContext,
    doc: AssessmentDocument,
    chat_override=None,
) -> AnalysisOutcome:
    """Run the full pipeline over one document.

    Provider failures degrade gracefully: a failed signal is dropped, its
    fusion weight is redistributed, and the question row is flagged.
    """
    chat = chat_override or ctx.chat_provider
    questions = segment_questions(doc)

    model = fit_corpus([q.text for q in questions] + ctx.seed_corpus)

    # Bloom and lexical signals are local and never fail for segmented text.
    profiles = [classify(q.text, ctx.lexicon) for q in questions]
    lex_features = [
        complexity(q.text, model, ctx.cfg.lexical_saturation) for q in questions
    ]

    semantic_ok = True
    sem_results: list = [None] * len(questions)
    try:
        # Warm the cache in one batch, then score per question.
        ctx.bank.ensure_vectors(ctx.embedder)
        ctx.embedder.embed([q.text for q in questions])
        for q in questions:
            sem_results[q.index] = semantic_features(q.text, ctx.bank, ctx.embedder)
    except ProviderUnavailable:
        semantic_ok = False

    max_workers = max(1, ctx.cfg.provider_parallelism)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        judge_results = list(
            pool.map(
                lambda args: _judge_one(ctx, args[0], args[1], chat),
                zip(questions, profiles),
            )
        )

    rows: list[QuestionAnalysis] = []
    transcripts: list[JudgeTranscript] = []
    for q, profile, lex in zip(questions, profiles, lex_features):
        judge_score, rationale, transcript, judge_flags = judge_results[q.index]
        transcripts.append(transcript)

        flags = list(judge_flags)
        if profile.low_confidence:
            flags.append("bloom-low-confidence")
        sem = sem_results[q.index] if semantic_ok else None
        if not semantic_ok:
            flags.append("semantic-unavailable")

        fused = fuse(
            judge=judge_score,
            bloom=bloom_subscore(profile),
            semantic=sem.semantic_subscore if sem else None,
            lexical=lex.lexical_subscore,
            weights=ctx.cfg.fusion_weights,
        )
        rows.append(
            QuestionAnalysis(
                index=q.index,
                text=q.text,
                bloom=profile,
                subscores=fused.subscores,
                score=fused.value,
                band=band(fused.value, ctx.cfg.band_thresholds),
                weights_used=fused.weights_used,
                mean_tfidf=lex.mean_tfidf,
                max_boilerplate_similarity=sem.max_boilerplate_similarity if sem else None,
                nearest_prompt=sem.nearest_prompt if sem else None,
                judge_rationale=rationale,
                flags=tuple(flags),
            )
        )

    score, assignment_band = aggregate_assignment(
        [r.score for r in rows], ctx.cfg.band_thresholds
    )
    notices = [CUSTOM_THRESHOLD_NOTICE] if ctx.cfg.custom_thresholds else []
    report = generate_report(
        rows,
        doc,
        assignment_score=score,
        assignment_band=assignment_band,
        tool_version=__version__,
        config_hash=ctx.cfg_hash,
        created_at=doc.ingested_at,
        notices=notices,
    )
    return AnalysisOutcome(
        document=doc, questions=questions, report=report, transcripts=transcripts
    )


def analyze_bytes(
    ctx: AnalysisContext,
    data: bytes,
    source_format: SourceFormat,
    title: str = "",
    chat_override=None,
) -> AnalysisOutcome:
    doc = extract_text(data, source_format, title=title, ingested_at=ctx.now())
    return analyze_document(ctx, doc, chat_override=chat_override)


def to_record(
    outcome: AnalysisOutcome, analysis_id: str, parent_id: str | None = None
) -> AnalysisRecord:
    return AnalysisRecord(
        analysis_id=analysis_id,
        report=outcome.report.to_json_dict(),
        raw_text=outcome.document.raw_text,
        source_format=outcome.document.source_format.value,
        created_at=outcome.document.ingested_at.isoformat(),
        raw_judge_transcripts=tuple(outcome.transcripts),
        parent_id=parent_id,
    )


def rescore(
    ctx: AnalysisContext,
    record: AnalysisRecord,
    question_index: int,
    new_text: str,
    chat_override=None,
) -> tuple[AnalysisOutcome, dict]:
    """Re-run the pipeline with one question's text replaced.

    The edited text is spliced into the original document at the question's
    span, so surrounding context is preserved. Returns the new outcome and a
    delta block comparing the edited question's verdict.
    """
    if not new_text or not new_text.strip():
        raise ValueError("replacement text is empty")
    old_questions = record.report.get("questions", [])
    if not 0 <= question_index < len(old_questions):
        raise IndexError(f"question index {question_index} out of range")

    source_format = SourceFormat(record.source_format)
    doc = extract_text(
        record.raw_text.encode("utf-8"), source_format, title=record.report.get("title", ""),
        ingested_at=ctx.now(),
    )
    questions = segment_questions(doc)
    if question_index >= len(questions):
        raise IndexError(f"question index {question_index} out of range after re-segmentation")
    start, end = questions[question_index].char_span
    new_raw = doc.raw_text[:start] + " " + new_text.strip() + "\n" + doc.raw_text[end:]

    outcome = analyze_bytes(
        ctx,
        new_raw.encode("utf-8"),
        source_format,
        title=record.report.get("title", ""),
        chat_override=chat_override,
    )

    old_row = old_questions[question_index]
    new_rows = outcome.report.questions
    new_row = new_rows[question_index] if question_index < len(new_rows) else new_rows[-1]
    delta = {
        "question_index": question_index,
        "old_score": old_row["score"],
        "new_score": round(new_row.score, 6),
        "old_band": old_row["band"],
        "new_band": new_row.band.label,
        "old_text": old_row["text"],
        "new_text": new_row.text,
    }
    return outcome, delta
