"""LLM judge: prompt construction, solvability extraction, retry handling."""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Protocol

from .bloom import BloomProfile
from .errors import JudgeUnparseable, NoScoreFound, ProviderUnavailable

PROMPT_VERSION = "v1"

# Question text is fenced so a question that itself contains the score
# directive cannot confuse the output-format instruction.
FENCE_OPEN = "<<<QUESTION"
FENCE_CLOSE = "QUESTION>>>"

_FENCED_RE = re.compile(
    re.escape(FENCE_OPEN) + r"\n(.*?)\n" + re.escape(FENCE_CLOSE), re.DOTALL
)

RETRY_DIRECTIVE = "Respond ONLY with the AI-SOLVABILITY line."

# Extraction patterns, in priority order.
_P1_SCORE_LINE = re.compile(r"AI-SOLVABILITY:\s*(\d{1,3})\s*%")
_P2_ANY_PERCENT = re.compile(r"(?<![\d.])(\d{1,3}(?:\.\d+)?)\s*%")
_P3_BARE_INT = re.compile(r"(?<![\w.%])(\d{1,3})(?![\w.%])")


class ChatTransport(Protocol):
    provider_id: str

    def chat(self, system: str, user: str) -> str: ...


class TransportError(Exception):
    """Single failed attempt against a chat or embedding endpoint."""


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = ""
    model_name: str = "default"
    timeout_ms: int = 30000
    max_retries: int = 2
    temperature: float = 0.0

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class JudgePrompt:
    system_text: str
    user_text: str
    version: str = PROMPT_VERSION


@dataclass(frozen=True)
class JudgeResponse:
    raw_text: str
    solvability: float
    rationale: Optional[str]
    provider_id: str
    latency_ms: int
    retries: int = 0


_system_text: str | None = None


def system_text() -> str:
    global _system_text
    if _system_text is None:
        _system_text = (
            resources.files("bloomgate.data")
            .joinpath(f"judge_prompt_{PROMPT_VERSION}.txt")
            .read_text("utf-8")
        )
    return _system_text


def extract_fenced_question(user_text: str) -> str | None:
    """Recover the verbatim question from a built prompt (used by mocks)."""
    m = _FENCED_RE.search(user_text)
    return m.group(1) if m else None


def build_prompt(question_text: str, bloom: BloomProfile | None = None) -> JudgePrompt:
    """Deterministic prompt embedding the fenced question and its Bloom context."""
    if not question_text or not question_text.strip():
        raise ValueError("question text is empty")
    parts = [
        "Assignment question (between the markers):",
        FENCE_OPEN,
        question_text,
        FENCE_CLOSE,
    ]
    if bloom is not None:
        parts.append("")
        parts.append(f"Dominant Bloom level of this question: {bloom.dominant.label}")
    parts.append("")
    parts.append(
        "Estimate how solvable this question is for a generative AI assistant. "
        "Your reply MUST contain the line `AI-SOLVABILITY: <integer 0-100>%`."
    )
    return JudgePrompt(system_text=system_text(), user_text="\n".join(parts))


def parse_solvability(raw_text: str) -> float:
    """Extract the solvability percentage from free-form model output.

    Priority: the AI-SOLVABILITY line, then the first percentage anywhere,
    then a standalone integer 0-100 on a line mentioning "solvab". The
    result is clamped to [0, 100].
    """
    if not raw_text or not raw_text.strip():
        raise NoScoreFound("empty response")

    m = _P1_SCORE_LINE.search(raw_text)
    if m:
        return min(100.0, max(0.0, float(m.group(1))))

    m = _P2_ANY_PERCENT.search(raw_text)
    if m:
        return min(100.0, max(0.0, float(m.group(1))))

    for line in raw_text.splitlines():
        if "solvab" not in line.lower():
            continue
        for im in _P3_BARE_INT.finditer(line):
            value = float(im.group(1))
            if value <= 100.0:
                return value

    raise NoScoreFound("no solvability pattern matched")


def _rationale_after_score(raw_text: str) -> Optional[str]:
    m = _P1_SCORE_LINE.search(raw_text)
    if not m:
        return None
    rest = raw_text[m.end():].strip()
    return rest or None


def _send(transport: ChatTransport, system: str, user: str, cfg: ProviderConfig) -> tuple[str, int]:
    """One prompt exchange with transport-level retries.

    Returns (raw_text, attempts_failed). Raises ProviderUnavailable once the
    retry budget is exhausted.
    """
    failures = 0
    last_error: Exception | None = None
    for _ in range(cfg.max_retries + 1):
        try:
            return transport.chat(system, user), failures
        except TransportError as exc:
            failures += 1
            last_error = exc
    raise ProviderUnavailable(
        f"chat provider failed after {failures} attempts: {last_error}"
    ) from last_error


def judge_question(
    question_text: str,
    bloom: BloomProfile | None,
    cfg: ProviderConfig,
    transport: ChatTransport,
) -> JudgeResponse:
    """Ask the judge for a solvability estimate, re-prompting once on a
    response the parser cannot score."""
    prompt = build_prompt(question_text, bloom)
    started = time.perf_counter()
    raw, retries = _send(transport, prompt.system_text, prompt.user_text, cfg)
    try:
        score = parse_solvability(raw)
    except NoScoreFound:
        strict_user = prompt.user_text + "\n\n" + RETRY_DIRECTIVE
        raw, more = _send(transport, prompt.system_text, strict_user, cfg)
        retries += more
        try:
            score = parse_solvability(raw)
        except NoScoreFound as exc:
            raise JudgeUnparseable(
                "no solvability score in either judge response"
            ) from exc
    latency_ms = int((time.perf_counter() - started) * 1000)
    return JudgeResponse(
        raw_text=raw,
        solvability=score,
        rationale=_rationale_after_score(raw),
        provider_id=transport.provider_id,
        latency_ms=latency_ms,
        retries=retries,
    )
