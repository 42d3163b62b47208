"""Bloom-level classification of question text via a weighted verb lexicon."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import EmptyQuestion, LexiconFormatError


class BloomLevel(enum.IntEnum):
    REMEMBER = 1
    UNDERSTAND = 2
    APPLY = 3
    ANALYZE = 4
    EVALUATE = 5
    CREATE = 6

    @property
    def label(self) -> str:
        return _LEVEL_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "BloomLevel":
        try:
            return _LABEL_LEVELS[label]
        except KeyError:
            raise ValueError(f"unknown Bloom level: {label!r}") from None


_LEVEL_LABELS = {
    BloomLevel.REMEMBER: "Remember",
    BloomLevel.UNDERSTAND: "Understand",
    BloomLevel.APPLY: "Apply",
    BloomLevel.ANALYZE: "Analyze",
    BloomLevel.EVALUATE: "Evaluate",
    BloomLevel.CREATE: "Create",
}
_LABEL_LEVELS = {v: k for k, v in _LEVEL_LABELS.items()}

# Per-level solvability anchors: lower-order levels are far easier for
# generative AI to complete than higher-order ones.
LEVEL_SOLVABILITY: dict[BloomLevel, float] = {
    BloomLevel.REMEMBER: 90.0,
    BloomLevel.UNDERSTAND: 80.0,
    BloomLevel.APPLY: 65.0,
    BloomLevel.ANALYZE: 50.0,
    BloomLevel.EVALUATE: 40.0,
    BloomLevel.CREATE: 30.0,
}

_WORD_RE = re.compile(r"[a-z]+")
_VERSION_RE = re.compile(r"#\s*version\s*:\s*(\S+)")


@dataclass(frozen=True)
class VerbLexicon:
    """Immutable term -> (level, weight) lookup."""

    entries: dict[str, tuple[BloomLevel, float]]
    version: str = "unversioned"

    @classmethod
    def from_lines(cls, lines: Iterable[str], version: str = "unversioned") -> "VerbLexicon":
        entries: dict[str, tuple[BloomLevel, float]] = {}
        seen_at: dict[str, int] = {}
        for line_no, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _VERSION_RE.match(line)
                if m:
                    version = m.group(1)
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise LexiconFormatError(
                    f"line {line_no}: expected term<TAB>level[<TAB>weight], got {line!r}",
                    line_no,
                )
            term = parts[0].strip().lower()
            if not term:
                raise LexiconFormatError(f"line {line_no}: empty term", line_no)
            try:
                level = BloomLevel.from_label(parts[1].strip())
            except ValueError:
                raise LexiconFormatError(
                    f"line {line_no}: unknown level {parts[1].strip()!r}", line_no
                ) from None
            weight = 1.0
            if len(parts) == 3:
                try:
                    weight = float(parts[2])
                except ValueError:
                    raise LexiconFormatError(
                        f"line {line_no}: weight is not a number: {parts[2]!r}", line_no
                    ) from None
            if weight <= 0:
                raise LexiconFormatError(f"line {line_no}: weight must be > 0", line_no)
            if term in entries:
                raise LexiconFormatError(
                    f"line {line_no}: duplicate term {term!r} "
                    f"(first defined on line {seen_at[term]})",
                    line_no,
                )
            entries[term] = (level, weight)
            seen_at[term] = line_no
        if not entries:
            raise LexiconFormatError("lexicon contains no entries")
        return cls(entries=entries, version=version)

    @classmethod
    def from_file(cls, path: str | Path) -> "VerbLexicon":
        text = Path(path).read_text(encoding="utf-8")
        return cls.from_lines(text.splitlines())


_default_lexicon: VerbLexicon | None = None


def default_lexicon() -> VerbLexicon:
    """The shipped verb lexicon, loaded once per process."""
    global _default_lexicon
    if _default_lexicon is None:
        text = resources.files("bloomgate.data").joinpath("bloom_lexicon_v1.tsv").read_text("utf-8")
        _default_lexicon = VerbLexicon.from_lines(text.splitlines())
    return _default_lexicon


@dataclass(frozen=True)
class BloomProfile:
    """Normalized weight per Bloom level plus the matched lexicon evidence.

    With no lexicon hit the weights stay all-zero, ``dominant`` falls back to
    Understand, and ``low_confidence`` is set so feedback can flag the row.
    """

    weights: tuple[float, float, float, float, float, float]
    dominant: BloomLevel
    matched_terms: tuple[tuple[str, BloomLevel], ...]
    low_confidence: bool = False

    def weight(self, level: BloomLevel) -> float:
        return self.weights[level - 1]


def _token_candidates(token: str) -> list[str]:
    """Lookup candidates for one token: the raw form plus crude de-inflections.

    Suffix stripping covers -ing/-ed/-es/-s with doubled-consonant collapse
    and silent-e restoration; -ies maps back to -y. The first candidate found
    in the lexicon wins, so the order here is part of the contract.
    """
    out = [token]
    if token.endswith("ies") and len(token) >= 5:
        out.append(token[:-3] + "y")
    for suffix in ("ing", "ed", "es", "s"):
        if not token.endswith(suffix):
            continue
        base = token[: len(token) - len(suffix)]
        if len(base) < 3:
            continue
        out.append(base)
        if suffix in ("ing", "ed"):
            if len(base) >= 3 and base[-1] == base[-2]:
                out.append(base[:-1])
            out.append(base + "e")
        elif suffix == "es":
            out.append(base + "e")
    seen: set[str] = set()
    deduped = []
    for c in out:
        if c not in seen:
            seen.add(c)
            deduped.append(c)
    return deduped


def _lookup(lexicon: VerbLexicon, token: str) -> tuple[str, BloomLevel, float] | None:
    for cand in _token_candidates(token):
        hit = lexicon.entries.get(cand)
        if hit is not None:
            return cand, hit[0], hit[1]
    return None


def classify(question_text: str, lexicon: VerbLexicon | None = None) -> BloomProfile:
    """Classify a question's cognitive demand over the six Bloom levels.

    Unigrams are matched first, then bigram phrases over consecutive tokens;
    every match contributes its lexicon weight to its level, and the weight
    vector is normalized to sum to 1. Ties for the dominant level break
    toward the higher level.
    """
    if not question_text or not question_text.strip():
        raise EmptyQuestion("question text is empty")
    lexicon = lexicon or default_lexicon()

    tokens = _WORD_RE.findall(question_text.lower())
    raw = [0.0] * 6
    matched: list[tuple[str, BloomLevel]] = []

    for token in tokens:
        hit = _lookup(lexicon, token)
        if hit is not None:
            term, level, weight = hit
            raw[level - 1] += weight
            matched.append((term, level))

    for first, second in zip(tokens, tokens[1:]):
        found = None
        for c1 in _token_candidates(first):
            for c2 in _token_candidates(second):
                phrase = f"{c1} {c2}"
                hit = lexicon.entries.get(phrase)
                if hit is not None:
                    found = (phrase, hit[0], hit[1])
                    break
            if found:
                break
        if found:
            phrase, level, weight = found
            raw[level - 1] += weight
            matched.append((phrase, level))

    total = sum(raw)
    if total == 0:
        return BloomProfile(
            weights=(0.0,) * 6,
            dominant=BloomLevel.UNDERSTAND,
            matched_terms=(),
            low_confidence=True,
        )

    weights = tuple(w / total for w in raw)
    dominant = max(BloomLevel, key=lambda lv: (weights[lv - 1], lv))
    return BloomProfile(
        weights=weights,  # type: ignore[arg-type]
        dominant=dominant,
        matched_terms=tuple(matched),
    )


def bloom_subscore(profile: BloomProfile) -> float:
    """Solvability subscore in [30, 90]: dot product of the profile with the
    per-level anchors; no-hit profiles score at their fallback level."""
    if profile.low_confidence or sum(profile.weights) == 0:
        return LEVEL_SOLVABILITY[profile.dominant]
    return sum(
        profile.weights[lv - 1] * LEVEL_SOLVABILITY[lv] for lv in BloomLevel
    )
