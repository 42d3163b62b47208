"""Document ingestion: text extraction, normalization, question segmentation."""

from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from . import pdftext
from .errors import EmptyDocument, MalformedInput, UnsupportedFormat


class SourceFormat(enum.Enum):
    PLAIN_TEXT = "text"
    MARKDOWN = "markdown"
    PDF = "pdf"

    @classmethod
    def from_suffix(cls, suffix: str) -> "SourceFormat":
        mapping = {".txt": cls.PLAIN_TEXT, ".md": cls.MARKDOWN, ".pdf": cls.PDF}
        try:
            return mapping[suffix.lower()]
        except KeyError:
            raise UnsupportedFormat(f"unsupported input extension: {suffix!r}") from None


@dataclass(frozen=True)
class AssessmentDocument:
    id: str
    title: str
    source_format: SourceFormat
    raw_text: str
    ingested_at: datetime


@dataclass(frozen=True)
class Question:
    index: int
    text: str
    char_span: tuple[int, int]
    detected_marker: Optional[str] = None


_BLANK_RUN_RE = re.compile(r"\n[ ]*\n(?:[ ]*\n)+")


def normalize_text(text: str) -> str:
    """Canonical form: BOM stripped, LF endings, tabs to single spaces, runs
    of more than two blank lines collapsed to two."""
    if text.startswith("﻿"):
        text = text[1:]
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    text = text.replace("\t", " ")
    text = _BLANK_RUN_RE.sub("\n\n", text)
    return text


def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


def extract_text(
    data: bytes,
    source_format: SourceFormat,
    title: str = "",
    doc_id: str | None = None,
    ingested_at: datetime | None = None,
) -> AssessmentDocument:
    """Decode an input byte stream into a normalized AssessmentDocument.

    PDF page texts are concatenated in page order, separated by one blank
    line. The document id defaults to a hash of the normalized text, so
    identical content always gets the same id.
    """
    if not isinstance(source_format, SourceFormat):
        raise UnsupportedFormat(f"unknown source format: {source_format!r}")
    if not data:
        raise EmptyDocument("empty input stream")

    if source_format is SourceFormat.PDF:
        try:
            pages = pdftext.extract_page_texts(data)
        except pdftext.PdfExtractionError as exc:
            raise MalformedInput(f"unparseable PDF: {exc}") from exc
        text = "\n\n".join(page.replace("\f", "") for page in pages)
    else:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput(f"input is not valid UTF-8: {exc}") from exc

    raw_text = normalize_text(text)
    if not raw_text.strip():
        raise EmptyDocument("no extractable text")

    if doc_id is None:
        doc_id = hashlib.sha256(raw_text.encode("utf-8")).hexdigest()[:12]
    return AssessmentDocument(
        id=doc_id,
        title=title or "untitled",
        source_format=source_format,
        raw_text=raw_text,
        ingested_at=ingested_at or datetime.now(timezone.utc),
    )


# Numbering markers recognized at line starts, e.g. "1.", "2)", "Q3", "Question 4:",
# "Task 5", "(a)". The marker token itself is stripped from the question text.
_MARKER_RE = re.compile(
    r"""^[ ]{0,3}
        (?:
            (?:question|q)\s*\d{1,3}[.):]?
          | task\s+\d{1,3}[.):]?
          | \d{1,3}[.)]
          | \([a-z0-9]{1,3}\)
        )
        (?=\s|$)
    """,
    re.IGNORECASE | re.VERBOSE,
)


def _find_markers(raw_text: str) -> list[tuple[int, int, str]]:
    """(line_start, content_start, marker_token) for every marker line."""
    markers = []
    offset = 0
    for line in raw_text.split("\n"):
        m = _MARKER_RE.match(line)
        if m:
            markers.append((offset, offset + m.end(), m.group(0).strip()))
        offset += len(line) + 1
    return markers


def segment_questions(doc: AssessmentDocument) -> list[Question]:
    """Split a document into questions.

    Priority: explicit numbering markers, then lines ending in "?", then the
    whole document as a single question. At least one question is always
    returned.
    """
    raw = doc.raw_text
    questions: list[Question] = []

    markers = _find_markers(raw)
    if markers:
        for i, (line_start, content_start, token) in enumerate(markers):
            end = markers[i + 1][0] if i + 1 < len(markers) else len(raw)
            text = _collapse_ws(raw[content_start:end])
            if not text:
                continue
            questions.append(
                Question(
                    index=len(questions),
                    text=text,
                    char_span=(content_start, end),
                    detected_marker=token,
                )
            )
        if questions:
            return questions

    offset = 0
    for line in raw.split("\n"):
        if line.rstrip().endswith("?"):
            stripped = _collapse_ws(line)
            if stripped:
                questions.append(
                    Question(
                        index=len(questions),
                        text=stripped,
                        char_span=(offset, offset + len(line)),
                        detected_marker=None,
                    )
                )
        offset += len(line) + 1
    if questions:
        return questions

    return [
        Question(
            index=0,
            text=_collapse_ws(raw),
            char_span=(0, len(raw)),
            detected_marker=None,
        )
    ]
