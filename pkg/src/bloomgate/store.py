"""Append-only analysis store: canonical JSON record files plus an index.

Records are immutable once written; a rescore creates a new record whose
``parent_id`` points at its ancestor, so edit history is auditable.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import DuplicateId, NotFound, StorageFailure

_INDEX_FILE = "index.json"
_RECORDS_DIR = "records"


@dataclass(frozen=True)
class JudgeTranscript:
    question_index: int
    prompt: str
    raw_text: str


@dataclass(frozen=True)
class AnalysisRecord:
    analysis_id: str
    report: dict  # report JSON schema, see feedback.AnalysisReport.to_json_dict
    raw_text: str
    source_format: str
    created_at: str
    raw_judge_transcripts: tuple[JudgeTranscript, ...] = ()
    parent_id: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "analysis_id": self.analysis_id,
            "parent_id": self.parent_id,
            "created_at": self.created_at,
            "source_format": self.source_format,
            "raw_text": self.raw_text,
            "report": self.report,
            "raw_judge_transcripts": [
                {"question_index": t.question_index, "prompt": t.prompt, "raw_text": t.raw_text}
                for t in self.raw_judge_transcripts
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisRecord":
        return cls(
            analysis_id=data["analysis_id"],
            parent_id=data.get("parent_id"),
            created_at=data["created_at"],
            source_format=data["source_format"],
            raw_text=data["raw_text"],
            report=data["report"],
            raw_judge_transcripts=tuple(
                JudgeTranscript(
                    question_index=t["question_index"],
                    prompt=t["prompt"],
                    raw_text=t["raw_text"],
                )
                for t in data.get("raw_judge_transcripts", [])
            ),
        )


def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(content, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


class AnalysisStore:
    """Single-writer, multi-reader store rooted at a directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.records_dir = self.root / _RECORDS_DIR
        self.records_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index: dict[str, str] = {}
        index_path = self.root / _INDEX_FILE
        if index_path.exists():
            try:
                self._index = json.loads(index_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise StorageFailure(f"corrupt store index: {exc}") from exc

    def allocate_id(self, content_hint: str = "") -> str:
        """Sequential id, optionally salted with a content hash for readability."""
        with self._lock:
            seq = len(self._index) + 1
            suffix = hashlib.sha256(content_hint.encode("utf-8")).hexdigest()[:8]
            candidate = f"a{seq:06d}-{suffix}"
            while candidate in self._index:
                seq += 1
                candidate = f"a{seq:06d}-{suffix}"
            return candidate

    def put(self, record: AnalysisRecord) -> str:
        with self._lock:
            if record.analysis_id in self._index:
                raise DuplicateId(f"analysis id already stored: {record.analysis_id}")
            if record.parent_id is not None and record.parent_id not in self._index:
                raise NotFound(f"parent analysis not found: {record.parent_id}")
            filename = f"{record.analysis_id}.json"
            try:
                _atomic_write(self.records_dir / filename, _canonical_json(record.to_dict()))
                self._index[record.analysis_id] = filename
                _atomic_write(self.root / _INDEX_FILE, _canonical_json(self._index))
            except OSError as exc:
                raise StorageFailure(f"could not persist record: {exc}") from exc
        return record.analysis_id

    def get(self, analysis_id: str) -> AnalysisRecord:
        filename = self._index.get(analysis_id)
        if filename is None:
            raise NotFound(f"no analysis with id {analysis_id}")
        path = self.records_dir / filename
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageFailure(f"could not read record {analysis_id}: {exc}") from exc
        return AnalysisRecord.from_dict(data)

    def list_records(self, band: str | None = None, since: str | None = None) -> list[dict]:
        """Summaries of all records, oldest first, optionally filtered by band
        and/or an ISO lower bound on created_at."""
        summaries = []
        for analysis_id in sorted(self._index):
            record = self.get(analysis_id)
            assignment = record.report.get("assignment", {})
            summary = {
                "analysis_id": record.analysis_id,
                "title": record.report.get("title", ""),
                "created_at": record.created_at,
                "parent_id": record.parent_id,
                "score": assignment.get("score"),
                "band": assignment.get("band"),
                "question_count": len(record.report.get("questions", [])),
            }
            if band is not None and summary["band"] != band:
                continue
            if since is not None and record.created_at < since:
                continue
            summaries.append(summary)
        return summaries

    def lineage(self, analysis_id: str) -> list[AnalysisRecord]:
        """Ancestor chain in creation order, root first, ending at the record."""
        chain: list[AnalysisRecord] = []
        seen: set[str] = set()
        current: Optional[str] = analysis_id
        while current is not None:
            if current in seen:
                raise StorageFailure(f"lineage cycle detected at {current}")
            seen.add(current)
            record = self.get(current)
            chain.append(record)
            current = record.parent_id
        chain.reverse()
        return chain

    def assignment_scores(self) -> list[float]:
        scores = []
        for analysis_id in sorted(self._index):
            record = self.get(analysis_id)
            score = record.report.get("assignment", {}).get("score")
            if score is not None:
                scores.append(float(score))
        return scores

    def __len__(self) -> int:
        return len(self._index)
