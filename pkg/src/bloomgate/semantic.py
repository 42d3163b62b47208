"""Semantic proximity of questions to a bank of boilerplate prompts.

High similarity to a definitional template means low conceptual originality,
which makes a question easier for generative AI to complete.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyQuestion, ZeroVector


class EmbeddingProvider(Protocol):
    provider_id: str

    def embed(self, texts: Sequence[str]) -> list[list[float]]: ...


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    values: np.ndarray
    norm: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "EmbeddingVector":
        arr = np.asarray(values, dtype=np.float64)
        arr.setflags(write=False)
        return cls(values=arr, norm=float(np.linalg.norm(arr)))

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity in [-1, 1], clamped against rounding."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions differ: {a.dimension} vs {b.dimension}")
    if a.norm == 0.0 or b.norm == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    sim = float(np.dot(a.values, b.values) / (a.norm * b.norm))
    return min(1.0, max(-1.0, sim))


@dataclass
class BoilerplateBank:
    prompts: list[str]
    version: str
    matrix: np.ndarray | None = field(default=None, repr=False)
    norms: np.ndarray | None = field(default=None, repr=False)
    _embed_lock: threading.Lock = field(
        default_factory=threading.Lock, repr=False, compare=False
    )

    def ensure_vectors(self, provider: EmbeddingProvider) -> None:
        """Embed the bank prompts once; concurrent callers share the result."""
        if self.matrix is not None:
            return
        with self._embed_lock:
            if self.matrix is not None:
                return
            raw = provider.embed(self.prompts)
            dims = {len(v) for v in raw}
            if len(dims) != 1:
                raise DimensionMismatch(f"bank vectors have mixed dimensions: {sorted(dims)}")
            matrix = np.asarray(raw, dtype=np.float64)
            matrix.setflags(write=False)
            self.norms = np.linalg.norm(matrix, axis=1)
            self.matrix = matrix

    @property
    def vectors(self) -> list[EmbeddingVector] | None:
        if self.matrix is None:
            return None
        return [EmbeddingVector.from_values(row) for row in self.matrix]

    @classmethod
    def from_file(cls, path: str | Path) -> "BoilerplateBank":
        """Load a bank file: either a bare JSON list of prompt strings or an
        object with "prompts" and optional "version"."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(data, list):
            return cls(prompts=[str(p) for p in data], version="unversioned")
        return cls(prompts=list(data["prompts"]), version=str(data.get("version", "unversioned")))


def default_bank() -> BoilerplateBank:
    data = json.loads(
        resources.files("bloomgate.data").joinpath("boilerplate_bank_v1.json").read_text("utf-8")
    )
    return BoilerplateBank(prompts=list(data["prompts"]), version=str(data["version"]))


@dataclass(frozen=True)
class SemanticFeatures:
    max_boilerplate_similarity: float
    nearest_prompt: str
    semantic_subscore: float


def semantic_features(
    question_text: str, bank: BoilerplateBank, provider: EmbeddingProvider
) -> SemanticFeatures:
    """Max cosine between the question and any bank prompt, mapped to [0, 100].

    Negative similarity counts as fully original (subscore 0).
    """
    if not question_text or not question_text.strip():
        raise EmptyQuestion("question text is empty")
    bank.ensure_vectors(provider)
    assert bank.matrix is not None and bank.norms is not None

    q = np.asarray(provider.embed([question_text])[0], dtype=np.float64)
    if bank.matrix.shape[1] != q.shape[0]:
        raise DimensionMismatch(
            f"bank dimension {bank.matrix.shape[1]} vs provider dimension {q.shape[0]}"
        )
    q_norm = float(np.linalg.norm(q))
    if q_norm == 0.0:
        # A question with no embeddable content shares nothing with the bank.
        return SemanticFeatures(
            max_boilerplate_similarity=0.0, nearest_prompt="", semantic_subscore=0.0
        )

    denom = bank.norms * q_norm
    valid = denom > 0
    sims = np.full(len(bank.prompts), -1.0)
    sims[valid] = (bank.matrix[valid] @ q) / denom[valid]
    np.clip(sims, -1.0, 1.0, out=sims)

    best_idx = int(np.argmax(sims))
    best_sim = float(sims[best_idx])
    subscore = min(100.0, 100.0 * max(0.0, best_sim))
    return SemanticFeatures(
        max_boilerplate_similarity=best_sim,
        nearest_prompt=bank.prompts[best_idx],
        semantic_subscore=subscore,
    )
