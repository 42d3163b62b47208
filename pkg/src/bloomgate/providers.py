"""Chat and embedding providers: HTTP clients plus offline mocks.

Any backend satisfying the two HTTP contracts works:

  POST {base_url}/chat   {"system": ..., "user": ..., "model": ..., "temperature": ...}
                         -> {"text": ...}
  POST {base_url}/embed  {"texts": [...]} -> {"vectors": [[...], ...]}

Bearer tokens come from BLOOMGATE_CHAT_TOKEN / BLOOMGATE_EMBED_TOKEN.

Mock URLs select offline providers: ``mock://deterministic``, ``mock://fail``,
``mock://script?path=...`` for chat; ``mock://tf`` for embeddings.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path
from typing import Sequence
from urllib.parse import parse_qs, urlparse

import requests

from .errors import ConfigError, ProviderUnavailable
from .judge import ProviderConfig, TransportError, extract_fenced_question

CHAT_TOKEN_ENV = "BLOOMGATE_CHAT_TOKEN"
EMBED_TOKEN_ENV = "BLOOMGATE_EMBED_TOKEN"


def _auth_headers(token_env: str) -> dict[str, str]:
    import os

    token = os.environ.get(token_env, "")
    return {"Authorization": f"Bearer {token}"} if token else {}


class HttpChatProvider:
    def __init__(self, cfg: ProviderConfig):
        if not cfg.base_url:
            raise ConfigError("chat provider base_url is not configured")
        self.cfg = cfg
        self.provider_id = f"http:{cfg.base_url}:{cfg.model_name}"
        self._session = requests.Session()

    def chat(self, system: str, user: str) -> str:
        try:
            resp = self._session.post(
                self.cfg.base_url.rstrip("/") + "/chat",
                json={
                    "system": system,
                    "user": user,
                    "model": self.cfg.model_name,
                    "temperature": self.cfg.temperature,
                },
                headers=_auth_headers(CHAT_TOKEN_ENV),
                timeout=self.cfg.timeout_ms / 1000.0,
            )
            if resp.status_code >= 500:
                raise TransportError(f"chat endpoint returned {resp.status_code}")
            resp.raise_for_status()
            return str(resp.json()["text"])
        except TransportError:
            raise
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise TransportError(str(exc)) from exc


class HttpEmbeddingProvider:
    def __init__(self, base_url: str, timeout_ms: int = 30000, max_retries: int = 2):
        if not base_url:
            raise ConfigError("embedding provider base_url is not configured")
        self.base_url = base_url
        self.timeout_ms = timeout_ms
        self.max_retries = max_retries
        self.provider_id = f"http:{base_url}"
        self._session = requests.Session()

    def _embed_once(self, texts: Sequence[str]) -> list[list[float]]:
        try:
            resp = self._session.post(
                self.base_url.rstrip("/") + "/embed",
                json={"texts": list(texts)},
                headers=_auth_headers(EMBED_TOKEN_ENV),
                timeout=self.timeout_ms / 1000.0,
            )
            if resp.status_code >= 500:
                raise TransportError(f"embed endpoint returned {resp.status_code}")
            resp.raise_for_status()
            return [list(map(float, v)) for v in resp.json()["vectors"]]
        except TransportError:
            raise
        except (requests.RequestException, KeyError, ValueError, TypeError) as exc:
            raise TransportError(str(exc)) from exc

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        last: Exception | None = None
        for _ in range(self.max_retries + 1):
            try:
                return self._embed_once(texts)
            except TransportError as exc:
                last = exc
        raise ProviderUnavailable(f"embedding provider failed: {last}") from last


class TermFrequencyEmbedder:
    """Deterministic offline embedder: hashed term-frequency vectors.

    Each term maps to a fixed bucket via sha256, so embeddings are stable
    across runs and platforms.
    """

    def __init__(self, dimension: int = 4096):
        self.dimension = dimension
        self.provider_id = f"mock-tf:{dimension}"

    @staticmethod
    def bucket(term: str, dimension: int = 4096) -> int:
        digest = hashlib.sha256(term.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") % dimension

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        import re

        out = []
        for text in texts:
            vec = [0.0] * self.dimension
            for term in re.findall(r"[a-z0-9]+", text.lower()):
                vec[self.bucket(term, self.dimension)] += 1.0
            out.append(vec)
        return out


class CachingEmbedder:
    """Wraps a provider with a content-addressed cache; safe for concurrent
    readers and writers because values are deterministic per key."""

    def __init__(self, inner):
        self.inner = inner
        self.provider_id = inner.provider_id
        self._cache: dict[str, list[float]] = {}
        self._lock = threading.Lock()

    def _key(self, text: str) -> str:
        return hashlib.sha256(f"{self.provider_id}\x00{text}".encode("utf-8")).hexdigest()

    def embed(self, texts: Sequence[str]) -> list[list[float]]:
        keys = [self._key(t) for t in texts]
        with self._lock:
            missing = [(i, t) for i, (k, t) in enumerate(zip(keys, texts)) if k not in self._cache]
        if missing:
            fetched = self.inner.embed([t for _, t in missing])
            with self._lock:
                for (i, _), vec in zip(missing, fetched):
                    self._cache[keys[i]] = vec
        with self._lock:
            return [list(self._cache[k]) for k in keys]


class DeterministicChatProvider:
    """Offline judge stub scoring each question from a stable content hash."""

    provider_id = "mock-deterministic"

    def chat(self, system: str, user: str) -> str:
        question = extract_fenced_question(user) or user
        digest = hashlib.sha256(question.encode("utf-8")).digest()
        score = 30 + int.from_bytes(digest[:4], "big") % 61
        return f"AI-SOLVABILITY: {score}%\nHeuristic mock estimate."


class FailingChatProvider:
    """Chat provider that never succeeds; exercises the degradation path."""

    provider_id = "mock-fail"

    def chat(self, system: str, user: str) -> str:
        raise TransportError("scripted permanent failure")


class ScriptedChatProvider:
    """Chat provider driven by a sidecar script (``*.mock.json``).

    Script shape::

        {
          "responses": [
            {"question": "<exact question text>", "score": 85},
            {"question": "...", "reply": "free-form text", "fail_times": 2}
          ],
          "default_score": 55,      // or "default_reply"
          "fail": {"times": 2}      // or {"always": true}
        }

    ``score`` entries expand to an ``AI-SOLVABILITY: N%`` reply. Matching is
    by the exact fenced question text; unmatched questions fall back to the
    default, then to the deterministic hash stub.
    """

    provider_id = "mock-script"

    def __init__(self, script: dict):
        self._by_question: dict[str, dict] = {}
        for entry in script.get("responses", []):
            self._by_question[entry["question"]] = dict(entry)
        self._default_reply = script.get("default_reply")
        if self._default_reply is None and "default_score" in script:
            self._default_reply = f"AI-SOLVABILITY: {int(script['default_score'])}%"
        fail = script.get("fail", {})
        self._fail_always = bool(fail.get("always", False))
        self._fail_remaining = int(fail.get("times", 0))
        self._entry_fail_counts: dict[str, int] = {
            q: int(e.get("fail_times", 0)) for q, e in self._by_question.items()
        }
        self._fallback = DeterministicChatProvider()
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedChatProvider":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def chat(self, system: str, user: str) -> str:
        question = extract_fenced_question(user) or user
        with self._lock:
            if self._fail_always:
                raise TransportError("scripted permanent failure")
            if self._fail_remaining > 0:
                self._fail_remaining -= 1
                raise TransportError("scripted transient failure")
            entry = self._by_question.get(question)
            if entry is not None and self._entry_fail_counts.get(question, 0) > 0:
                self._entry_fail_counts[question] -= 1
                raise TransportError("scripted transient failure")
        if entry is not None:
            if "reply" in entry:
                return str(entry["reply"])
            return f"AI-SOLVABILITY: {int(entry['score'])}%"
        if self._default_reply is not None:
            return self._default_reply
        return self._fallback.chat(system, user)


def build_chat_provider(cfg: ProviderConfig):
    """Construct a chat provider from a base URL, honoring mock:// schemes."""
    url = urlparse(cfg.base_url)
    if url.scheme == "mock":
        kind = url.netloc or url.path.lstrip("/")
        if kind == "deterministic":
            return DeterministicChatProvider()
        if kind == "fail":
            return FailingChatProvider()
        if kind == "script":
            params = parse_qs(url.query)
            paths = params.get("path")
            if not paths:
                raise ConfigError("mock://script requires ?path=<script.json>")
            return ScriptedChatProvider.from_file(paths[0])
        raise ConfigError(f"unknown mock chat provider: {cfg.base_url!r}")
    return HttpChatProvider(cfg)


def build_embedding_provider(base_url: str, timeout_ms: int = 30000, max_retries: int = 2):
    url = urlparse(base_url)
    if url.scheme == "mock":
        kind = url.netloc or url.path.lstrip("/")
        if kind == "tf":
            return TermFrequencyEmbedder()
        raise ConfigError(f"unknown mock embedding provider: {base_url!r}")
    return HttpEmbeddingProvider(base_url, timeout_ms=timeout_ms, max_retries=max_retries)
