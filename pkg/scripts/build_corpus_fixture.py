#!/usr/bin/env python3
"""Regenerate the 50-assignment corpus fixture under fixtures/corpus50/.

Each assignment gets a .txt brief and a .mock.json sidecar scripting the
judge so the fused assignment scores reproduce the published band
distribution: 4 Low, 16 Medium, 22 Medium-High, 8 High.

The sidecar judge scores are solved from the real pipeline's local signals
(bloom, semantic, lexical), so regenerating after a formula change keeps the
distribution pinned. Run from the repository root:

    python scripts/build_corpus_fixture.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from bloomgate.bloom import bloom_subscore, classify, default_lexicon
from bloomgate.config import AppConfig
from bloomgate.fusion import band
from bloomgate.ingest import SourceFormat, extract_text, segment_questions
from bloomgate.lexical import complexity, default_seed_corpus, fit_corpus
from bloomgate.providers import CachingEmbedder, TermFrequencyEmbedder
from bloomgate.semantic import default_bank, semantic_features

ROOT = Path(__file__).resolve().parent.parent
OUT_DIR = ROOT / "fixtures" / "corpus50"

# Question pools by achievable "rest" signal (bloom + semantic + lexical
# contribution). High-band assignments need strongly definitional questions.
DEFINITIONAL = [
    "Define TCP.",
    "Define a hash table.",
    "Define deadlock.",
    "Explain the concept of virtual memory.",
    "Explain the concept of a mutex.",
    "Summarize the OSI model.",
    "List the advantages of RAID.",
    "List the advantages of database normalization.",
    "Define a finite state machine.",
    "Explain the concept of garbage collection.",
    "Summarize quicksort.",
    "Define public key cryptography.",
]
INTERMEDIATE = [
    "Explain how DNS resolution proceeds from a browser address bar to an IP address.",
    "Describe the trade-offs between optimistic and pessimistic locking in databases.",
    "Apply Dijkstra's algorithm to a weighted graph of eight nodes and report the path.",
    "Explain why TCP congestion control backs off multiplicatively after packet loss.",
    "Implement a reference-counting scheme for a small object graph and show each step.",
    "Describe how a B-tree index accelerates range queries on a large relation.",
    "Explain how two-phase commit coordinates distributed transaction participants.",
    "Apply the CAP theorem to a geo-replicated shopping cart service.",
    "Describe how cache coherence protocols keep multicore caches consistent.",
    "Explain how a compiler lowers a for loop into static single assignment form.",
]
HIGHER_ORDER = [
    "Design a rate limiter for a multi-tenant API gateway and justify every architectural choice against two realistic traffic traces.",
    "Evaluate three consensus protocols for a satellite network with intermittent links, then propose and defend a hybrid variant.",
    "Design an experiment to measure scheduler fairness regressions across kernel releases, including confounders you would control.",
    "Critique the security architecture of a peer-to-peer payment prototype supplied in the appendix and propose a hardened redesign.",
    "Design a schema migration strategy for a live multi-terabyte ledger with zero downtime, and argue for its failure-recovery path.",
    "Devise a novel cache eviction policy for bursty ecommerce workloads and defend it against LRU and LFU with your own benchmarks.",
    "Evaluate whether eventual consistency is acceptable for a hospital triage queue, and design the compensating workflow if not.",
    "Propose an intrusion detection pipeline for industrial control systems where false positives halt production lines.",
]

# Band targets: 4 Low, 16 Medium, 22 Medium-High, 8 High. Mid-band targets
# keep at least one point of margin from every boundary.
TARGETS = (
    [("Low", 40.0), ("Low", 43.0), ("Low", 45.0), ("Low", 47.5)]
    + [("Medium", 52.0 + 0.7 * i) for i in range(16)]
    + [("Medium-High", 66.0 + 0.4 * i) for i in range(22)]
    + [("High", 76.5 + 0.9 * i) for i in range(8)]
)

# Per-band question mixes: (pool, count) pairs cycled per assignment.
BAND_MIX = {
    "Low": [(HIGHER_ORDER, 4)],
    "Medium": [(HIGHER_ORDER, 1), (INTERMEDIATE, 2), (DEFINITIONAL, 1)],
    "Medium-High": [(INTERMEDIATE, 2), (DEFINITIONAL, 2)],
    "High": [(DEFINITIONAL, 4)],
}


def pick(pool: list[str], salt: int, count: int) -> list[str]:
    return [pool[(salt + j) % len(pool)] for j in range(count)]


def main() -> int:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    cfg = AppConfig()
    lexicon = default_lexicon()
    seed = default_seed_corpus()
    bank = default_bank()
    embedder = CachingEmbedder(TermFrequencyEmbedder())
    bank.ensure_vectors(embedder)
    weights = cfg.fusion_weights

    achieved = {"Low": 0, "Medium": 0, "Medium-High": 0, "High": 0}
    for n, (expected_band, target) in enumerate(TARGETS, start=1):
        salt = n * 3
        texts: list[str] = []
        for pool, count in BAND_MIX[expected_band]:
            texts += pick(pool, salt, count)

        lines = [f"Assignment {n:02d}: weekly exercise set", ""]
        lines += [f"Q{i + 1}. {t}" for i, t in enumerate(texts)]
        body = "\n".join(lines) + "\n"

        doc = extract_text(body.encode("utf-8"), SourceFormat.PLAIN_TEXT)
        questions = segment_questions(doc)
        model = fit_corpus([q.text for q in questions] + seed)

        responses = []
        fused_values = []
        for q in questions:
            profile = classify(q.text, lexicon)
            rest = (
                weights.bloom * bloom_subscore(profile)
                + weights.semantic * semantic_features(q.text, bank, embedder).semantic_subscore
                + weights.lexical * complexity(q.text, model).lexical_subscore
            )
            judge = round((target - rest) / weights.judge)
            judge = min(100, max(0, judge))
            responses.append({"question": q.text, "score": judge})
            fused_values.append(weights.judge * judge + rest)

        score = sum(fused_values) / len(fused_values)
        got_band = band(score).label
        if got_band != expected_band:
            print(
                f"assignment {n}: wanted {expected_band} (target {target}), "
                f"got {got_band} at {score:.2f}",
                file=sys.stderr,
            )
            return 1
        achieved[got_band] += 1

        stem = f"assignment_{n:02d}"
        (OUT_DIR / f"{stem}.txt").write_text(body, encoding="utf-8", newline="\n")
        sidecar = {"version": 1, "responses": responses}
        (OUT_DIR / f"{stem}.mock.json").write_text(
            json.dumps(sidecar, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
            newline="\n",
        )

    print(f"wrote 50 assignments to {OUT_DIR}")
    print("band counts:", achieved)
    assert achieved == {"Low": 4, "Medium": 16, "Medium-High": 22, "High": 8}
    return 0


if __name__ == "__main__":
    sys.exit(main())
