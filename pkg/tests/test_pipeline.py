import json
from pathlib import Path

import pytest

from bloomgate.config import AppConfig
from bloomgate.ingest import SourceFormat
from bloomgate.pipeline import (
    CUSTOM_THRESHOLD_NOTICE,
    analyze_bytes,
    build_context,
    rescore,
    to_record,
)
from bloomgate.providers import FailingChatProvider, ScriptedChatProvider
from tests.conftest import FIXED_TIME

TWO_QUESTIONS = b"Q1. Define TCP.\nQ2. Design a novel congestion controller for lossy satellite links."

FIXTURES = Path(__file__).parent.parent / "fixtures"


class TestAnalyze:
    def test_two_question_document(self, mock_ctx):
        out = analyze_bytes(mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT, title="demo")
        report = out.report
        assert len(report.questions) == 2
        assert report.questions[0].text == "Define TCP."
        assert 0.0 <= report.assignment_score <= 100.0
        assert report.assignment_band.label in {"Low", "Medium", "Medium-High", "High"}
        assert report.title == "demo"
        assert report.created_at == FIXED_TIME
        assert len(out.transcripts) == 2

    def test_all_four_subscores_present_under_mock(self, mock_ctx):
        out = analyze_bytes(mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT)
        for q in out.report.questions:
            assert all(v is not None for v in q.subscores.values())
            assert q.flags == ()

    def test_deterministic_reports(self, mock_ctx):
        a = analyze_bytes(mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT, title="t")
        b = analyze_bytes(mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT, title="t")
        assert a.report.to_json() == b.report.to_json()

    def test_scripted_judge_is_used(self, mock_ctx):
        script = ScriptedChatProvider(
            {"responses": [{"question": "Define TCP.", "score": 97}], "default_score": 11}
        )
        out = analyze_bytes(
            mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT, chat_override=script
        )
        assert out.report.questions[0].subscores["judge"] == 97.0
        assert out.report.questions[1].subscores["judge"] == 11.0

    def test_judge_degradation_flags_and_redistributes(self, mock_ctx):
        out = analyze_bytes(
            mock_ctx,
            TWO_QUESTIONS,
            SourceFormat.PLAIN_TEXT,
            chat_override=FailingChatProvider(),
        )
        for q in out.report.questions:
            assert q.subscores["judge"] is None
            assert "judge-unavailable" in q.flags
            assert q.weights_used["judge"] == 0.0
            assert sum(q.weights_used.values()) == pytest.approx(1.0)
            # Remaining three signals still produce a usable verdict.
            assert 0.0 <= q.score <= 100.0
        assert "<judge-unavailable" in out.transcripts[0].raw_text

    def test_transient_judge_failures_recover(self, mock_ctx):
        script = ScriptedChatProvider(
            {
                "responses": [{"question": "Define TCP.", "score": 70, "fail_times": 2}],
                "default_score": 50,
            }
        )
        out = analyze_bytes(
            mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT, chat_override=script
        )
        assert out.report.questions[0].subscores["judge"] == 70.0
        assert out.report.questions[0].flags == ()

    def test_low_confidence_bloom_flag(self, mock_ctx):
        out = analyze_bytes(
            mock_ctx, b"The cat sat on the mat quietly.", SourceFormat.PLAIN_TEXT
        )
        assert "bloom-low-confidence" in out.report.questions[0].flags

    def test_custom_threshold_notice(self):
        cfg = AppConfig(band_thresholds=(40.0, 60.0, 80.0))
        ctx = build_context(cfg, mock=True, fixed_time=FIXED_TIME)
        out = analyze_bytes(ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT)
        assert CUSTOM_THRESHOLD_NOTICE in out.report.notices

    def test_default_config_has_no_notices(self, mock_ctx):
        out = analyze_bytes(mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT)
        assert out.report.notices == []

    def test_config_hash_stable_and_sensitive(self, mock_ctx):
        out1 = analyze_bytes(mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT)
        out2 = analyze_bytes(mock_ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT)
        assert out1.report.config_hash == out2.report.config_hash
        other = build_context(
            AppConfig(band_thresholds=(40.0, 60.0, 80.0)), mock=True, fixed_time=FIXED_TIME
        )
        out3 = analyze_bytes(other, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT)
        assert out3.report.config_hash != out1.report.config_hash


class TestRescore:
    def _record(self, ctx, chat=None):
        out = analyze_bytes(
            ctx, TWO_QUESTIONS, SourceFormat.PLAIN_TEXT, title="demo", chat_override=chat
        )
        return to_record(out, "a000001-test")

    def test_high_to_low_transition(self, mock_ctx):
        script = ScriptedChatProvider(
            {
                "responses": [
                    {"question": "Define TCP.", "score": 95},
                    {
                        "question": "Design and justify a TCP variant for lossy satellite links.",
                        "score": 5,
                    },
                ],
                "default_score": 50,
            }
        )
        record = self._record(mock_ctx, chat=script)
        assert record.report["questions"][0]["band"] == "High"

        outcome, delta = rescore(
            mock_ctx,
            record,
            0,
            "Design and justify a TCP variant for lossy satellite links.",
            chat_override=script,
        )
        assert delta["question_index"] == 0
        assert delta["old_band"] == "High"
        assert delta["new_band"] == "Low"
        assert delta["new_score"] < delta["old_score"]
        assert outcome.report.questions[0].text.startswith("Design and justify")

    def test_identical_text_rescore_is_idempotent(self, mock_ctx):
        record = self._record(mock_ctx)
        outcome, delta = rescore(mock_ctx, record, 0, "Define TCP.")
        assert delta["old_score"] == pytest.approx(delta["new_score"], abs=1e-6)
        assert delta["old_band"] == delta["new_band"]

    def test_other_questions_unaffected(self, mock_ctx):
        record = self._record(mock_ctx)
        outcome, _ = rescore(mock_ctx, record, 0, "Critique the design of NAT traversal.")
        old_q2 = record.report["questions"][1]
        new_q2 = outcome.report.questions[1]
        assert new_q2.text == old_q2["text"]
        assert new_q2.score == pytest.approx(old_q2["score"], abs=1e-6)

    def test_bad_index(self, mock_ctx):
        record = self._record(mock_ctx)
        with pytest.raises(IndexError):
            rescore(mock_ctx, record, 9, "anything")

    def test_empty_text(self, mock_ctx):
        record = self._record(mock_ctx)
        with pytest.raises(ValueError):
            rescore(mock_ctx, record, 0, "   ")


class TestCorpusFixture:
    def test_shipped_sidecars_cover_every_question(self, mock_ctx):
        from bloomgate.ingest import extract_text, segment_questions

        for txt in sorted((FIXTURES / "corpus50").glob("*.txt")):
            sidecar = json.loads(txt.with_suffix(".mock.json").read_text())
            scripted = {r["question"] for r in sidecar["responses"]}
            doc = extract_text(txt.read_bytes(), SourceFormat.PLAIN_TEXT)
            for q in segment_questions(doc):
                assert q.text in scripted, f"{txt.name}: unscripted question {q.text!r}"
