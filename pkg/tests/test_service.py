import pytest
from fastapi.testclient import TestClient

from bloomgate.config import AppConfig
from bloomgate.pipeline import build_context
from bloomgate.providers import ScriptedChatProvider
from bloomgate.service import create_app
from bloomgate.store import AnalysisStore
from tests.conftest import FIXED_TIME

TWO_QUESTIONS = "Q1. Define TCP.\nQ2. Design a novel congestion controller for lossy satellite links."

ERROR_FIELDS = {"code", "message"}
ERROR_CODES = {"BadRequest", "NotFound", "ProviderUnavailable", "Internal"}


def make_client(tmp_path, cfg=None, script=None, **cfg_kwargs):
    cfg = cfg or AppConfig(store_path=str(tmp_path / "store"), **cfg_kwargs)
    ctx = build_context(cfg, mock=True, fixed_time=FIXED_TIME)
    if script is not None:
        ctx.chat_provider = ScriptedChatProvider(script)
    store = AnalysisStore(cfg.store_path)
    app = create_app(cfg, ctx=ctx, store=store)
    return TestClient(app, raise_server_exceptions=False)


@pytest.fixture()
def client(tmp_path):
    return make_client(tmp_path)


def assert_api_error(response, code):
    body = response.json()
    assert ERROR_FIELDS <= set(body)
    assert body["code"] in ERROR_CODES
    assert body["code"] == code


class TestPostAnalyses:
    def test_json_submission(self, client):
        r = client.post("/analyses", json={"title": "demo", "text": TWO_QUESTIONS})
        assert r.status_code == 201
        body = r.json()
        assert "analysis_id" in body
        report = body["report"]
        assert len(report["questions"]) == 2
        assert report["title"] == "demo"
        assert report["assignment"]["band"] in {"Low", "Medium", "Medium-High", "High"}

    def test_multipart_submission(self, client):
        r = client.post(
            "/analyses",
            files={"file": ("quiz.txt", TWO_QUESTIONS.encode(), "text/plain")},
        )
        assert r.status_code == 201
        assert len(r.json()["report"]["questions"]) == 2

    def test_empty_file_is_422(self, client):
        r = client.post("/analyses", files={"file": ("e.txt", b"", "text/plain")})
        assert r.status_code == 422
        assert_api_error(r, "BadRequest")

    def test_whitespace_text_is_422(self, client):
        r = client.post("/analyses", json={"title": "x", "text": "  \n "})
        assert r.status_code == 422

    def test_bad_json_body_is_400(self, client):
        r = client.post("/analyses", json={"title": "x"})
        assert r.status_code == 400
        assert_api_error(r, "BadRequest")

    def test_unsupported_extension_is_400(self, client):
        r = client.post("/analyses", files={"file": ("doc.docx", b"zz", "application/x")})
        assert r.status_code == 400

    def test_oversized_body_is_400(self, tmp_path):
        client = make_client(tmp_path, max_body_bytes=64)
        r = client.post("/analyses", json={"title": "x", "text": "y" * 500})
        assert r.status_code == 400

    def test_get_after_post_round_trip(self, client):
        posted = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        fetched = client.get(f"/analyses/{posted['analysis_id']}").json()
        assert fetched["report"] == posted["report"]

    def test_repeat_post_identical_report_modulo_timestamps(self, client):
        a = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        b = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        assert a["analysis_id"] != b["analysis_id"]
        ra, rb = dict(a["report"]), dict(b["report"])
        ra.pop("created_at")
        rb.pop("created_at")
        assert ra == rb

    def test_async_path_for_large_documents(self, tmp_path):
        client = make_client(tmp_path, max_questions_sync=25)
        text = "\n".join(f"Q{i}. Define concept number {i}." for i in range(1, 27))
        r = client.post("/analyses", json={"title": "big", "text": text})
        assert r.status_code == 202
        poll_url = r.json()["poll_url"]
        assert poll_url.startswith("/jobs/")

        import time

        deadline = time.time() + 10
        while time.time() < deadline:
            poll = client.get(poll_url)
            if poll.status_code == 200:
                report = poll.json()["report"]
                assert len(report["questions"]) == 26
                break
            assert poll.status_code == 202
            time.sleep(0.05)
        else:
            pytest.fail("async job never completed")

    def test_unknown_job_is_404(self, client):
        r = client.get("/jobs/j999999")
        assert r.status_code == 404
        assert_api_error(r, "NotFound")


class TestGetAnalyses:
    def test_unknown_id_is_404(self, client):
        r = client.get("/analyses/zzz")
        assert r.status_code == 404
        assert_api_error(r, "NotFound")

    def test_listing(self, client):
        client.post("/analyses", json={"title": "a", "text": TWO_QUESTIONS})
        client.post("/analyses", json={"title": "b", "text": TWO_QUESTIONS})
        listing = client.get("/analyses").json()["analyses"]
        assert len(listing) == 2
        assert {s["title"] for s in listing} == {"a", "b"}


class TestRescore:
    SCRIPT = {
        "responses": [
            {"question": "Define TCP.", "score": 95},
            {
                "question": "Design and justify a TCP variant for lossy satellite links.",
                "score": 5,
            },
        ],
        "default_score": 50,
    }

    def test_rescore_creates_child_with_delta(self, tmp_path):
        client = make_client(tmp_path, script=self.SCRIPT)
        posted = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        assert posted["report"]["questions"][0]["band"] == "High"

        r = client.post(
            f"/analyses/{posted['analysis_id']}/rescore",
            json={
                "question_index": 0,
                "new_text": "Design and justify a TCP variant for lossy satellite links.",
            },
        )
        assert r.status_code == 201
        body = r.json()
        assert body["parent_id"] == posted["analysis_id"]
        assert body["delta"]["old_band"] == "High"
        assert body["delta"]["new_band"] == "Low"

        # The original record is untouched.
        original = client.get(f"/analyses/{posted['analysis_id']}").json()
        assert original["report"] == posted["report"]

    def test_identical_text_rescore(self, client):
        posted = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        r = client.post(
            f"/analyses/{posted['analysis_id']}/rescore",
            json={"question_index": 0, "new_text": "Define TCP."},
        )
        assert r.status_code == 201
        delta = r.json()["delta"]
        assert delta["old_score"] == pytest.approx(delta["new_score"], abs=1e-6)

    def test_lineage_after_two_rescores(self, client):
        posted = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        first = client.post(
            f"/analyses/{posted['analysis_id']}/rescore",
            json={"question_index": 0, "new_text": "Critique NAT traversal approaches."},
        ).json()
        second = client.post(
            f"/analyses/{first['analysis_id']}/rescore",
            json={"question_index": 0, "new_text": "Evaluate QUIC against TCP for mobile video."},
        ).json()
        chain = client.get(f"/analyses/{second['analysis_id']}/lineage").json()["chain"]
        assert [c["analysis_id"] for c in chain] == [
            posted["analysis_id"], first["analysis_id"], second["analysis_id"],
        ]

    def test_bad_index_is_400(self, client):
        posted = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        r = client.post(
            f"/analyses/{posted['analysis_id']}/rescore",
            json={"question_index": 41, "new_text": "x"},
        )
        assert r.status_code == 400
        assert_api_error(r, "BadRequest")

    def test_empty_text_is_400(self, client):
        posted = client.post("/analyses", json={"title": "t", "text": TWO_QUESTIONS}).json()
        r = client.post(
            f"/analyses/{posted['analysis_id']}/rescore",
            json={"question_index": 0, "new_text": "  "},
        )
        assert r.status_code == 400

    def test_rescore_unknown_id_is_404(self, client):
        r = client.post("/analyses/zzz/rescore", json={"question_index": 0, "new_text": "x"})
        assert r.status_code == 404


class TestHistogram:
    def test_empty_store(self, client):
        body = client.get("/corpus/histogram").json()
        assert body == {
            "counts": {"Low": 0, "Medium": 0, "Medium-High": 0, "High": 0},
            "total": 0,
        }

    def test_counts_after_analyses(self, client):
        client.post("/analyses", json={"title": "a", "text": TWO_QUESTIONS})
        body = client.get("/corpus/histogram").json()
        assert body["total"] == 1
        assert sum(body["counts"].values()) == 1

    def test_corpus50_distribution(self, tmp_path):
        """Seeding the store with the 50-assignment fixture reproduces the
        published band counts through the API."""
        from pathlib import Path

        from bloomgate.ingest import SourceFormat
        from bloomgate.pipeline import analyze_bytes, to_record

        cfg = AppConfig(store_path=str(tmp_path / "store"))
        ctx = build_context(cfg, mock=True, fixed_time=FIXED_TIME)
        store = AnalysisStore(cfg.store_path)
        fixture_dir = Path(__file__).parent.parent / "fixtures" / "corpus50"
        for txt in sorted(fixture_dir.glob("*.txt")):
            chat = ScriptedChatProvider.from_file(txt.with_suffix(".mock.json"))
            outcome = analyze_bytes(
                ctx, txt.read_bytes(), SourceFormat.PLAIN_TEXT,
                title=txt.stem, chat_override=chat,
            )
            store.put(to_record(outcome, store.allocate_id(txt.stem)))

        client = TestClient(create_app(cfg, ctx=ctx, store=store))
        body = client.get("/corpus/histogram").json()
        assert body["counts"] == {"Low": 4, "Medium": 16, "Medium-High": 22, "High": 8}
        assert body["total"] == 50


class TestAuth:
    def test_auth_refuses_without_token(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BLOOMGATE_API_TOKEN", "sekrit")
        client = make_client(tmp_path, require_auth=True)
        assert client.get("/analyses").status_code == 401
        ok = client.get("/analyses", headers={"Authorization": "Bearer sekrit"})
        assert ok.status_code == 200
