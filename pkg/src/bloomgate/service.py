"""HTTP API exposing the analysis pipeline for the web UI and LMS hooks."""

from __future__ import annotations

import os
import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import HTTPException, RequestValidationError
from fastapi.responses import JSONResponse

from . import errors
from .analytics import histogram
from .config import API_TOKEN_ENV, AppConfig
from .ingest import SourceFormat, extract_text, segment_questions
from .pipeline import AnalysisContext, analyze_document, build_context, rescore, to_record
from .store import AnalysisStore


def _api_error(code: str, message: str, status: int, detail=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(status_code=status, content=body)


_ERROR_MAP: list[tuple[type, str, int]] = [
    (errors.EmptyDocument, "BadRequest", 422),
    (errors.UnsupportedFormat, "BadRequest", 400),
    (errors.MalformedInput, "BadRequest", 400),
    (errors.NotFound, "NotFound", 404),
    (errors.ProviderUnavailable, "ProviderUnavailable", 503),
    (errors.ConfigError, "Internal", 500),
    (errors.StorageFailure, "Internal", 500),
]


def create_app(
    cfg: AppConfig | None = None,
    ctx: AnalysisContext | None = None,
    store: AnalysisStore | None = None,
) -> FastAPI:
    cfg = cfg or AppConfig()
    ctx = ctx or build_context(cfg)
    store = store or AnalysisStore(cfg.store_path)

    app = FastAPI(title="bloomgate", docs_url=None, redoc_url=None)
    app.state.ctx = ctx
    app.state.store = store
    app.state.jobs: dict[str, dict] = {}
    app.state.jobs_lock = threading.Lock()

    if cfg.cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cfg.cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(errors.BloomgateError)
    async def package_error(request: Request, exc: errors.BloomgateError):
        for klass, code, status in _ERROR_MAP:
            if isinstance(exc, klass):
                return _api_error(code, str(exc), status)
        return _api_error("BadRequest", str(exc), 400)

    @app.exception_handler(ValueError)
    @app.exception_handler(IndexError)
    async def bad_request(request: Request, exc: Exception):
        return _api_error("BadRequest", str(exc), 400)

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):
        return _api_error("Internal", str(exc), 500)

    @app.exception_handler(HTTPException)
    async def http_exc(request: Request, exc: HTTPException):
        code = "NotFound" if exc.status_code == 404 else "BadRequest"
        if exc.status_code >= 500:
            code = "Internal"
        return _api_error(code, str(exc.detail), exc.status_code)

    @app.exception_handler(RequestValidationError)
    async def validation_exc(request: Request, exc: RequestValidationError):
        return _api_error("BadRequest", "invalid request body", 400, detail=exc.errors())

    if cfg.require_auth:

        @app.middleware("http")
        async def check_auth(request: Request, call_next):
            expected = os.environ.get(API_TOKEN_ENV, "")
            supplied = request.headers.get("authorization", "")
            if not expected or supplied != f"Bearer {expected}":
                return _api_error("BadRequest", "missing or invalid bearer token", 401)
            return await call_next(request)

    def _run_and_store(doc, parent_id: Optional[str] = None) -> dict:
        outcome = analyze_document(ctx, doc)
        analysis_id = store.allocate_id(doc.id)
        record = to_record(outcome, analysis_id, parent_id=parent_id)
        store.put(record)
        return {"analysis_id": analysis_id, "report": record.report}

    async def _read_submission(request: Request) -> tuple[bytes, SourceFormat, str]:
        content_type = request.headers.get("content-type", "")
        declared = request.headers.get("content-length")
        if declared and int(declared) > cfg.max_body_bytes:
            raise errors.MalformedInput(
                f"body exceeds the {cfg.max_body_bytes} byte limit"
            )
        if content_type.startswith("multipart/"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                raise errors.MalformedInput("multipart body must include a 'file' part")
            data = await upload.read()
            suffix = os.path.splitext(upload.filename or "")[1] or ".txt"
            fmt = SourceFormat.from_suffix(suffix)
            title = str(form.get("title") or upload.filename or "untitled")
            return data, fmt, title
        payload = await request.json()
        if not isinstance(payload, dict) or "text" not in payload:
            raise errors.MalformedInput("JSON body must contain 'text'")
        text = payload["text"]
        if not isinstance(text, str):
            raise errors.MalformedInput("'text' must be a string")
        return text.encode("utf-8"), SourceFormat.PLAIN_TEXT, str(payload.get("title", "untitled"))

    @app.post("/analyses", status_code=201)
    async def post_analysis(request: Request):
        data, fmt, title = await _read_submission(request)
        if len(data) > cfg.max_body_bytes:
            raise errors.MalformedInput(f"body exceeds the {cfg.max_body_bytes} byte limit")
        doc = extract_text(data, fmt, title=title, ingested_at=ctx.now())
        questions = segment_questions(doc)

        if len(questions) <= cfg.max_questions_sync:
            return _run_and_store(doc)

        with app.state.jobs_lock:
            job_id = f"j{len(app.state.jobs) + 1:06d}"
            app.state.jobs[job_id] = {"status": "pending"}

        def work():
            try:
                result = _run_and_store(doc)
                with app.state.jobs_lock:
                    app.state.jobs[job_id] = {"status": "done", **result}
            except Exception as exc:  # surfaced via the poll endpoint
                with app.state.jobs_lock:
                    app.state.jobs[job_id] = {"status": "error", "message": str(exc)}

        threading.Thread(target=work, daemon=True).start()
        return JSONResponse(
            status_code=202,
            content={"job_id": job_id, "poll_url": f"/jobs/{job_id}"},
        )

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str):
        with app.state.jobs_lock:
            job = app.state.jobs.get(job_id)
        if job is None:
            raise errors.NotFound(f"no job with id {job_id}")
        if job["status"] == "pending":
            return JSONResponse(status_code=202, content={"status": "pending"})
        if job["status"] == "error":
            return _api_error("Internal", job["message"], 500)
        return {"analysis_id": job["analysis_id"], "report": job["report"]}

    @app.get("/analyses")
    async def list_analyses(band: Optional[str] = None, since: Optional[str] = None):
        return {"analyses": store.list_records(band=band, since=since)}

    @app.get("/analyses/{analysis_id}")
    async def get_analysis(analysis_id: str):
        record = store.get(analysis_id)
        return {
            "analysis_id": record.analysis_id,
            "parent_id": record.parent_id,
            "report": record.report,
        }

    @app.get("/analyses/{analysis_id}/lineage")
    async def get_lineage(analysis_id: str):
        chain = store.lineage(analysis_id)
        return {
            "chain": [
                {
                    "analysis_id": r.analysis_id,
                    "parent_id": r.parent_id,
                    "created_at": r.created_at,
                    "score": r.report.get("assignment", {}).get("score"),
                    "band": r.report.get("assignment", {}).get("band"),
                }
                for r in chain
            ]
        }

    @app.post("/analyses/{analysis_id}/rescore", status_code=201)
    async def post_rescore(analysis_id: str, request: Request):
        payload = await request.json()
        if not isinstance(payload, dict):
            raise errors.MalformedInput("JSON body required")
        try:
            question_index = int(payload["question_index"])
        except (KeyError, TypeError, ValueError):
            raise errors.MalformedInput("'question_index' must be an integer") from None
        new_text = payload.get("new_text")
        if not isinstance(new_text, str) or not new_text.strip():
            raise errors.MalformedInput("'new_text' must be a non-empty string")

        record = store.get(analysis_id)
        outcome, delta = rescore(ctx, record, question_index, new_text)
        new_id = store.allocate_id(outcome.document.id)
        new_record = to_record(outcome, new_id, parent_id=analysis_id)
        store.put(new_record)
        return {
            "analysis_id": new_id,
            "parent_id": analysis_id,
            "report": new_record.report,
            "delta": delta,
        }

    @app.get("/corpus/histogram")
    async def corpus_histogram():
        hist = histogram(store.assignment_scores(), ctx.cfg.band_thresholds)
        return {
            "counts": {label: count for label, count in hist.to_rows()},
            "total": hist.total,
        }

    return app
