"""HTTP surface for the session store.

Kept separate from the store itself so the web framework is only imported
when an application is actually built, and deliberately written without
deferred annotation evaluation: the request models below are resolved at
route-registration time.
"""

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .service import ServiceError, SessionStore


class CreateSession(BaseModel):
    session_id: str | None = None
    seed: int = 0
    battery: dict | None = None


class RegisterSubject(BaseModel):
    subject_id: str | None = None


class SubmitChoice(BaseModel):
    token: str
    part: int
    screen: str
    pair: str | None = None
    chosen: str


class Finalize(BaseModel):
    token: str
    seed: int | None = None


def build_app(store: SessionStore) -> FastAPI:
    """Wire the store's operations to HTTP routes."""
    app = FastAPI(title="risklab session service")

    # the browser client is typically served from a different origin than
    # the service; auth is per-subject bearer tokens, not cookies, so a
    # permissive policy leaks nothing
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ServiceError)
    async def _service_error(_request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": exc.code, "message": exc.message},
        )

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSession):
        return store.create_session(body.session_id, body.seed, body.battery)

    @app.post("/sessions/{session_id}/subjects", status_code=201)
    def register_subject(session_id: str, body: RegisterSubject):
        return store.register_subject(session_id, body.subject_id)

    @app.get("/sessions/{session_id}/subjects/{subject_id}/next")
    def next_step(session_id: str, subject_id: str):
        return store.next_step(session_id, subject_id)

    @app.post("/sessions/{session_id}/subjects/{subject_id}/choices")
    def submit_choice(session_id: str, subject_id: str, body: SubmitChoice):
        return store.submit_choice(
            session_id, subject_id, body.token, body.part, body.screen, body.pair, body.chosen
        )

    @app.post("/sessions/{session_id}/subjects/{subject_id}/finalize")
    def finalize(session_id: str, subject_id: str, body: Finalize):
        return store.finalize_subject(session_id, subject_id, body.token, body.seed)

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, format: str = "csv"):
        text = store.export_text(session_id, format)
        media = "text/csv" if format == "csv" else "application/x-ndjson"
        return PlainTextResponse(text, media_type=media)

    @app.get("/sessions/{session_id}/dashboard")
    def dashboard(session_id: str):
        return store.dashboard(session_id)

    @app.post("/sessions/{session_id}/close")
    def close_session(session_id: str):
        return store.close_session(session_id)

    return app
