"""HTTP facade over the session orchestrator.

Every endpoint wraps exactly one orchestrator operation and adds no behavior
of its own. Domain errors map to a machine-readable error body; stack traces
never reach the wire.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterator, Mapping

from fastapi import FastAPI, Query, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response, StreamingResponse

from codeedu.errors import (
    CodeEduError,
    EmptyRequestError,
    MissingIntakeFieldError,
    NothingToReportError,
    PhaseError,
    SessionError,
    StepOrderError,
    TurnLimitReachedError,
    UnknownExerciseError,
)
from codeedu.session.orchestrator import Session, SessionOrchestrator

DEFAULT_BIND_ADDR = "127.0.0.1:8000"


class UnknownSessionError(CodeEduError):
    """Request referenced a session id this server never issued."""


# (error class, api code, http status) — first isinstance match wins, so
# subclasses must precede their bases.
ERROR_MAP: tuple[tuple[type[Exception], str, int], ...] = (
    (MissingIntakeFieldError, "bad_request", 400),
    (EmptyRequestError, "bad_request", 400),
    (TurnLimitReachedError, "turn_limit", 429),
    (UnknownSessionError, "not_found", 404),
    (UnknownExerciseError, "not_found", 404),
    (StepOrderError, "conflict", 409),
    (PhaseError, "conflict", 409),
    (NothingToReportError, "conflict", 409),
    (SessionError, "conflict", 409),
    (CodeEduError, "internal", 500),
)


def api_error_body(code: str, message: str, detail: Any = None) -> dict:
    error: dict[str, Any] = {"code": code, "message": message}
    if detail is not None:
        error["detail"] = detail
    return {"error": error}


def _error_response(code: str, status: int, message: str, detail: Any = None) -> JSONResponse:
    return JSONResponse(status_code=status, content=api_error_body(code, message, detail))


def classify_error(exc: Exception) -> tuple[str, int]:
    for klass, code, status in ERROR_MAP:
        if isinstance(exc, klass):
            return code, status
    return "internal", 500


def _frame(sequence_number: int, record) -> str:
    payload = json.dumps(
        {
            "sequence_number": sequence_number,
            "event": {"ts": record.ts, "kind": record.kind, "payload": record.payload},
        },
        sort_keys=True,
    )
    return f"id: {sequence_number}\ndata: {payload}\n\n"


def create_app(orchestrator: SessionOrchestrator) -> FastAPI:
    app = FastAPI(title="codeedu", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    app.state.orchestrator = orchestrator
    app.state.sessions = sessions

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error_response(
            "bad_request", 400, "invalid request body", detail=jsonable_encoder(exc.errors())
        )

    @app.exception_handler(CodeEduError)
    async def on_domain_error(request: Request, exc: CodeEduError):
        code, status = classify_error(exc)
        return _error_response(code, status, str(exc))

    @app.exception_handler(Exception)
    async def on_unexpected_error(request: Request, exc: Exception):
        # machine-readable body only; the traceback stays server-side
        return _error_response("internal", 500, f"{type(exc).__name__}: {exc}")

    def require_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"no such session: {session_id}")
        return session

    def descriptor(session: Session) -> dict:
        return {
            "session_id": session.session_id,
            "phase": session.phase.value,
            "turn_count": session.turn_count,
            "max_turns": session.max_turns,
            "has_material": session.material is not None,
            "exercises": sorted(session.exercises),
            "current_steps": dict(session.current_steps),
            "has_report": session.report is not None,
            "event_count": len(session.events),
        }

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict) -> dict:
        session = orchestrator.start_session(payload)
        sessions[session.session_id] = session
        return descriptor(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return descriptor(require_session(session_id))

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, payload: dict) -> dict:
        session = require_session(session_id)
        text = payload.get("text")
        if not isinstance(text, str):
            raise EmptyRequestError("message body needs a string 'text' field")
        answer = orchestrator.answer_question(session, text)
        last = session.events.records[-1]
        return {
            "answer": answer,
            "turn_count": session.turn_count,
            "needs_user_input": bool(last.payload.get("needs_user_input", False)),
        }

    @app.post("/sessions/{session_id}/material")
    def post_material(session_id: str, payload: dict | None = None) -> dict:
        session = require_session(session_id)
        topic = (payload or {}).get("topic")
        material = orchestrator.generate_material(session, topic=topic)
        return {
            "topic": material.topic,
            "generated_for": material.generated_for,
            "sections": [
                {
                    "heading": s.heading,
                    "body": s.body,
                    "source_refs": list(s.source_refs),
                }
                for s in material.sections
            ],
        }

    @app.post("/sessions/{session_id}/exercises")
    def post_exercise(session_id: str, payload: dict | None = None) -> dict:
        # body is accepted but unused: the orchestrator picks the exercise
        # that matches the student's preferred topics
        session = require_session(session_id)
        exercise = orchestrator.begin_exercise(session)
        return {
            "exercise_id": exercise.exercise_id,
            "statement": exercise.statement,
            "topics": list(exercise.topics),
            "current_step": session.current_steps[exercise.exercise_id],
            "steps": [
                {
                    "index": i,
                    "prompt": step.prompt,
                    "hint": step.hint,
                    "case_count": len(step.cases),
                }
                for i, step in enumerate(exercise.steps)
            ],
        }

    @app.post("/sessions/{session_id}/exercises/{exercise_id}/submissions")
    def post_submission(session_id: str, exercise_id: str, payload: dict) -> dict:
        session = require_session(session_id)
        step_index = payload.get("step_index")
        source = payload.get("source")
        if not isinstance(step_index, int) or not isinstance(source, str):
            raise EmptyRequestError(
                "submission body needs integer 'step_index' and string 'source'"
            )
        feedback = orchestrator.submit_code(session, exercise_id, step_index, source)
        return {
            "exercise_id": exercise_id,
            "step_index": step_index,
            "verdicts": list(feedback.verdict.verdicts),
            "passed_count": feedback.verdict.passed_count,
            "case_count": len(feedback.verdict.case_results),
            "all_passed": feedback.verdict.all_passed,
            "suggestions": list(feedback.suggestions),
            "next_action": feedback.next_action,
            "turn_count": session.turn_count,
            "current_step": session.current_steps.get(exercise_id),
        }

    @app.post("/sessions/{session_id}/report")
    def post_report(session_id: str) -> dict:
        session = require_session(session_id)
        report = orchestrator.generate_report(session)
        return {
            "phase": session.phase.value,
            "filename": report.path.name,
            "size_bytes": len(report.content.encode("utf-8")),
        }

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str) -> Response:
        session = require_session(session_id)
        if session.report is None:
            return _error_response("not_found", 404, "report not generated yet")
        return Response(
            content=session.report.path.read_bytes(),
            media_type="text/markdown; charset=utf-8",
            headers={
                "Content-Disposition": (
                    f'attachment; filename="report-{session.session_id}.md"'
                )
            },
        )

    @app.get("/sessions/{session_id}/events")
    def stream_events(
        session_id: str,
        from_sequence: int = Query(default=0, alias="from", ge=0),
        follow: int = Query(default=1),
    ) -> StreamingResponse:
        session = require_session(session_id)

        def frames() -> Iterator[str]:
            seen = 0
            while True:
                records = session.events.records
                while seen < len(records):
                    seen += 1
                    if seen >= max(from_sequence, 1):
                        yield _frame(seen, records[seen - 1])
                if not follow:
                    return
                if not session.events.wait_for_more(seen, timeout=0.5):
                    yield ": keep-alive\n\n"

        return StreamingResponse(frames(), media_type="text/event-stream")

    return app


def bind_address(env: Mapping[str, str] | None = None) -> tuple[str, int]:
    source = os.environ if env is None else env
    raw = source.get("CODEEDU_BIND_ADDR", DEFAULT_BIND_ADDR)
    host, _, port = raw.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(
            f"CODEEDU_BIND_ADDR must look like host:port, got {raw!r}"
        )
    return host, int(port)


def workspace_root(env: Mapping[str, str] | None = None) -> str:
    source = os.environ if env is None else env
    return source.get("CODEEDU_WORKSPACE_ROOT", "./workspace")
