"""Contract tests for the HTTP facade.

The API wraps the session orchestrator one-to-one: every endpoint delegates
to exactly one orchestrator operation, each domain error maps to one status
code and machine-readable body, and the event stream replays the session
log gap-free from any starting sequence number.
"""

from __future__ import annotations

import json
import threading
import time
from contextlib import contextmanager
from pathlib import Path

import httpx
import pytest
import uvicorn
from fastapi.testclient import TestClient
from support import (
    fixed_clock,
    mock_bindings,
    strings_exercise,
    sum_exercise,
    universal_gateway,
    workspace,
)

from codeedu.api.app import bind_address, create_app, workspace_root
from codeedu.llm.mock import FixtureEntry
from codeedu.session.events import EventLog
from codeedu.session.orchestrator import Session, SessionOrchestrator
from codeedu.session.types import (
    Feedback,
    LearningMaterial,
    LearningReport,
    MaterialSection,
    SessionPhase,
    StudentProfile,
)
from codeedu.tools.judge import CaseResult, TestReport

INTAKE = {
    "background": "first-year student, some scripting",
    "goals": "get comfortable with Python basics",
    "self_reported_level": "low",
    "preferred_topics": ["basics"],
}

SUM_SOLUTION = "a, b = input().split()\nprint(int(a) + int(b))\n"


def make_client(tmp_path: Path, gateway=None, raise_server_exceptions: bool = True, **orch_kwargs):
    orchestrator = SessionOrchestrator(
        gateway=gateway or universal_gateway(),
        bindings=mock_bindings(),
        workspace_root=workspace(tmp_path),
        exercise_bank=(sum_exercise(), strings_exercise()),
        clock=fixed_clock,
        **orch_kwargs,
    )
    client = TestClient(create_app(orchestrator), raise_server_exceptions=raise_server_exceptions)
    return client, orchestrator


def create_session(client: TestClient) -> str:
    response = client.post("/sessions", json=INTAKE)
    assert response.status_code == 201
    return response.json()["session_id"]


def assert_error(response, status: int, code: str) -> dict:
    assert response.status_code == status
    body = response.json()
    assert set(body) == {"error"}
    error = body["error"]
    assert error["code"] == code
    assert isinstance(error["message"], str) and error["message"]
    return error


def parse_frames(text: str) -> list[dict]:
    frames = []
    for block in text.split("\n\n"):
        lines = [line for line in block.splitlines() if line]
        if not lines or lines[0].startswith(":"):
            continue
        fields = {}
        for line in lines:
            key, _, value = line.partition(": ")
            fields[key] = value
        frames.append({"id": int(fields["id"]), "data": json.loads(fields["data"])})
    return frames


# --- session creation and lookup ---


def test_create_session_returns_descriptor(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    response = client.post("/sessions", json=INTAKE)
    assert response.status_code == 201
    body = response.json()
    assert body["phase"] == "studying"
    assert body["turn_count"] == 0
    assert body["max_turns"] == 20
    assert body["has_material"] is False
    assert body["exercises"] == []
    assert body["current_steps"] == {}
    assert body["has_report"] is False
    assert body["event_count"] == 1  # the intake event
    assert isinstance(body["session_id"], str) and body["session_id"]

    echo = client.get(f"/sessions/{body['session_id']}")
    assert echo.status_code == 200
    assert echo.json() == body


def test_two_creates_get_distinct_ids(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    first = create_session(client)
    second = create_session(client)
    assert first != second


def test_missing_intake_field_maps_to_bad_request(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    response = client.post("/sessions", json={"background": "x"})
    error = assert_error(response, 400, "bad_request")
    assert "goals" in error["message"]


def test_malformed_bodies_map_to_400_not_422(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    no_body = client.post("/sessions")
    assert_error(no_body, 400, "bad_request")

    not_json = client.post("/sessions", content=b"not json", headers={"content-type": "application/json"})
    assert_error(not_json, 400, "bad_request")

    not_a_dict = client.post("/sessions", json=[1, 2, 3])
    assert_error(not_a_dict, 400, "bad_request")

    session_id = create_session(client)
    bad_query = client.get(f"/sessions/{session_id}/events?from=-1&follow=0")
    assert_error(bad_query, 400, "bad_request")


def test_unknown_session_is_404_everywhere(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    attempts = [
        ("get", "/sessions/nope", None),
        ("post", "/sessions/nope/messages", {"text": "hi"}),
        ("post", "/sessions/nope/material", {}),
        ("post", "/sessions/nope/exercises", {}),
        ("post", "/sessions/nope/exercises/e1/submissions", {"step_index": 0, "source": "x"}),
        ("post", "/sessions/nope/report", None),
        ("get", "/sessions/nope/report", None),
        ("get", "/sessions/nope/events?follow=0", None),
    ]
    for method, url, body in attempts:
        response = getattr(client, method)(url, json=body) if method == "post" else client.get(url)
        error = assert_error(response, 404, "not_found")
        assert "nope" in error["message"]


# --- messages ---


def test_message_answers_and_counts_turns(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    response = client.post(f"/sessions/{session_id}/messages", json={"text": "What is a list?"})
    assert response.status_code == 200
    body = response.json()
    assert body == {"answer": "Scripted answer.", "turn_count": 1, "needs_user_input": False}

    descriptor = client.get(f"/sessions/{session_id}").json()
    assert descriptor["turn_count"] == 1
    assert descriptor["event_count"] == 3  # intake, question, answer


def test_message_needs_user_input_flag(tmp_path: Path) -> None:
    clarify = FixtureEntry(
        matcher="Task (tutoring_qa)",
        response=json.dumps({"ask_user": "Which part is unclear?"}),
        max_uses=None,
    )
    client, _ = make_client(tmp_path, gateway=universal_gateway([clarify]))
    session_id = create_session(client)
    body = client.post(f"/sessions/{session_id}/messages", json={"text": "help"}).json()
    assert body["answer"] == "Which part is unclear?"
    assert body["needs_user_input"] is True


def test_message_body_shape_is_checked(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    for bad in ({}, {"text": 7}, {"text": None}):
        response = client.post(f"/sessions/{session_id}/messages", json=bad)
        assert_error(response, 400, "bad_request")
    blank = client.post(f"/sessions/{session_id}/messages", json={"text": "   "})
    assert_error(blank, 400, "bad_request")


def test_turn_limit_maps_to_429(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path, max_turns=2)
    session_id = create_session(client)
    for _ in range(2):
        assert client.post(f"/sessions/{session_id}/messages", json={"text": "hi"}).status_code == 200
    response = client.post(f"/sessions/{session_id}/messages", json={"text": "hi"})
    assert_error(response, 429, "turn_limit")
    assert client.get(f"/sessions/{session_id}").json()["turn_count"] == 2


# --- material ---


def test_material_endpoint_returns_sections(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    response = client.post(f"/sessions/{session_id}/material", json={"topic": "loops"})
    assert response.status_code == 200
    body = response.json()
    assert body["topic"] == "loops"
    assert body["generated_for"] == INTAKE["background"]  # personalization record
    assert body["sections"] == [
        {"heading": "Basics", "body": "Body text about the topic.", "source_refs": ["model-internal"]}
    ]
    assert client.get(f"/sessions/{session_id}").json()["has_material"] is True


# --- exercises and submissions ---


def test_begin_exercise_hides_expected_outputs(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    response = client.post(f"/sessions/{session_id}/exercises", json={})
    assert response.status_code == 200
    body = response.json()
    assert body["exercise_id"] == "sum-two"  # matches the profile's preferred topic
    assert body["statement"]
    assert body["topics"] == ["basics", "arithmetic"]
    assert body["current_step"] == 0
    assert [step["index"] for step in body["steps"]] == [0, 1]
    for step in body["steps"]:
        assert set(step) == {"index", "prompt", "hint", "case_count"}
        assert step["case_count"] == 2
    assert "expected_output" not in response.text


def test_submission_grades_and_advances(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    client.post(f"/sessions/{session_id}/exercises", json={})
    response = client.post(
        f"/sessions/{session_id}/exercises/sum-two/submissions",
        json={"step_index": 0, "source": SUM_SOLUTION},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["verdicts"] == [True, True]
    assert body["passed_count"] == 2
    assert body["case_count"] == 2
    assert body["all_passed"] is True
    assert body["suggestions"] == ["Check the output format."]
    assert body["next_action"] == "advance_step"
    assert body["turn_count"] == 1
    assert body["current_step"] == 1


def test_submission_errors_map_by_kind(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)

    # studying phase: submissions are a phase conflict
    early = client.post(
        f"/sessions/{session_id}/exercises/sum-two/submissions",
        json={"step_index": 0, "source": "x"},
    )
    assert_error(early, 409, "conflict")

    client.post(f"/sessions/{session_id}/exercises", json={})

    unknown = client.post(
        f"/sessions/{session_id}/exercises/ghost/submissions",
        json={"step_index": 0, "source": "x"},
    )
    assert_error(unknown, 404, "not_found")

    out_of_order = client.post(
        f"/sessions/{session_id}/exercises/sum-two/submissions",
        json={"step_index": 1, "source": "x"},
    )
    assert_error(out_of_order, 409, "conflict")

    bad_shape = client.post(
        f"/sessions/{session_id}/exercises/sum-two/submissions",
        json={"step_index": "0", "source": "x"},
    )
    assert_error(bad_shape, 400, "bad_request")

    # none of the failures consumed a turn
    assert client.get(f"/sessions/{session_id}").json()["turn_count"] == 0


def test_begin_exercise_without_bank_is_conflict(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    # overwrite the bank: build a second app whose orchestrator has none
    orchestrator = SessionOrchestrator(
        gateway=universal_gateway(),
        bindings=mock_bindings(),
        workspace_root=workspace(tmp_path) / "bare",
        exercise_bank=(),
        clock=fixed_clock,
    )
    bare = TestClient(create_app(orchestrator))
    session_id = bare.post("/sessions", json=INTAKE).json()["session_id"]
    response = bare.post(f"/sessions/{session_id}/exercises", json={})
    assert_error(response, 409, "conflict")


# --- report ---


def test_report_roundtrip(tmp_path: Path) -> None:
    client, orchestrator = make_client(tmp_path)
    session_id = create_session(client)

    before = client.get(f"/sessions/{session_id}/report")
    assert_error(before, 404, "not_found")

    client.post(f"/sessions/{session_id}/material", json={})
    client.post(f"/sessions/{session_id}/messages", json={"text": "What is a loop?"})

    created = client.post(f"/sessions/{session_id}/report")
    assert created.status_code == 200
    meta = created.json()
    assert meta["phase"] == "reporting"
    assert meta["filename"].endswith(".md")
    assert meta["size_bytes"] > 0

    download = client.get(f"/sessions/{session_id}/report")
    assert download.status_code == 200
    assert download.headers["content-type"].startswith("text/markdown")
    assert download.headers["content-disposition"] == f'attachment; filename="report-{session_id}.md"'

    session = orchestrator.get_session(session_id)
    assert download.content == session.report.path.read_bytes()
    assert len(download.content) == meta["size_bytes"]

    again = client.get(f"/sessions/{session_id}/report")
    assert again.content == download.content

    # a second generation attempt conflicts with the reporting phase
    assert_error(client.post(f"/sessions/{session_id}/report"), 409, "conflict")


def test_report_without_activity_is_conflict(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    response = client.post(f"/sessions/{session_id}/report")
    assert_error(response, 409, "conflict")


# --- event stream ---


def test_event_replay_is_gap_free(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    client.post(f"/sessions/{session_id}/messages", json={"text": "one"})
    client.post(f"/sessions/{session_id}/messages", json={"text": "two"})

    response = client.get(f"/sessions/{session_id}/events?from=0&follow=0")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/event-stream")
    frames = parse_frames(response.text)
    assert [f["id"] for f in frames] == [1, 2, 3, 4, 5]
    assert [f["data"]["sequence_number"] for f in frames] == [1, 2, 3, 4, 5]
    kinds = [f["data"]["event"]["kind"] for f in frames]
    assert kinds == ["intake", "question", "answer", "question", "answer"]
    assert frames[1]["data"]["event"]["payload"]["text"] == "one"


def test_event_stream_resumes_from_sequence(tmp_path: Path) -> None:
    client, _ = make_client(tmp_path)
    session_id = create_session(client)
    client.post(f"/sessions/{session_id}/messages", json={"text": "one"})
    client.post(f"/sessions/{session_id}/messages", json={"text": "two"})

    resumed = parse_frames(client.get(f"/sessions/{session_id}/events?from=3&follow=0").text)
    assert [f["id"] for f in resumed] == [3, 4, 5]

    beyond = parse_frames(client.get(f"/sessions/{session_id}/events?from=99&follow=0").text)
    assert beyond == []


@contextmanager
def running_server(app):
    """Serve `app` on an ephemeral localhost port for the duration."""
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start in time")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    try:
        yield f"http://127.0.0.1:{port}"
    finally:
        server.should_exit = True
        thread.join(timeout=10)


def read_frames(line_iterator, count: int, deadline_s: float = 15.0) -> list[dict]:
    """Collect the next `count` SSE data frames, skipping keep-alives."""
    frames: list[dict] = []
    fields: dict[str, str] = {}
    deadline = time.monotonic() + deadline_s
    for line in line_iterator:
        if time.monotonic() > deadline:
            break
        if not line or line.startswith(":"):
            continue
        key, _, value = line.partition(": ")
        fields[key] = value
        if key == "data":
            frames.append({"id": int(fields["id"]), "data": json.loads(value)})
            fields = {}
            if len(frames) == count:
                return frames
    raise AssertionError(f"expected {count} frames, got {len(frames)}")


def test_event_stream_live_tail(tmp_path: Path) -> None:
    _, orchestrator = make_client(tmp_path)
    with running_server(create_app(orchestrator)) as base_url:
        with httpx.Client(base_url=base_url, timeout=10) as http:
            session_id = http.post("/sessions", json=INTAKE).json()["session_id"]
            with http.stream("GET", f"/sessions/{session_id}/events", params={"from": 0}) as stream:
                lines = stream.iter_lines()
                first = read_frames(lines, 1)[0]
                assert first["data"]["event"]["kind"] == "intake"

                # a message posted mid-stream shows up without reconnecting
                reply = http.post(f"/sessions/{session_id}/messages", json={"text": "live?"})
                assert reply.status_code == 200

                tail = read_frames(lines, 2)
                assert [f["id"] for f in tail] == [2, 3]
                assert [f["data"]["event"]["kind"] for f in tail] == ["question", "answer"]
                assert tail[0]["data"]["event"]["payload"]["text"] == "live?"


# --- error body hygiene ---


class ExplodingOrchestrator:
    def start_session(self, intake):
        raise RuntimeError("wires crossed")


def test_unexpected_errors_stay_machine_readable(tmp_path: Path) -> None:
    client = TestClient(create_app(ExplodingOrchestrator()), raise_server_exceptions=False)
    response = client.post("/sessions", json=INTAKE)
    error = assert_error(response, 500, "internal")
    assert "RuntimeError" in error["message"]
    assert "Traceback" not in response.text
    assert "app.py" not in response.text


# --- the API adds no behavior: 1:1 delegation to the orchestrator ---


class RecordingOrchestrator:
    """Canned orchestrator that records every call it receives."""

    def __init__(self, session: Session, report: LearningReport) -> None:
        self.session = session
        self.report = report
        self.calls: list[tuple] = []

    def start_session(self, intake):
        self.calls.append(("start_session", dict(intake)))
        return self.session

    def answer_question(self, session, text):
        self.calls.append(("answer_question", session.session_id, text))
        return "stub answer"

    def generate_material(self, session, topic=None):
        self.calls.append(("generate_material", session.session_id, topic))
        return LearningMaterial(
            topic="python basics",
            sections=(MaterialSection(heading="Intro", body="Body.", source_refs=("model-internal",)),),
            generated_for=session.session_id,
        )

    def begin_exercise(self, session):
        self.calls.append(("begin_exercise", session.session_id))
        exercise = sum_exercise()
        session.exercises[exercise.exercise_id] = exercise
        session.current_steps.setdefault(exercise.exercise_id, 0)
        return exercise

    def submit_code(self, session, exercise_id, step_index, source):
        self.calls.append(("submit_code", session.session_id, exercise_id, step_index, source))
        report = TestReport(
            case_results=(
                CaseResult(passed=True, stdout="3", stderr="", wall_time_ms=1.0, timed_out=False),
                CaseResult(passed=False, stdout="", stderr="", wall_time_ms=1.0, timed_out=False),
            ),
            all_passed=False,
        )
        return Feedback(verdict=report, suggestions=("look again",), next_action="retry_step")

    def generate_report(self, session):
        self.calls.append(("generate_report", session.session_id))
        session.report = self.report
        return self.report


def test_endpoints_delegate_one_to_one(tmp_path: Path) -> None:
    log = EventLog(tmp_path / "events.jsonl", clock=fixed_clock)
    session = Session(
        session_id="stub-1",
        profile=StudentProfile(background="b", goals="g"),
        workspace_root=tmp_path,
        events=log,
        phase=SessionPhase.STUDYING,
        max_turns=5,
    )
    log.append("intake", {"background": "b"})
    report_path = tmp_path / "report.md"
    report_path.write_text("# Report\n")
    orchestrator = RecordingOrchestrator(session, LearningReport(path=report_path, content="# Report\n"))
    client = TestClient(create_app(orchestrator))

    client.post("/sessions", json=INTAKE)
    client.post("/sessions/stub-1/messages", json={"text": "hello"})
    client.post("/sessions/stub-1/material", json={})
    client.post("/sessions/stub-1/exercises", json={})
    client.post("/sessions/stub-1/exercises/sum-two/submissions", json={"step_index": 0, "source": "print(1)"})
    client.post("/sessions/stub-1/report")

    assert orchestrator.calls == [
        ("start_session", INTAKE),
        ("answer_question", "stub-1", "hello"),
        ("generate_material", "stub-1", None),
        ("begin_exercise", "stub-1"),
        ("submit_code", "stub-1", "sum-two", 0, "print(1)"),
        ("generate_report", "stub-1"),
    ]

    # read-only endpoints never reach the orchestrator
    client.get("/sessions/stub-1")
    client.get("/sessions/stub-1/report")
    client.get("/sessions/stub-1/events?follow=0")
    assert len(orchestrator.calls) == 6


# --- serve-time configuration ---


def test_bind_address_parsing() -> None:
    assert bind_address({}) == ("127.0.0.1", 8000)
    assert bind_address({"CODEEDU_BIND_ADDR": "0.0.0.0:9001"}) == ("0.0.0.0", 9001)
    for bad in ("8000", "host:", "host:abc", ":"):
        with pytest.raises(ValueError):
            bind_address({"CODEEDU_BIND_ADDR": bad})


def test_workspace_root_env() -> None:
    assert workspace_root({}) == "./workspace"
    assert workspace_root({"CODEEDU_WORKSPACE_ROOT": "/tmp/ws"}) == "/tmp/ws"
