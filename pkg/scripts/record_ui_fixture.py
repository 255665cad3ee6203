#!/usr/bin/env python3
"""Record real wire artifacts from the HTTP service for the web UI tests.

Drives the scripted mock stack through the actual FastAPI app and saves:

- frontend/tests/fixtures/session-events.json  -- a 50-event session log
  (descriptor, every event frame, the exercise payload, report metadata)
- frontend/tests/fixtures/report.md            -- the downloadable report bytes
- frontend/tests/fixtures/turn-limit.json      -- a session driven to its turn
  cap plus the server's actual 429 error body

Rerunning overwrites the fixtures; output is deterministic (scripted
provider, fixed clock) apart from sandbox wall times, which the UI ignores.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "tests"))

from fastapi.testclient import TestClient
from support import fixed_clock, mock_bindings, sum_exercise, universal_gateway

from codeedu.api.app import create_app
from codeedu.session.orchestrator import SessionOrchestrator

FIXTURE_DIR = REPO_ROOT / "frontend" / "tests" / "fixtures"

INTAKE = {
    "background": "first-year student, some scripting",
    "goals": "get comfortable with Python basics",
    "self_reported_level": "low",
    "preferred_topics": ["basics"],
}

CORRECT_SUM = "a, b = input().split()\nprint(int(a) + int(b))\n"
WRONG_SUM = "print(0)\n"

QUESTIONS = [
    "How does input() work?",
    "What does split() return?",
    "Why do I need int()?",
    "What is a variable?",
    "How do loops work?",
    "What does <script>alert(1)</script> do in HTML?",  # markup must render inert
    "Can I use f-strings?",
    "What's the difference between list & tuple?",
    "How do I read two numbers on one line?",
    "What does print() add at the end?",
    "Why does my code fail on negatives?",
    "What is stdin?",
    "How do I handle extra spaces?",
    "What is an exception?",
    "When should I use functions?",
    "How do I test my own code?",
]

# fail, pass (advance), fail, fail, pass (complete), pass, fail
SUBMISSION_PLAN = [WRONG_SUM, CORRECT_SUM, WRONG_SUM, WRONG_SUM, CORRECT_SUM, CORRECT_SUM, WRONG_SUM]


def parse_frames(sse_text: str) -> list[dict]:
    frames = []
    for block in sse_text.split("\n\n"):
        data_lines = [line[len("data: "):] for line in block.splitlines() if line.startswith("data: ")]
        if data_lines:
            frames.append(json.loads("\n".join(data_lines)))
    return frames


def make_client(workspace_root: Path, max_turns: int) -> TestClient:
    orchestrator = SessionOrchestrator(
        gateway=universal_gateway(),
        bindings=mock_bindings(),
        workspace_root=workspace_root,
        exercise_bank=(sum_exercise(),),
        clock=fixed_clock,
        max_turns=max_turns,
    )
    return TestClient(create_app(orchestrator))


def must(response, expected_status: int) -> dict:
    if response.status_code != expected_status:
        raise SystemExit(f"{response.request.method} {response.url}: {response.status_code} {response.text}")
    return response.json()


def record_workflow_session(root: Path) -> None:
    """50 events: intake + 2 materials + 16 Q&A turns + 7 submissions + report."""
    client = make_client(root / "workflow", max_turns=23)
    sid = must(client.post("/sessions", json=INTAKE), 201)["session_id"]
    must(client.post(f"/sessions/{sid}/material", json={"topic": "python basics"}), 200)
    must(client.post(f"/sessions/{sid}/material", json={"topic": "reading input"}), 200)
    for question in QUESTIONS:
        must(client.post(f"/sessions/{sid}/messages", json={"text": question}), 200)
    exercise = must(client.post(f"/sessions/{sid}/exercises", json={}), 200)
    for source in SUBMISSION_PLAN:
        descriptor = must(client.get(f"/sessions/{sid}"), 200)
        step = descriptor["current_steps"][exercise["exercise_id"]]
        must(
            client.post(
                f"/sessions/{sid}/exercises/{exercise['exercise_id']}/submissions",
                json={"step_index": step, "source": source},
            ),
            200,
        )
    report_info = must(client.post(f"/sessions/{sid}/report", json={}), 200)
    report_bytes = client.get(f"/sessions/{sid}/report")
    if report_bytes.status_code != 200:
        raise SystemExit(f"report download failed: {report_bytes.status_code}")

    descriptor = must(client.get(f"/sessions/{sid}"), 200)
    frames = parse_frames(client.get(f"/sessions/{sid}/events", params={"follow": 0}).text)
    if len(frames) != 50:
        raise SystemExit(f"expected exactly 50 event frames, recorded {len(frames)}")

    (FIXTURE_DIR / "session-events.json").write_text(
        json.dumps(
            {
                "descriptor": descriptor,
                "frames": frames,
                "exercise": exercise,
                "report": report_info,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    (FIXTURE_DIR / "report.md").write_bytes(report_bytes.content)


def record_turn_limit_session(root: Path) -> None:
    """Default 20-turn session driven to the cap, plus the real 429 body."""
    client = make_client(root / "turnlimit", max_turns=20)
    sid = must(client.post("/sessions", json=INTAKE), 201)["session_id"]
    for turn in range(20):
        must(client.post(f"/sessions/{sid}/messages", json={"text": f"question {turn + 1}?"}), 200)
    rejected = client.post(f"/sessions/{sid}/messages", json={"text": "one more?"})
    if rejected.status_code != 429:
        raise SystemExit(f"expected 429 at the turn cap, got {rejected.status_code}")

    descriptor = must(client.get(f"/sessions/{sid}"), 200)
    frames = parse_frames(client.get(f"/sessions/{sid}/events", params={"follow": 0}).text)
    (FIXTURE_DIR / "turn-limit.json").write_text(
        json.dumps(
            {"descriptor": descriptor, "frames": frames, "rejection": rejected.json()},
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(prefix="codeedu-ui-fixture-") as tmp:
        record_workflow_session(Path(tmp))
        record_turn_limit_session(Path(tmp))
    print(f"wrote fixtures under {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
