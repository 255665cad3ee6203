"""Tutoring episodes: chat loop, solution drafting, and cached grading."""

from __future__ import annotations

import hashlib
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

from codeedu.errors import TurnLimitReachedError
from codeedu.evaluation.problems import Problem
from codeedu.evaluation.students import SimulatedStudent, StudentLevel
from codeedu.llm.gateway import ChatMessage, Gateway, ModelBinding
from codeedu.session.orchestrator import SessionOrchestrator
from codeedu.tools.judge import run_unit_tests
from codeedu.tools.sandbox import SandboxPolicy

BASELINE_TUTOR_PROMPT = (
    "You are a coding tutor. A student will chat with you about one programming "
    "problem. Explain ideas step by step, encourage the student to reason aloud, "
    "and never paste a full solution unless the student is completely stuck."
)

PRE_TEST_TAG = "none"

_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def extract_code(reply: str) -> str | None:
    """Pull the submitted program out of a free-form student reply.

    The last fenced code block wins; absent any fence, the whole reply is used
    only if it parses as Python. Anything else is treated as not-code.
    """
    blocks = _FENCE_RE.findall(reply)
    if blocks:
        return blocks[-1].strip("\n")
    try:
        compile(reply, "<submission>", "exec")
    except (SyntaxError, ValueError):
        return None
    return reply


class Grader:
    """Sandbox-backed grader with a per-run cache keyed on (problem, source).

    Re-grading an identical submission is a pure repeat, so the cache returns
    the recorded verdicts without spawning new sandbox processes.
    """

    def __init__(
        self,
        scratch_root: Path,
        policy: SandboxPolicy | None = None,
        judge: Callable = run_unit_tests,
    ) -> None:
        self._scratch_root = Path(scratch_root)
        self._scratch_root.mkdir(parents=True, exist_ok=True)
        self._policy = policy or SandboxPolicy()
        self._judge = judge
        self._cache: dict[tuple[str, str], tuple[bool, ...]] = {}
        self._lock = threading.Lock()
        self.gradings_executed = 0

    def grade(self, problem: Problem, source: str) -> tuple[bool, ...]:
        key = (problem.problem_id, hashlib.sha256(source.encode("utf-8")).hexdigest())
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        report = self._judge(
            source,
            list(problem.test_cases),
            policy=self._policy,
            scratch_root=self._scratch_root,
        )
        verdicts = tuple(report.verdicts)
        with self._lock:
            self._cache[key] = verdicts
            self.gradings_executed += 1
        return verdicts


class TutorChannel(Protocol):
    name: str

    def respond(self, student_text: str) -> str: ...


@dataclass
class BaselineTutor:
    """A single statically-prompted completion endpoint posing as a tutor."""

    gateway: Gateway
    binding: ModelBinding
    name: str = "baseline"
    history: list[ChatMessage] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.history:
            self.history.append(ChatMessage(role="system", content=BASELINE_TUTOR_PROMPT))

    def respond(self, student_text: str) -> str:
        self.history.append(ChatMessage(role="user", content=student_text))
        result = self.gateway.complete(self.binding, self.history)
        self.history.append(ChatMessage(role="assistant", content=result.text))
        return result.text


class CodeEduTutor:
    """The full platform acting as the tutor: one live session per episode."""

    name = "codeedu"

    def __init__(self, orchestrator: SessionOrchestrator, level: StudentLevel, problem: Problem):
        self._orchestrator = orchestrator
        self.session = orchestrator.start_session(intake_for(level, problem))

    def respond(self, student_text: str) -> str:
        return self._orchestrator.answer_question(self.session, student_text)


def intake_for(level: StudentLevel, problem: Problem) -> dict:
    return {
        "background": f"simulated {level.value}-level coding student",
        "goals": f"learn to solve: {problem.title}",
        "self_reported_level": level.value,
        "preferred_topics": list(problem.topics[:2]),
    }


@dataclass(frozen=True)
class EpisodeResult:
    problem_id: str
    level: str
    tutor_name: str
    verdict_rows: tuple[tuple[bool, ...], ...]
    turns_used: int
    stopped_early: bool
    transcript: tuple[tuple[str, str], ...]


def grade_drafts(
    student: SimulatedStudent,
    problem: Problem,
    *,
    k_samples: int,
    coached_by: str,
    grader: Grader,
) -> tuple[tuple[bool, ...], ...]:
    """Collect ``k_samples`` solution drafts and grade each over every case.

    A draft with no extractable code is recorded as failing all cases without
    touching the sandbox.
    """
    if k_samples < 1:
        raise ValueError("k_samples must be >= 1")
    rows: list[tuple[bool, ...]] = []
    for attempt in range(1, k_samples + 1):
        reply = student.draft_solution(coached_by, attempt)
        source = extract_code(reply)
        if source is None:
            rows.append((False,) * len(problem.test_cases))
        else:
            rows.append(grader.grade(problem, source))
    return tuple(rows)


def run_episode(
    student: SimulatedStudent,
    tutor: TutorChannel,
    problem: Problem,
    *,
    k_samples: int,
    max_turns: int,
    grader: Grader,
) -> EpisodeResult:
    """Run one tutoring episode: bounded chat, then graded solution drafts.

    A chat turn is one student message answered by the tutor. After each turn
    the student is probed for readiness; a stop ends the chat early. The
    episode then collects ``k_samples`` drafts and grades each against all of
    the problem's cases.
    """
    if max_turns < 1:
        raise ValueError("max_turns must be >= 1")
    transcript: list[tuple[str, str]] = []
    tutor_text: str | None = None
    turns_used = 0
    stopped_early = False
    for _ in range(max_turns):
        student_text = student.chat_reply(tutor_text)
        transcript.append(("student", student_text))
        try:
            tutor_text = tutor.respond(student_text)
        except TurnLimitReachedError:
            break
        transcript.append(("tutor", tutor_text))
        turns_used += 1
        if student.wants_to_stop():
            stopped_early = True
            break
    rows = grade_drafts(
        student,
        problem,
        k_samples=k_samples,
        coached_by=tutor.name,
        grader=grader,
    )
    return EpisodeResult(
        problem_id=problem.problem_id,
        level=student.level.value,
        tutor_name=tutor.name,
        verdict_rows=rows,
        turns_used=turns_used,
        stopped_early=stopped_early,
        transcript=tuple(transcript),
    )
