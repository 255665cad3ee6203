"""Tutoring session lifecycle.

One orchestrator serves many sessions. Each session owns a workspace
directory (event log, material, report, sandbox scratch) and a tool
registry confined to it. Agents do the thinking; the orchestrator owns the
phase machine, the turn budget and the event log, and it grounds agent
claims (material sources, exercise verdicts) in recorded tool results.

Phases: intake -> studying <-> exercising -> reporting -> closed.
A turn is one user-initiated message: a question or a code submission.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from codeedu.agents.profiles import ROLE_TUTOR, AgentPool, build_default_pool
from codeedu.agents.runtime import TaskOutcome, run_agent_task
from codeedu.errors import (
    EmptyRequestError,
    MissingIntakeFieldError,
    NothingToReportError,
    PhaseError,
    SessionError,
    StepOrderError,
    TurnLimitReachedError,
    UnknownExerciseError,
)
from codeedu.llm.gateway import ChatMessage, Gateway, ModelBinding
from codeedu.planning.planner import assign
from codeedu.planning.tasks import TaskSpec, TaskType
from codeedu.session.events import EventLog
from codeedu.session.types import (
    MODEL_INTERNAL_REF,
    Exercise,
    Feedback,
    LearningMaterial,
    LearningReport,
    MaterialSection,
    SessionPhase,
    StudentProfile,
)
from codeedu.tools import build_default_registry
from codeedu.tools.judge import run_unit_tests
from codeedu.tools.registry import ToolRegistry
from codeedu.tools.sandbox import SandboxPolicy

logger = logging.getLogger(__name__)

DEFAULT_MAX_TURNS = 20

REQUIRED_INTAKE_FIELDS = ("background", "goals")

EARLY_STOP_MARKER = "[early-stop-check]"

REPORT_HEADINGS = ("Summary", "Materials", "Q&A", "Submissions", "Recommendations")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    session_id: str
    profile: StudentProfile
    workspace_root: Path
    events: EventLog
    phase: SessionPhase = SessionPhase.INTAKE
    turn_count: int = 0
    max_turns: int = DEFAULT_MAX_TURNS
    material: LearningMaterial | None = None
    exercises: dict[str, Exercise] = field(default_factory=dict)
    current_steps: dict[str, int] = field(default_factory=dict)
    report: LearningReport | None = None


class SessionOrchestrator:
    def __init__(
        self,
        gateway: Gateway,
        bindings: Mapping[str, ModelBinding],
        workspace_root: str | Path,
        pool: AgentPool | None = None,
        crawl_corpus: str | Path | None = None,
        exercise_bank: Sequence[Exercise] = (),
        sandbox_policy: SandboxPolicy | None = None,
        max_turns: int = DEFAULT_MAX_TURNS,
        clock: Callable[[], str] = _utc_now,
        judge: Callable = run_unit_tests,
    ) -> None:
        self.gateway = gateway
        self.bindings = dict(bindings)
        self.workspace_root = Path(workspace_root)
        self.pool = pool or build_default_pool()
        self.crawl_corpus = crawl_corpus
        self.exercise_bank = tuple(exercise_bank)
        self.sandbox_policy = sandbox_policy or SandboxPolicy()
        self.max_turns = max_turns
        self.clock = clock
        self.judge = judge
        self._registries: dict[str, ToolRegistry] = {}
        self._crawled_urls: dict[str, set[str]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._sessions: dict[str, Session] = {}

    # --- lifecycle ---

    def start_session(self, intake_answers: Mapping[str, Any], session_id: str | None = None) -> Session:
        """Open a session from intake answers; lands in the studying phase.

        Raises MissingIntakeFieldError when background or goals is absent.
        """
        for field_name in REQUIRED_INTAKE_FIELDS:
            if not str(intake_answers.get(field_name, "")).strip():
                raise MissingIntakeFieldError(field_name)
        profile = StudentProfile(
            background=str(intake_answers["background"]),
            goals=str(intake_answers["goals"]),
            self_reported_level=str(intake_answers.get("self_reported_level", "medium")),
            preferred_topics=tuple(intake_answers.get("preferred_topics", ())),
        )
        session_id = session_id or uuid.uuid4().hex[:12]
        workspace = self.workspace_root / "sessions" / session_id
        workspace.mkdir(parents=True, exist_ok=True)
        (workspace / "sandbox").mkdir(exist_ok=True)

        session = Session(
            session_id=session_id,
            profile=profile,
            workspace_root=workspace,
            events=EventLog(workspace / "events.jsonl", clock=self.clock),
            max_turns=self.max_turns,
        )
        self._crawled_urls[session_id] = set()
        self._registries[session_id] = build_default_registry(
            workspace,
            self.gateway,
            self.bindings[ROLE_TUTOR],
            crawl_corpus=self.crawl_corpus,
            sandbox_policy=self.sandbox_policy,
            crawl_observer=lambda payload, sid=session_id: self._crawled_urls[sid].update(
                hit["url"] for hit in payload["hits"]
            ),
        )
        self._locks[session_id] = threading.Lock()
        self._sessions[session_id] = session

        session.events.append(
            "intake",
            {
                "background": profile.background,
                "goals": profile.goals,
                "self_reported_level": profile.self_reported_level,
                "preferred_topics": list(profile.preferred_topics),
                "max_turns": session.max_turns,
            },
        )
        session.phase = SessionPhase.STUDYING
        logger.info("session %s started (level=%s)", session_id, profile.self_reported_level)
        return session

    def get_session(self, session_id: str) -> Session:
        if session_id not in self._sessions:
            raise KeyError(f"no such session: {session_id}")
        return self._sessions[session_id]

    def lock_for(self, session_id: str) -> threading.Lock:
        return self._locks[session_id]

    def _registry(self, session: Session) -> ToolRegistry:
        return self._registries[session.session_id]

    def _run_task(self, session: Session, task: TaskSpec, context: str) -> TaskOutcome:
        agent = assign(task, self.pool.list_agents())
        binding = self.bindings[agent.role_name]
        return run_agent_task(agent, task, context, self.gateway, binding, self._registry(session))

    def _require_phase(self, session: Session, *allowed: SessionPhase) -> None:
        if session.phase not in allowed:
            raise PhaseError(
                f"operation not allowed in phase {session.phase.value}; "
                f"needs {', '.join(p.value for p in allowed)}"
            )

    def _spend_turn(self, session: Session) -> None:
        if session.turn_count >= session.max_turns:
            raise TurnLimitReachedError(
                f"turn limit reached ({session.turn_count}/{session.max_turns})"
            )
        session.turn_count += 1

    # --- the four workflow functions ---

    def generate_material(self, session: Session, topic: str | None = None) -> LearningMaterial:
        """Run retrieval + generation through the agents and store material."""
        self._require_phase(session, SessionPhase.STUDYING)
        profile = session.profile
        topic = topic or (profile.preferred_topics[0] if profile.preferred_topics else profile.goals)

        retrieval = TaskSpec(
            task_id="t1-knowledge_retrieval",
            type=TaskType.KNOWLEDGE_RETRIEVAL,
            description=f"Gather sources about: {topic}",
            inputs={"query": topic},
        )
        generation = TaskSpec(
            task_id="t2-material_generation",
            type=TaskType.MATERIAL_GENERATION,
            description=f"Compile personalized learning material about: {topic}",
            inputs={"topic": topic, "level": profile.self_reported_level},
            depends_on=frozenset({retrieval.task_id}),
        )
        retrieval_outcome = self._run_task(session, retrieval, context=f"Student background: {profile.background}")
        sources_digest = json.dumps(retrieval_outcome.produced_artifacts, sort_keys=True)
        generation_outcome = self._run_task(
            session,
            generation,
            context=(
                f"Student background: {profile.background}\n"
                f"Student goals: {profile.goals}\n"
                f"Retrieved sources: {sources_digest}"
            ),
        )

        crawled = self._crawled_urls[session.session_id]
        raw_sections = generation_outcome.produced_artifacts.get("sections") or []
        sections = []
        for item in raw_sections:
            refs = tuple(
                ref if ref in crawled else MODEL_INTERNAL_REF
                for ref in (item.get("source_refs") or [MODEL_INTERNAL_REF])
            ) or (MODEL_INTERNAL_REF,)
            sections.append(
                MaterialSection(heading=item.get("heading", ""), body=item.get("body", ""), source_refs=refs)
            )
        if not sections:
            raise SessionError("material generation produced no sections")

        material = LearningMaterial(topic=topic, sections=tuple(sections), generated_for=profile.background)
        session.material = material
        material_md = "\n\n".join(
            f"## {s.heading}\n{s.body}\n\nSources: {', '.join(s.source_refs)}" for s in material.sections
        )
        self._registry(session).invoke(
            "file_io", {"mode": "write", "path": "material.md", "content": f"# {topic}\n\n{material_md}\n"}
        )
        session.events.append(
            "material",
            {
                "topic": topic,
                "sections": [
                    {"heading": s.heading, "body": s.body, "source_refs": list(s.source_refs)}
                    for s in material.sections
                ],
            },
        )
        return material

    def answer_question(self, session: Session, question: str) -> str:
        """One Q&A turn through the Tutor."""
        self._require_phase(session, SessionPhase.STUDYING, SessionPhase.EXERCISING)
        if not question.strip():
            raise EmptyRequestError("question must be non-empty")
        self._spend_turn(session)
        session.events.append("question", {"text": question, "turn": session.turn_count})

        context_parts = [f"Student level: {session.profile.self_reported_level}"]
        if session.material is not None:
            context_parts.append("Material excerpt:\n" + session.material.excerpt())
        task = TaskSpec(
            task_id=f"qa-turn-{session.turn_count}",
            type=TaskType.TUTORING_QA,
            description=f"Answer the student's question: {question}",
            inputs={"question": question},
        )
        outcome = self._run_task(session, task, "\n".join(context_parts))
        if outcome.status == "needs_user_input":
            answer = str(outcome.produced_artifacts.get("question", ""))
        else:
            answer = str(outcome.produced_artifacts.get("answer", ""))
        session.events.append(
            "answer",
            {"text": answer, "turn": session.turn_count, "needs_user_input": outcome.status == "needs_user_input"},
        )
        return answer

    def begin_exercise(self, session: Session, exercise: Exercise | None = None) -> Exercise:
        """Move studying -> exercising with a chosen or topic-matched exercise."""
        self._require_phase(session, SessionPhase.STUDYING)
        if exercise is None:
            exercise = self._pick_exercise(session.profile)
        session.exercises[exercise.exercise_id] = exercise
        session.current_steps.setdefault(exercise.exercise_id, 0)
        session.phase = SessionPhase.EXERCISING
        return exercise

    def _pick_exercise(self, profile: StudentProfile) -> Exercise:
        if not self.exercise_bank:
            raise SessionError("no exercises available in the bank")
        preferred = set(profile.preferred_topics)
        for exercise in self.exercise_bank:
            if preferred & set(exercise.topics):
                return exercise
        return self.exercise_bank[0]

    def end_exercise(self, session: Session) -> None:
        """Return to studying without finishing the exercise."""
        self._require_phase(session, SessionPhase.EXERCISING)
        session.phase = SessionPhase.STUDYING

    def submit_code(self, session: Session, exercise_id: str, step_index: int, source: str) -> Feedback:
        """Grade one submission for the current step and coach on the result."""
        self._require_phase(session, SessionPhase.EXERCISING)
        exercise = session.exercises.get(exercise_id)
        if exercise is None:
            raise UnknownExerciseError(f"no such exercise in this session: {exercise_id}")
        current = session.current_steps[exercise_id]
        if step_index != current:
            raise StepOrderError(f"expected step {current}, got {step_index}")
        self._spend_turn(session)
        session.events.append(
            "submission",
            {"exercise_id": exercise_id, "step_index": step_index, "source": source, "turn": session.turn_count},
        )

        step = exercise.steps[step_index]
        report = self.judge(
            source,
            step.cases,
            policy=self.sandbox_policy,
            scratch_root=session.workspace_root / "sandbox",
        )

        failing = [i for i, v in enumerate(report.verdicts) if not v]
        task = TaskSpec(
            task_id=f"review-turn-{session.turn_count}",
            type=TaskType.DEBUGGING_REVIEW,
            description=f"Turn this test outcome into suggestions for the student (step: {step.prompt})",
            inputs={
                "passed": report.passed_count,
                "total": len(report.verdicts),
                "failing_cases": failing[:3],
                "first_stderr": report.case_results[failing[0]].stderr[-400:] if failing else "",
            },
        )
        outcome = self._run_task(session, task, context=f"Submitted source:\n{source}")
        suggestions = tuple(str(s) for s in outcome.produced_artifacts.get("suggestions", ()))

        if report.all_passed:
            if step_index == len(exercise.steps) - 1:
                next_action = "exercise_complete"
            else:
                next_action = "advance_step"
                session.current_steps[exercise_id] = step_index + 1
        else:
            next_action = "retry_step"
        feedback = Feedback(verdict=report, suggestions=suggestions, next_action=next_action)
        session.events.append(
            "feedback",
            {
                "exercise_id": exercise_id,
                "step_index": step_index,
                "verdicts": list(report.verdicts),
                "suggestions": list(suggestions),
                "next_action": next_action,
                "turn": session.turn_count,
            },
        )
        return feedback

    def generate_report(self, session: Session) -> LearningReport:
        """Compose the learning report and write it into the workspace."""
        self._require_phase(session, SessionPhase.STUDYING, SessionPhase.EXERCISING)
        records = session.events.records
        if len([r for r in records if r.kind != "intake"]) == 0:
            raise NothingToReportError("nothing has happened in this session yet")

        digest = json.dumps(
            [{"kind": r.kind, "payload": r.payload} for r in records if r.kind != "intake"],
            sort_keys=True,
        )
        task = TaskSpec(
            task_id="t-report_generation",
            type=TaskType.REPORT_GENERATION,
            description="Summarize this tutoring session and recommend next steps",
            inputs={"event_count": len(records)},
        )
        outcome = self._run_task(session, task, context=f"Session history: {digest[:4000]}")
        summary = str(outcome.produced_artifacts.get("summary", "")) or "(no summary)"
        recommendations = [str(r) for r in outcome.produced_artifacts.get("recommendations", [])]

        content = self._compose_report(session, summary, recommendations)
        self._registry(session).invoke("file_io", {"mode": "write", "path": "report.md", "content": content})
        path = session.workspace_root / "report.md"
        session.events.append("report", {"path": str(path)})
        session.phase = SessionPhase.REPORTING
        report = LearningReport(path=path, content=content)
        session.report = report
        return report

    def _compose_report(self, session: Session, summary: str, recommendations: list[str]) -> str:
        records = session.events.records
        lines = ["# Learning Report", f"Generated: {self.clock()}", ""]
        lines += ["## Summary", summary, ""]

        lines.append("## Materials")
        material_events = [r for r in records if r.kind == "material"]
        if material_events:
            for record in material_events:
                lines.append(f"Topic: {record.payload['topic']}")
                for section in record.payload["sections"]:
                    refs = ", ".join(section["source_refs"])
                    lines.append(f"- {section['heading']} (sources: {refs})")
        else:
            lines.append("No materials were generated.")
        lines.append("")

        lines.append("## Q&A")
        questions = [r for r in records if r.kind == "question"]
        answers = {r.payload["turn"]: r.payload["text"] for r in records if r.kind == "answer"}
        if questions:
            for record in questions:
                turn = record.payload["turn"]
                lines.append(f"**Q{turn}:** {record.payload['text']}")
                lines.append(f"**A{turn}:** {answers.get(turn, '(no answer recorded)')}")
                lines.append("")
        else:
            lines.append("No questions were asked.")
            lines.append("")

        lines.append("## Submissions")
        submissions = [r for r in records if r.kind == "submission"]
        feedback_by_turn = {r.payload["turn"]: r.payload for r in records if r.kind == "feedback"}
        if submissions:
            for record in submissions:
                payload = record.payload
                turn = payload["turn"]
                feedback = feedback_by_turn.get(turn, {})
                verdicts = feedback.get("verdicts", [])
                lines.append(
                    f"Exercise {payload['exercise_id']}, step {payload['step_index']} "
                    f"(turn {turn}): {sum(verdicts)}/{len(verdicts)} cases passed, "
                    f"outcome: {feedback.get('next_action', 'unknown')}"
                )
                lines.append("```python")
                lines.append(payload["source"].rstrip("\n"))
                lines.append("```")
                lines.append("")
        else:
            lines.append("No code was submitted.")
            lines.append("")

        lines.append("## Recommendations")
        if recommendations:
            lines += [f"- {r}" for r in recommendations]
        else:
            lines.append("- Keep practicing.")
        lines.append("")
        return "\n".join(lines)

    def close_session(self, session: Session) -> None:
        self._require_phase(session, SessionPhase.REPORTING)
        session.phase = SessionPhase.CLOSED

    # --- early stop ---

    def should_stop_early(self, session: Session) -> bool:
        """Ask the Tutor's model whether the learning goal has been met.

        Unparseable replies mean "keep going"; only an explicit stop token
        ends the session early.
        """
        recent = [
            f"{r.kind}: {json.dumps(r.payload, sort_keys=True)[:200]}"
            for r in session.events.records[-6:]
        ]
        prompt = (
            f"{EARLY_STOP_MARKER} The student's goal: {session.profile.goals}. "
            f"Recent activity:\n" + "\n".join(recent) + "\nHas the goal been met? Reply STOP or CONTINUE."
        )
        result = self.gateway.complete(
            self.bindings[ROLE_TUTOR], [ChatMessage(role="user", content=prompt)]
        )
        token = result.text.strip().split()[0].upper() if result.text.strip() else ""
        return token in ("STOP", "YES")
