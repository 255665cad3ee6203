#!/usr/bin/env python3
"""Walk one complete tutoring session against the scripted mock provider.

Prints each workflow stage: intake, personalized material, a Q&A turn, an
exercise attempt that fails on the flawed starter code, the passing retry,
and the final learning report. Everything runs offline; code submissions
are graded in the real process sandbox.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from codeedu.agents.profiles import ALL_ROLES
from codeedu.evaluation.fixtures import build_default_fixture, make_crawl_corpus
from codeedu.evaluation.problems import exercise_from_problem, load_problems
from codeedu.llm.config import default_temperature
from codeedu.llm.gateway import Gateway, ModelBinding
from codeedu.llm.mock import MockProvider
from codeedu.session.orchestrator import SessionOrchestrator

REPO_ROOT = Path(__file__).resolve().parent.parent


def banner(title: str) -> None:
    print(f"\n=== {title} " + "=" * max(0, 60 - len(title)))


def main() -> None:
    problems = load_problems(REPO_ROOT / "data" / "toy_problems.jsonl")
    workspace = Path(tempfile.mkdtemp(prefix="codeedu-demo-"))

    gateway = Gateway()
    gateway.register_provider("mock", MockProvider(build_default_fixture(problems)))
    bindings = {
        role: ModelBinding(
            agent_role=role,
            provider_id="mock",
            model_name="scripted",
            temperature=default_temperature(role),
        )
        for role in ALL_ROLES
    }
    crawl_corpus = workspace / "crawl_fixtures"
    make_crawl_corpus(crawl_corpus)

    orchestrator = SessionOrchestrator(
        gateway=gateway,
        bindings=bindings,
        workspace_root=workspace,
        crawl_corpus=crawl_corpus,
        exercise_bank=tuple(exercise_from_problem(p) for p in problems),
    )

    banner("Intake")
    session = orchestrator.start_session(
        {
            "background": "first-year student, wrote a few shell scripts",
            "goals": "get comfortable reading input and printing results",
            "self_reported_level": "low",
            "preferred_topics": ["add"],
        }
    )
    print(f"session {session.session_id} started in phase {session.phase.value}")

    banner("Learning material")
    material = orchestrator.generate_material(session, topic="python basics")
    for section in material.sections:
        print(f"## {section.heading}")
        print(section.body)
        print(f"   sources: {', '.join(section.source_refs)}")

    banner("Q&A turn")
    question = "How do I read two numbers from one input line?"
    print(f"student: {question}")
    print(f"tutor:   {orchestrator.answer_question(session, question)}")

    banner("Exercise")
    exercise = orchestrator.begin_exercise(session)
    problem = next(p for p in problems if p.problem_id == exercise.exercise_id)
    print(f"exercise: {exercise.exercise_id} — {exercise.statement}")

    print("\nsubmitting the flawed starter code...")
    feedback = orchestrator.submit_code(session, exercise.exercise_id, 0, problem.sample_code)
    print(f"verdicts: {feedback.verdict.passed_count}/{len(feedback.verdict.verdicts)} passed "
          f"-> {feedback.next_action}")
    for suggestion in feedback.suggestions:
        print(f"  hint: {suggestion}")

    print("\nsubmitting the corrected solution...")
    feedback = orchestrator.submit_code(session, exercise.exercise_id, 0, problem.reference_solution)
    print(f"verdicts: {feedback.verdict.passed_count}/{len(feedback.verdict.verdicts)} passed "
          f"-> {feedback.next_action}")

    banner("Learning report")
    report = orchestrator.generate_report(session)
    print(report.content)

    banner("Event log")
    for index, record in enumerate(session.events.records, start=1):
        print(f"{index:3d}. {record.kind}")
    print(f"\nworkspace kept at {workspace}")


if __name__ == "__main__":
    main()
