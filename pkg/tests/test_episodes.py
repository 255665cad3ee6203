from pathlib import Path

import pytest
from support import (
    TOY_PROBLEMS_PATH,
    actor_binding,
    fixed_clock,
    mock_bindings,
    sequence_gateway,
    universal_gateway,
)

from codeedu.evaluation.episodes import (
    BaselineTutor,
    CodeEduTutor,
    Grader,
    extract_code,
    grade_drafts,
    intake_for,
    run_episode,
)
from codeedu.evaluation.problems import load_problems
from codeedu.evaluation.students import StudentLevel, build_student
from codeedu.session.orchestrator import SessionOrchestrator
from codeedu.tools.judge import CaseResult, TestReport

P01 = load_problems(TOY_PROBLEMS_PATH, cases_per_problem=10)[0]

WRONG_SOURCE = "print('x')"


def fenced(source: str) -> str:
    return f"My attempt:\n```python\n{source}\n```"


def make_student(*responses: str):
    return build_student("low", P01, sequence_gateway(*responses), actor_binding("student"))


# --- code extraction ---


def test_extract_code_takes_last_fenced_block() -> None:
    reply = "First try:\n```python\nprint(1)\n```\nBetter:\n```\nprint(2)\n```\ndone"
    assert extract_code(reply) == "print(2)"


def test_extract_code_accepts_bare_python() -> None:
    assert extract_code("print(40 + 2)") == "print(40 + 2)"


def test_extract_code_rejects_prose() -> None:
    assert extract_code("I am not sure how to solve this, sorry!") is None
    assert extract_code("Maybe loop over it? Then print.") is None


def test_extract_code_keeps_broken_fenced_code() -> None:
    # fenced content is always treated as the submission, even if it cannot parse
    assert extract_code("```python\ndef broken(:\n```") == "def broken(:"


# --- grading cache ---


class CountingJudge:
    def __init__(self) -> None:
        self.calls: list[tuple[str, int]] = []

    def __call__(self, source, cases, policy=None, scratch_root=None):
        self.calls.append((source, len(cases)))
        results = tuple(
            CaseResult(passed=True, stdout="", stderr="", wall_time_ms=1.0, timed_out=False)
            for _ in cases
        )
        return TestReport(case_results=results, all_passed=True)


def test_grader_caches_identical_submissions(tmp_path: Path) -> None:
    judge = CountingJudge()
    grader = Grader(tmp_path / "scratch", judge=judge)
    first = grader.grade(P01, WRONG_SOURCE)
    second = grader.grade(P01, WRONG_SOURCE)
    assert first == second == (True,) * 10
    assert len(judge.calls) == 1
    assert grader.gradings_executed == 1
    grader.grade(P01, WRONG_SOURCE + "  # changed")
    assert len(judge.calls) == 2


def test_grader_distinguishes_problems(tmp_path: Path) -> None:
    problems = load_problems(TOY_PROBLEMS_PATH, cases_per_problem=10)
    judge = CountingJudge()
    grader = Grader(tmp_path / "scratch", judge=judge)
    grader.grade(problems[0], WRONG_SOURCE)
    grader.grade(problems[1], WRONG_SOURCE)
    assert len(judge.calls) == 2


# --- draft grading (real sandbox) ---


def test_wrong_wrong_correct_drafts(tmp_path: Path) -> None:
    """Frozen expectation: two failing drafts then the reference solution."""
    student = make_student(
        fenced(WRONG_SOURCE), fenced(WRONG_SOURCE), fenced(P01.reference_solution)
    )
    grader = Grader(tmp_path / "scratch")
    rows = grade_drafts(student, P01, k_samples=3, coached_by="none", grader=grader)
    assert rows[0] == (False,) * 10
    assert rows[1] == (False,) * 10
    assert rows[2] == (True,) * 10
    assert grader.gradings_executed == 2  # identical wrong drafts graded once


def test_prose_only_student_fails_every_case(tmp_path: Path) -> None:
    student = make_student(
        "I would add them somehow, maybe?",
        "Still thinking about it, sorry!",
        "No code from me today.",
    )
    grader = Grader(tmp_path / "scratch")
    rows = grade_drafts(student, P01, k_samples=3, coached_by="none", grader=grader)
    assert rows == ((False,) * 10,) * 3
    assert grader.gradings_executed == 0  # never reached the sandbox


# --- episode loop ---


def test_episode_stops_when_student_says_stop(tmp_path: Path) -> None:
    student = make_student(
        "Please help me with this sum problem.",  # chat turn 1
        "STOP",  # readiness probe
        "No code from me, just vibes today.",  # draft 1 (prose)
    )
    tutor = BaselineTutor(sequence_gateway("Read the statement twice."), actor_binding("baseline"))
    result = run_episode(
        student, tutor, P01, k_samples=1, max_turns=2, grader=Grader(tmp_path / "s")
    )
    assert result.turns_used == 1
    assert result.stopped_early is True
    assert result.transcript == (
        ("student", "Please help me with this sum problem."),
        ("tutor", "Read the statement twice."),
    )
    assert result.verdict_rows == ((False,) * 10,)
    assert result.problem_id == "p01"
    assert result.tutor_name == "baseline"


def test_episode_runs_to_turn_cap_without_stop(tmp_path: Path) -> None:
    student = make_student(
        "Question one?", "CONTINUE", "Question two?", "CONTINUE", "Prose, not code."
    )
    tutor = BaselineTutor(
        sequence_gateway("Answer one.", "Answer two."), actor_binding("baseline")
    )
    result = run_episode(
        student, tutor, P01, k_samples=1, max_turns=2, grader=Grader(tmp_path / "s")
    )
    assert result.turns_used == 2
    assert result.stopped_early is False
    assert [speaker for speaker, _ in result.transcript] == ["student", "tutor"] * 2


def test_baseline_tutor_keeps_its_own_history() -> None:
    tutor = BaselineTutor(sequence_gateway("A.", "B."), actor_binding("baseline"))
    assert tutor.respond("first") == "A."
    assert tutor.respond("second") == "B."
    roles = [m.role for m in tutor.history]
    assert roles == ["system", "user", "assistant", "user", "assistant"]
    assert "coding tutor" in tutor.history[0].content


def test_codeedu_tutor_routes_through_a_session(tmp_path: Path) -> None:
    orchestrator = SessionOrchestrator(
        gateway=universal_gateway(),
        bindings=mock_bindings(),
        workspace_root=tmp_path / "ws",
        clock=fixed_clock,
    )
    tutor = CodeEduTutor(orchestrator, StudentLevel.LOW, P01)
    answer = tutor.respond("How should I read the input?")
    assert answer == "Scripted answer."
    assert tutor.session.turn_count == 1
    kinds = [r.kind for r in tutor.session.events.records]
    assert kinds == ["intake", "question", "answer"]


def test_session_turn_limit_ends_chat_gracefully(tmp_path: Path) -> None:
    orchestrator = SessionOrchestrator(
        gateway=universal_gateway(),
        bindings=mock_bindings(),
        workspace_root=tmp_path / "ws",
        clock=fixed_clock,
        max_turns=1,
    )
    student = make_student(
        "Question one?", "CONTINUE", "Question two?", "Prose, not code."
    )
    tutor = CodeEduTutor(orchestrator, StudentLevel.LOW, P01)
    result = run_episode(
        student, tutor, P01, k_samples=1, max_turns=3, grader=Grader(tmp_path / "s")
    )
    assert result.turns_used == 1  # second tutor call hit the session turn cap
    assert result.verdict_rows == ((False,) * 10,)


def test_intake_for_carries_level_and_topic() -> None:
    intake = intake_for(StudentLevel.MEDIUM, P01)
    assert intake["self_reported_level"] == "medium"
    assert P01.title.lower().startswith(intake["preferred_topics"][1])


def test_bad_arguments_rejected(tmp_path: Path) -> None:
    student = make_student()
    grader = Grader(tmp_path / "s")
    with pytest.raises(ValueError):
        grade_drafts(student, P01, k_samples=0, coached_by="none", grader=grader)
    tutor = BaselineTutor(sequence_gateway(), actor_binding("baseline"))
    with pytest.raises(ValueError):
        run_episode(student, tutor, P01, k_samples=1, max_turns=0, grader=grader)
