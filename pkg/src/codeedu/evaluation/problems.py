"""Problem dataset: JSON-lines loading, validation, and exercise conversion."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from codeedu.errors import DatasetError
from codeedu.session.types import Exercise, ExerciseStep
from codeedu.tools.judge import TestCase

DEFAULT_CASES_PER_PROBLEM = 10

DIFFICULTY_TAGS = ("easy", "medium", "hard")


@dataclass(frozen=True)
class Problem:
    """One coding problem with inline unit test cases.

    ``sample_code`` is an intentionally imperfect attempt (it may pass some
    cases); ``reference_solution`` is expected to pass every case.
    """

    problem_id: str
    title: str
    statement: str
    concepts: str
    test_cases: tuple[TestCase, ...]
    difficulty: str = "easy"
    sample_code: str | None = None
    reference_solution: str | None = None

    def __post_init__(self) -> None:
        if not self.problem_id.strip():
            raise DatasetError("problem_id must be non-empty")
        if not self.statement.strip():
            raise DatasetError(f"problem {self.problem_id!r}: statement must be non-empty")
        if not self.test_cases:
            raise DatasetError(f"problem {self.problem_id!r}: at least one test case is required")
        if self.difficulty not in DIFFICULTY_TAGS:
            raise DatasetError(
                f"problem {self.problem_id!r}: difficulty must be one of {DIFFICULTY_TAGS}, "
                f"got {self.difficulty!r}"
            )

    @property
    def topics(self) -> tuple[str, ...]:
        """Topic labels used when the problem backs a tutoring exercise."""
        words = tuple(w.strip(".,").lower() for w in self.title.split() if w.strip(".,"))
        return (self.difficulty,) + words


def _case_from_dict(problem_id: str, index: int, raw: Mapping[str, Any]) -> TestCase:
    if not isinstance(raw, Mapping):
        raise DatasetError(f"problem {problem_id!r}: test case {index} must be an object")
    missing = {"input", "expected_output"} - set(raw)
    if missing:
        raise DatasetError(
            f"problem {problem_id!r}: test case {index} is missing fields {sorted(missing)}"
        )
    try:
        return TestCase(
            input=str(raw["input"]),
            expected_output=str(raw["expected_output"]),
            comparison=str(raw.get("comparison", "whitespace-normalized")),
            tolerance=float(raw.get("tolerance", 1e-6)),
        )
    except ValueError as exc:
        raise DatasetError(f"problem {problem_id!r}: test case {index}: {exc}") from exc


def problem_from_dict(raw: Mapping[str, Any], *, cases_per_problem: int | None = None) -> Problem:
    if not isinstance(raw, Mapping):
        raise DatasetError("each problem record must be a JSON object")
    for key in ("problem_id", "title", "statement", "concepts", "test_cases"):
        if key not in raw:
            raise DatasetError(f"problem record is missing field {key!r}")
    problem_id = str(raw["problem_id"])
    raw_cases = raw["test_cases"]
    if not isinstance(raw_cases, Sequence) or isinstance(raw_cases, (str, bytes)):
        raise DatasetError(f"problem {problem_id!r}: test_cases must be an array")
    if cases_per_problem is not None and len(raw_cases) != cases_per_problem:
        raise DatasetError(
            f"problem {problem_id!r}: expected exactly {cases_per_problem} test cases, "
            f"found {len(raw_cases)}"
        )
    cases = tuple(_case_from_dict(problem_id, i, c) for i, c in enumerate(raw_cases))
    sample = raw.get("sample_code")
    reference = raw.get("reference_solution")
    return Problem(
        problem_id=problem_id,
        title=str(raw["title"]),
        statement=str(raw["statement"]),
        concepts=str(raw["concepts"]),
        test_cases=cases,
        difficulty=str(raw.get("difficulty", "easy")),
        sample_code=None if sample is None else str(sample),
        reference_solution=None if reference is None else str(reference),
    )


def load_problems(path: Path, *, cases_per_problem: int | None = DEFAULT_CASES_PER_PROBLEM) -> tuple[Problem, ...]:
    """Load a JSON-lines problem file, one problem object per line.

    ``cases_per_problem`` pins the required test-case count per problem
    (pass ``None`` to accept any non-zero count).
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"problem file not found: {path}")
    problems: list[Problem] = []
    seen: set[str] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        problem = problem_from_dict(raw, cases_per_problem=cases_per_problem)
        if problem.problem_id in seen:
            raise DatasetError(f"{path}:{lineno}: duplicate problem_id {problem.problem_id!r}")
        seen.add(problem.problem_id)
        problems.append(problem)
    if not problems:
        raise DatasetError(f"problem file {path} contains no problems")
    return tuple(problems)


def exercise_from_problem(problem: Problem) -> Exercise:
    """Convert a dataset problem into a single-step tutoring exercise."""
    hint = problem.concepts.split(".")[0].strip() or "Re-read the statement carefully."
    step = ExerciseStep(prompt=problem.statement, hint=hint, cases=problem.test_cases)
    return Exercise(
        exercise_id=problem.problem_id,
        statement=problem.statement,
        steps=(step,),
        topics=problem.topics,
    )
