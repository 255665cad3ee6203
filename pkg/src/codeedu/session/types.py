"""Session-facing domain types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from codeedu.tools.judge import TestCase, TestReport

STUDENT_LEVELS = ("low", "medium", "high")

NEXT_ACTIONS = ("retry_step", "advance_step", "exercise_complete")

MODEL_INTERNAL_REF = "model-internal"


class SessionPhase(str, Enum):
    INTAKE = "intake"
    STUDYING = "studying"
    EXERCISING = "exercising"
    REPORTING = "reporting"
    CLOSED = "closed"


@dataclass(frozen=True)
class StudentProfile:
    background: str
    goals: str
    self_reported_level: str = "medium"
    preferred_topics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.self_reported_level not in STUDENT_LEVELS:
            raise ValueError(f"unknown level: {self.self_reported_level!r}")


@dataclass(frozen=True)
class MaterialSection:
    heading: str
    body: str
    source_refs: tuple[str, ...] = (MODEL_INTERNAL_REF,)


@dataclass(frozen=True)
class LearningMaterial:
    topic: str
    sections: tuple[MaterialSection, ...]
    generated_for: str

    def __post_init__(self) -> None:
        if not self.sections:
            raise ValueError("material needs at least one section")

    def excerpt(self, limit: int = 600) -> str:
        head = self.sections[0]
        return f"{head.heading}\n{head.body}"[:limit]


@dataclass(frozen=True)
class ExerciseStep:
    prompt: str
    hint: str
    cases: tuple[TestCase, ...]

    def __post_init__(self) -> None:
        if not self.cases:
            raise ValueError("every exercise step needs at least one test case")


@dataclass(frozen=True)
class Exercise:
    exercise_id: str
    statement: str
    steps: tuple[ExerciseStep, ...]
    topics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("an exercise needs at least one step")


@dataclass(frozen=True)
class Feedback:
    verdict: TestReport
    suggestions: tuple[str, ...]
    next_action: str

    def __post_init__(self) -> None:
        if self.next_action not in NEXT_ACTIONS:
            raise ValueError(f"unknown next_action: {self.next_action!r}")
        if self.next_action == "exercise_complete" and not self.verdict.all_passed:
            raise ValueError("an exercise cannot complete with failing cases")


@dataclass(frozen=True)
class LearningReport:
    path: Path
    content: str
