"""Shared scripted-provider helpers for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

from codeedu.agents.profiles import ALL_ROLES
from codeedu.llm.config import default_temperature
from codeedu.llm.gateway import Gateway, ModelBinding
from codeedu.llm.mock import FixtureEntry, MockProvider, ScriptedFixture
from codeedu.session.types import Exercise, ExerciseStep
from codeedu.tools.judge import TestCase

PROVIDER_ID = "mock"


def mock_bindings() -> dict[str, ModelBinding]:
    return {
        role: ModelBinding(
            agent_role=role,
            provider_id=PROVIDER_ID,
            model_name="scripted",
            temperature=default_temperature(role),
        )
        for role in ALL_ROLES
    }


def sequence_gateway(*responses: str) -> Gateway:
    gateway = Gateway()
    gateway.register_provider(
        PROVIDER_ID, MockProvider(ScriptedFixture([FixtureEntry(response=r) for r in responses]))
    )
    return gateway


def final(artifact: dict) -> str:
    return json.dumps({"final": True, "artifact": artifact})


def universal_entries() -> list[FixtureEntry]:
    """Substring-matched canned replies covering every task type and probe."""
    return [
        FixtureEntry(
            matcher="Task (knowledge_retrieval)",
            response=final({"sources": []}),
            max_uses=None,
        ),
        FixtureEntry(
            matcher="Task (material_generation)",
            response=final(
                {"sections": [{"heading": "Basics", "body": "Body text about the topic.", "source_refs": ["model-internal"]}]}
            ),
            max_uses=None,
        ),
        FixtureEntry(
            matcher="Task (tutoring_qa)",
            response=final({"answer": "Scripted answer."}),
            max_uses=None,
        ),
        FixtureEntry(
            matcher="Task (debugging_review)",
            response=final({"suggestions": ["Check the output format."]}),
            max_uses=None,
        ),
        FixtureEntry(
            matcher="Task (report_generation)",
            response=final({"summary": "The student practiced the topic.", "recommendations": ["Practice more."]}),
            max_uses=None,
        ),
        FixtureEntry(matcher="[early-stop-check]", response="CONTINUE", max_uses=None),
    ]


def universal_gateway(extra_entries: list[FixtureEntry] | None = None) -> Gateway:
    entries = (extra_entries or []) + universal_entries()
    gateway = Gateway()
    gateway.register_provider(PROVIDER_ID, MockProvider(ScriptedFixture(entries, match_mode="substring")))
    return gateway


def fixed_clock() -> str:
    return "2026-01-01T00:00:00+00:00"


def sum_exercise() -> Exercise:
    return Exercise(
        exercise_id="sum-two",
        statement="Read two integers from stdin and print their sum.",
        steps=(
            ExerciseStep(
                prompt="Print the sum of two non-negative integers.",
                hint="input().split() gives you both tokens.",
                cases=(
                    TestCase(input="1 2\n", expected_output="3\n"),
                    TestCase(input="10 20\n", expected_output="30\n"),
                ),
            ),
            ExerciseStep(
                prompt="Make it work for negative numbers too.",
                hint="int() already parses a leading minus.",
                cases=(
                    TestCase(input="-3 3\n", expected_output="0\n"),
                    TestCase(input="-1 -1\n", expected_output="-2\n"),
                ),
            ),
        ),
        topics=("basics", "arithmetic"),
    )


def strings_exercise() -> Exercise:
    return Exercise(
        exercise_id="reverse-string",
        statement="Read a line and print it reversed.",
        steps=(
            ExerciseStep(
                prompt="Reverse the input line.",
                hint="Slicing with [::-1] reverses a string.",
                cases=(TestCase(input="abc\n", expected_output="cba\n"),),
            ),
        ),
        topics=("strings",),
    )


def workspace(tmp_path: Path) -> Path:
    root = tmp_path / "workspace"
    root.mkdir(exist_ok=True)
    return root


DATA_DIR = Path(__file__).resolve().parent.parent / "data"
TOY_PROBLEMS_PATH = DATA_DIR / "toy_problems.jsonl"


def actor_binding(role: str, temperature: float = 0.7) -> ModelBinding:
    """Binding for a non-agent actor (student, baseline tutor, rater)."""
    return ModelBinding(
        agent_role=role,
        provider_id=PROVIDER_ID,
        model_name="scripted",
        temperature=temperature,
    )
