"""Deterministic scripted fixtures for offline (mock-provider) evaluation runs.

The generated fixture scripts every actor in a full run: role agents, the
baseline tutor, the readiness probe, the material rater, and one simulated
student per (level, problem, coach) combination. Draft strength follows a
fixed rule so post-tutoring scores beat pre-test scores, and the platform
tutor beats the baseline, by construction rather than by chance.

Matching uses substring-last mode: every completion is routed by its newest
message alone, because long-lived actors (students especially) accumulate
every earlier marker in their history.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

from codeedu.evaluation.episodes import PRE_TEST_TAG
from codeedu.evaluation.problems import Problem
from codeedu.evaluation.students import StudentLevel
from codeedu.llm.mock import FixtureEntry, ScriptedFixture
from codeedu.tools.crawler import write_crawl_fixture

CRAWL_QUERY = "python basics"
CRAWL_URLS = (
    "https://example.edu/python-basics/working-with-input",
    "https://example.edu/python-basics/small-programs",
)

FALLBACK_WEAK_SOURCE = 'print("not sure yet")'

# Out of every block of five problems (by dataset order), how many a fresh
# student of each level already solves on the pre-test.
PRE_SOLVED_PER_FIVE = {
    StudentLevel.LOW: 1,
    StudentLevel.MEDIUM: 2,
    StudentLevel.HIGH: 3,
}
# Baseline tutoring lifts each level by one problem per block of five; the
# platform tutor lifts every problem.
BASELINE_LIFT = 1


def _final(artifact: dict) -> str:
    return json.dumps({"final": True, "artifact": artifact})


def _draft_reply(source: str) -> str:
    return f"Here is my attempt:\n```python\n{source}\n```\n"


def _draft_source(problem: Problem, index: int, level: StudentLevel, coach: str) -> str:
    """Pick the scripted draft for one (problem, level, coach) cell."""
    weak = problem.sample_code or FALLBACK_WEAK_SOURCE
    strong = problem.reference_solution
    if strong is None:
        return weak
    block_position = index % 5
    if coach == "codeedu":
        return strong
    threshold = PRE_SOLVED_PER_FIVE[level]
    if coach == "baseline":
        threshold += BASELINE_LIFT
    return strong if block_position < threshold else weak


def build_default_fixture(problems: Sequence[Problem]) -> ScriptedFixture:
    """Script a complete offline run over the given problems."""
    entries: list[FixtureEntry] = []

    # Per-student draft replies. These matchers are the most specific, so they
    # go first; one entry serves all K attempts for its cell.
    for level in StudentLevel:
        for coach in (PRE_TEST_TAG, "baseline", "codeedu"):
            for index, problem in enumerate(problems):
                source = _draft_source(problem, index, level, coach)
                entries.append(
                    FixtureEntry(
                        matcher=(
                            f"level={level.value} problem={problem.problem_id} "
                            f"coached_by={coach}"
                        ),
                        response=_draft_reply(source),
                        max_uses=None,
                    )
                )

    # The researcher's second step: once a crawl result (with its "hits" key)
    # is in the prompt, report the fetched sources.
    entries.append(
        FixtureEntry(
            matcher='"hits":',
            response=_final({"sources": list(CRAWL_URLS)}),
            max_uses=None,
        )
    )
    entries.append(
        FixtureEntry(
            matcher="Task (knowledge_retrieval)",
            response=json.dumps(
                {"tool": "web_crawler", "arguments": {"query": CRAWL_QUERY}}
            ),
            max_uses=None,
        )
    )
    entries.append(
        FixtureEntry(
            matcher="Task (material_generation)",
            response=_final(
                {
                    "sections": [
                        {
                            "heading": "Reading input cleanly",
                            "body": (
                                "Start every small program by deciding exactly what "
                                "arrives on standard input and in what shape."
                            ),
                            "source_refs": [CRAWL_URLS[0]],
                        },
                        {
                            "heading": "Check one example by hand",
                            "body": (
                                "Before coding, trace one sample input to its output "
                                "on paper; the program then only has to copy that trace."
                            ),
                            "source_refs": [CRAWL_URLS[1]],
                        },
                    ]
                }
            ),
            max_uses=None,
        )
    )
    entries.append(
        FixtureEntry(
            matcher="Task (tutoring_qa)",
            response=_final(
                {
                    "answer": (
                        "Restate the problem in your own words, handle one input "
                        "shape at a time, and test with the smallest example first."
                    )
                }
            ),
            max_uses=None,
        )
    )
    entries.append(
        FixtureEntry(
            matcher="Task (debugging_review)",
            response=_final({"suggestions": ["Compare your output to the expected text character by character."]}),
            max_uses=None,
        )
    )
    entries.append(
        FixtureEntry(
            matcher="Task (report_generation)",
            response=_final(
                {
                    "summary": "The student worked through guided practice problems.",
                    "recommendations": ["Keep solving one small problem per day."],
                }
            ),
            max_uses=None,
        )
    )

    # Students stop studying after the first exchange so offline runs stay fast.
    entries.append(
        FixtureEntry(matcher="[early-stop-check]", response="STOP", max_uses=None)
    )
    entries.append(
        FixtureEntry(
            matcher="[student-chat]",
            response="Could you walk me through how to approach this problem?",
            max_uses=None,
        )
    )
    # The baseline tutor's newest message is the student's scripted question.
    entries.append(
        FixtureEntry(
            matcher="walk me through how to approach",
            response=(
                "Look at the input format first, then write the smallest program "
                "that handles one example correctly."
            ),
            max_uses=None,
        )
    )
    # The rater's newest message is the material digest.
    entries.append(
        FixtureEntry(
            matcher="Material topic:",
            response="IA=4 CC=5 INT=3 PER=4",
            max_uses=None,
        )
    )
    return ScriptedFixture(entries, match_mode="substring-last")


def make_crawl_corpus(directory: str | Path) -> Path:
    """Write the crawl fixture the scripted researcher expects to find."""
    directory = Path(directory)
    hits = [
        {
            "url": url,
            "title": f"Notes: {url.rsplit('/', 1)[-1].replace('-', ' ')}",
            "snippet": "Short practical notes for beginner Python programs.",
            "fetched_text": (
                "Read stdin once, transform it, print the answer. "
                "Keep the program to a handful of lines."
            ),
        }
        for url in CRAWL_URLS
    ]
    return write_crawl_fixture(directory, CRAWL_QUERY, hits)
