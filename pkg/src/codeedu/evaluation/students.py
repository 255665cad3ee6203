"""Simulated students with level-dependent information exposure."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from codeedu.evaluation.problems import Problem
from codeedu.llm.gateway import ChatMessage, Gateway, ModelBinding

EARLY_STOP_MARKER = "[early-stop-check]"
CHAT_MARKER = "[student-chat]"
DRAFT_MARKER = "[draft-request]"

STOP_TOKENS = frozenset({"STOP", "YES"})


class StudentLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


def student_system_prompt(level: StudentLevel, problem: Problem) -> str:
    """Build the student persona prompt, exposing only the fields the level allows.

    Low-level students see the problem statement alone; medium-level students
    additionally get the background concepts; high-level students get the
    statement, concepts, sample code, and the reference solution.
    """
    lines = [
        f"You are role-playing a {level.value}-level coding student working on one problem.",
        "Stay in character: ask for help when confused, and write Python when asked to solve.",
        "",
        f"Problem {problem.problem_id}: {problem.title}",
        "Statement:",
        problem.statement,
    ]
    if level in (StudentLevel.MEDIUM, StudentLevel.HIGH):
        lines += ["", "Background concepts:", problem.concepts]
    if level is StudentLevel.HIGH:
        if problem.sample_code:
            lines += ["", "Sample code:", problem.sample_code]
        if problem.reference_solution:
            lines += ["", "Reference solution:", problem.reference_solution]
    return "\n".join(lines)


@dataclass
class SimulatedStudent:
    """A conversational student actor backed by an LLM completion endpoint.

    The actor keeps its own running history: chat turns, readiness probes, and
    solution drafts all append to it, so later completions see earlier context.
    """

    level: StudentLevel
    problem: Problem
    gateway: Gateway
    binding: ModelBinding
    history: list[ChatMessage] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.history:
            self.history.append(
                ChatMessage(role="system", content=student_system_prompt(self.level, self.problem))
            )

    @property
    def system_prompt(self) -> str:
        return self.history[0].content

    def _complete(self, user_content: str) -> str:
        self.history.append(ChatMessage(role="user", content=user_content))
        result = self.gateway.complete(self.binding, self.history)
        self.history.append(ChatMessage(role="assistant", content=result.text))
        return result.text

    def chat_reply(self, tutor_text: str | None) -> str:
        """Produce the student's next chat message (the first one opens the conversation)."""
        if tutor_text is None:
            prompt = (
                f"{CHAT_MARKER} Open the conversation: tell the tutor what you are working on "
                "and ask your first question."
            )
        else:
            prompt = f"{CHAT_MARKER} The tutor replied:\n{tutor_text}\nRespond as the student."
        return self._complete(prompt)

    def wants_to_stop(self) -> bool:
        """Ask the student whether they feel ready to attempt the problem unaided."""
        reply = self._complete(
            f"{EARLY_STOP_MARKER} Are you ready to stop studying and attempt the problem "
            "on your own? Answer with a single word: STOP or CONTINUE."
        )
        tokens = reply.strip().split()
        return bool(tokens) and tokens[0].strip(".,!").upper() in STOP_TOKENS

    def draft_solution(self, coached_by: str, attempt: int) -> str:
        """Ask the student for one full solution attempt; returns the raw reply."""
        return self._complete(
            f"{DRAFT_MARKER} level={self.level.value} problem={self.problem.problem_id} "
            f"coached_by={coached_by} attempt={attempt}\n"
            "Write your complete Python solution reading from standard input and printing "
            "the answer. Put the final program in a fenced code block."
        )


def build_student(
    level: StudentLevel | str,
    problem: Problem,
    gateway: Gateway,
    binding: ModelBinding,
) -> SimulatedStudent:
    return SimulatedStudent(
        level=StudentLevel(level),
        problem=problem,
        gateway=gateway,
        binding=binding,
    )
