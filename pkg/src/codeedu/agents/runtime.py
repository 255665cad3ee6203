"""The agent act loop.

One task, one agent, a bounded number of completions. Each model reply must
be a single-line JSON action: a tool call, a final artifact, or a question
back to the user. A malformed (or discipline-breaking) action earns exactly
one repair re-prompt for the whole task; the step cap bounds completions so
a looping model cannot run away.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any

from codeedu.agents.profiles import AgentProfile
from codeedu.errors import (
    ActionProtocolError,
    CapabilityMismatchError,
    StepCapExceededError,
    ToolError,
    ToolFailureError,
)
from codeedu.llm.gateway import ChatMessage, Gateway, ModelBinding
from codeedu.planning.tasks import TaskSpec
from codeedu.tools.registry import ToolRegistry

logger = logging.getLogger(__name__)

DEFAULT_STEP_CAP = 8

OUTCOME_STATUSES = ("done", "failed", "needs_user_input")


@dataclass(frozen=True)
class TaskOutcome:
    task_id: str
    status: str
    produced_artifacts: dict[str, Any] = field(default_factory=dict)
    transcript: tuple[ChatMessage, ...] = ()

    def __post_init__(self) -> None:
        if self.status not in OUTCOME_STATUSES:
            raise ValueError(f"unknown outcome status: {self.status!r}")


@dataclass(frozen=True)
class _Action:
    kind: str  # tool | final | ask_user
    tool: str = ""
    arguments: dict[str, Any] = field(default_factory=dict)
    artifact: Any = None
    question: str = ""


def _parse_action(text: str) -> _Action | None:
    """Extract the first parseable single-line JSON action, else None."""
    candidates = [text.strip()] + [line.strip() for line in text.splitlines()]
    for candidate in candidates:
        if not candidate.startswith("{"):
            continue
        try:
            payload = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if not isinstance(payload, dict):
            continue
        if "tool" in payload and isinstance(payload.get("arguments"), dict):
            if isinstance(payload["tool"], str):
                return _Action(kind="tool", tool=payload["tool"], arguments=payload["arguments"])
        if payload.get("final") is True and "artifact" in payload:
            return _Action(kind="final", artifact=payload["artifact"])
        if isinstance(payload.get("ask_user"), str):
            return _Action(kind="ask_user", question=payload["ask_user"])
    return None


def assemble_task_prompt(agent: AgentProfile, task: TaskSpec, context: str) -> list[ChatMessage]:
    parts = [f"Task ({task.type.value}): {task.description}"]
    if task.inputs:
        parts.append("Inputs:\n" + json.dumps(task.inputs, indent=2, sort_keys=True))
    if context:
        parts.append("Context:\n" + context)
    return [
        ChatMessage(role="system", content=agent.role_prompt),
        ChatMessage(role="user", content="\n\n".join(parts)),
    ]


def run_agent_task(
    agent: AgentProfile,
    task: TaskSpec,
    context: str,
    gateway: Gateway,
    binding: ModelBinding,
    registry: ToolRegistry,
    step_cap: int = DEFAULT_STEP_CAP,
) -> TaskOutcome:
    """Drive one agent through one task.

    Raises:
        CapabilityMismatchError: the task type is outside the agent's set.
        ToolFailureError: a bound tool failed; carries the tool name.
        StepCapExceededError: the loop did not converge within step_cap.
        ActionProtocolError: replies stayed malformed after one repair.
    """
    if task.type not in agent.capabilities:
        raise CapabilityMismatchError(
            f"agent {agent.agent_id} cannot execute {task.type.value} tasks"
        )
    messages = assemble_task_prompt(agent, task, context)
    repair_used = False
    for _ in range(step_cap):
        completion = gateway.complete(binding, messages)
        messages.append(
            ChatMessage(role="assistant", content=completion.text, author_agent=agent.agent_id)
        )
        action = _parse_action(completion.text)

        problem: str | None = None
        if action is None:
            problem = (
                "Your last reply was not a valid action. Reply with exactly one line "
                'of JSON: {"tool": ..., "arguments": {...}} or {"final": true, '
                '"artifact": ...} or {"ask_user": "..."}.'
            )
        elif action.kind == "tool" and action.tool not in agent.tool_bindings:
            allowed = ", ".join(sorted(agent.tool_bindings)) or "none"
            problem = (
                f"The tool {action.tool!r} is not bound to you. "
                f"Tools available to you: {allowed}."
            )

        if problem is not None:
            if repair_used:
                raise ActionProtocolError(
                    f"agent {agent.agent_id} kept emitting invalid actions for task {task.task_id}"
                )
            repair_used = True
            messages.append(ChatMessage(role="user", content=problem))
            continue

        assert action is not None
        if action.kind == "final":
            artifacts = action.artifact if isinstance(action.artifact, dict) else {"result": action.artifact}
            return TaskOutcome(
                task_id=task.task_id,
                status="done",
                produced_artifacts=artifacts,
                transcript=tuple(messages),
            )
        if action.kind == "ask_user":
            return TaskOutcome(
                task_id=task.task_id,
                status="needs_user_input",
                produced_artifacts={"question": action.question},
                transcript=tuple(messages),
            )

        try:
            result = registry.invoke(action.tool, action.arguments)
        except ToolError as exc:
            raise ToolFailureError(
                f"tool {action.tool} failed during task {task.task_id}: {exc}",
                tool_name=action.tool,
            ) from exc
        messages.append(
            ChatMessage(
                role="tool",
                content=json.dumps(result, sort_keys=True, default=str),
                author_agent=agent.agent_id,
            )
        )
    raise StepCapExceededError(
        f"task {task.task_id} did not converge within {step_cap} completions"
    )
