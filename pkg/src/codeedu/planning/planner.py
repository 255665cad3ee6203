"""Event-driven planning: decomposition, assignment, scheduling.

Decomposition is rule-based by default (a committed rule table, so tests can
pin exact plans) with an optional LLM-assisted mode that validates the
model's proposal and allows a single repair attempt. Assignment is a pure
scoring function over agent profiles, so the same inputs always pick the
same agent.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

from codeedu.agents.profiles import AgentProfile
from codeedu.errors import (
    CycleError,
    DecompositionError,
    EmptyRequestError,
    NoCapableAgentError,
    UnknownTaskError,
)
from codeedu.llm.gateway import ChatMessage, Gateway, ModelBinding
from codeedu.planning.tasks import (
    ConversationHistory,
    PlanState,
    TaskSpec,
    TaskStatus,
    TaskType,
)
from codeedu.tools import (
    TOOL_CODE_INTERPRETER,
    TOOL_DEEP_RESEARCH,
    TOOL_FILE_IO,
    TOOL_WEB_CRAWLER,
)

logger = logging.getLogger(__name__)

# Tools a task type leans on; owning them raises an agent's suitability.
REQUIRED_TOOLS: dict[TaskType, frozenset[str]] = {
    TaskType.KNOWLEDGE_RETRIEVAL: frozenset({TOOL_WEB_CRAWLER}),
    TaskType.MATERIAL_GENERATION: frozenset(),
    TaskType.TUTORING_QA: frozenset({TOOL_DEEP_RESEARCH}),
    TaskType.CODING_EXERCISE: frozenset({TOOL_CODE_INTERPRETER}),
    TaskType.DEBUGGING_REVIEW: frozenset({TOOL_CODE_INTERPRETER}),
    TaskType.REPORT_GENERATION: frozenset({TOOL_FILE_IO}),
}

CAPABILITY_SCORE = 10
TOOL_SCORE = 2
LOAD_PENALTY = 1

# A request is treated as a single question when it looks interrogative.
QUESTION_OPENERS = frozenset(
    {"what", "why", "how", "when", "where", "which", "who", "can", "does", "is", "are", "explain"}
)

USER_MESSAGE_PRIORITY = 10

FULL_CHAIN = (
    TaskType.KNOWLEDGE_RETRIEVAL,
    TaskType.MATERIAL_GENERATION,
    TaskType.CODING_EXERCISE,
    TaskType.REPORT_GENERATION,
)


@dataclass(frozen=True)
class PlanEvent:
    kind: str  # task-completed | task-failed | user-message
    task_id: str | None = None
    message: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("task-completed", "task-failed", "user-message"):
            raise ValueError(f"unknown plan event kind: {self.kind!r}")


def looks_like_single_question(request: str) -> bool:
    stripped = request.strip()
    if stripped.endswith("?"):
        return True
    first_word = stripped.split()[0].lower() if stripped.split() else ""
    return first_word in QUESTION_OPENERS


def decompose(
    request: str,
    profile: object | None = None,
    history: ConversationHistory | None = None,
) -> PlanState:
    """Rule-based decomposition of a student request into a plan.

    A question becomes a single tutoring_qa task; anything else becomes the
    standard retrieval -> material -> exercise -> report chain.
    """
    if not request.strip():
        raise EmptyRequestError("cannot decompose an empty request")
    if looks_like_single_question(request):
        task = TaskSpec(
            task_id="t1-tutoring_qa",
            type=TaskType.TUTORING_QA,
            description=f"Answer the student's question: {request.strip()}",
            inputs={"question": request.strip()},
        )
        return PlanState.from_tasks([task])
    tasks = []
    previous: str | None = None
    for index, task_type in enumerate(FULL_CHAIN, start=1):
        task_id = f"t{index}-{task_type.value}"
        tasks.append(
            TaskSpec(
                task_id=task_id,
                type=task_type,
                description=f"{task_type.value.replace('_', ' ')} for: {request.strip()}",
                inputs={"request": request.strip()},
                depends_on=frozenset({previous}) if previous else frozenset(),
            )
        )
        previous = task_id
    return PlanState.from_tasks(tasks)


def decompose_llm(
    request: str,
    gateway: Gateway,
    binding: ModelBinding,
    planner_prompt: str,
    history: ConversationHistory | None = None,
) -> PlanState:
    """LLM-assisted decomposition with schema validation and one repair."""
    if not request.strip():
        raise EmptyRequestError("cannot decompose an empty request")
    messages = [
        ChatMessage(role="system", content=planner_prompt),
        ChatMessage(role="user", content=f"Decompose this student request into tasks: {request.strip()}"),
    ]
    last_error = ""
    for attempt in range(2):
        completion = gateway.complete(binding, messages)
        try:
            return _plan_from_reply(completion.text)
        except (ValueError, KeyError, CycleError, UnknownTaskError) as exc:
            last_error = str(exc)
            logger.warning("planner proposal invalid (attempt %d): %s", attempt + 1, last_error)
            messages.append(ChatMessage(role="assistant", content=completion.text))
            messages.append(
                ChatMessage(
                    role="user",
                    content=f"That plan was invalid ({last_error}). Reply again with valid plan JSON.",
                )
            )
    raise DecompositionError(f"planner kept proposing invalid plans: {last_error}")


def _plan_from_reply(text: str) -> PlanState:
    start = text.find("{")
    if start < 0:
        raise ValueError("no JSON object in reply")
    payload = json.loads(text[start:])
    if isinstance(payload.get("artifact"), dict):
        payload = payload["artifact"]
    items = payload["tasks"]
    if not isinstance(items, list) or not items:
        raise ValueError("plan must contain at least one task")
    tasks = [
        TaskSpec(
            task_id=item["task_id"],
            type=TaskType(item["type"]),
            description=item.get("description", ""),
            inputs=item.get("inputs", {}),
            depends_on=frozenset(item.get("depends_on", [])),
            priority=item.get("priority", 0),
        )
        for item in items
    ]
    return PlanState.from_tasks(tasks)


def suitability(
    task: TaskSpec,
    agent: AgentProfile,
    running_counts: Mapping[str, int] | None = None,
) -> int | None:
    """Score an agent for a task; None when the agent is not capable."""
    if task.type not in agent.capabilities:
        return None
    score = CAPABILITY_SCORE
    score += TOOL_SCORE * len(REQUIRED_TOOLS[task.type] & agent.tool_bindings)
    if running_counts:
        score -= LOAD_PENALTY * running_counts.get(agent.agent_id, 0)
    return score


def assign(
    task: TaskSpec,
    agents: Sequence[AgentProfile],
    history: ConversationHistory | None = None,
    running_counts: Mapping[str, int] | None = None,
) -> AgentProfile:
    """Pick the most suitable agent; ties break on lexicographic agent_id."""
    best: tuple[int, str] | None = None
    chosen: AgentProfile | None = None
    for agent in agents:
        score = suitability(task, agent, running_counts)
        if score is None:
            continue
        key = (-score, agent.agent_id)
        if best is None or key < best:
            best = key
            chosen = agent
    if chosen is None:
        raise NoCapableAgentError(f"no registered agent can execute {task.type.value} tasks")
    return chosen


def next_ready(plan: PlanState) -> tuple[TaskSpec, ...]:
    """Tasks whose dependencies are all done and which have not started.

    Ordered by priority descending, then task_id ascending.
    """
    plan.refresh_readiness()
    candidates = [
        plan.tasks[task_id]
        for task_id, status in plan.statuses.items()
        if status in (TaskStatus.PENDING, TaskStatus.READY) and plan.deps_done(task_id)
    ]
    return tuple(sorted(candidates, key=lambda t: (-t.priority, t.task_id)))


def on_event(plan: PlanState, event: PlanEvent) -> PlanState:
    """Advance the plan in response to one event. Mutates and returns plan."""
    if event.kind == "task-completed":
        if event.task_id is None:
            raise ValueError("task-completed event needs a task_id")
        plan.mark_done(event.task_id)
    elif event.kind == "task-failed":
        if event.task_id is None:
            raise ValueError("task-failed event needs a task_id")
        plan.require(event.task_id)
        _fail_cascade(plan, event.task_id)
    else:  # user-message
        index = len(plan.tasks) + 1
        plan.add_task(
            TaskSpec(
                task_id=f"t{index}-tutoring_qa",
                type=TaskType.TUTORING_QA,
                description=f"Answer the student's question: {event.message or ''}",
                inputs={"question": event.message or ""},
                priority=USER_MESSAGE_PRIORITY,
            )
        )
    plan.validate()
    return plan


def _fail_cascade(plan: PlanState, task_id: str) -> None:
    plan.statuses[task_id] = TaskStatus.FAILED
    for dependent in plan.dependents_of(task_id):
        if plan.statuses[dependent] != TaskStatus.FAILED:
            _fail_cascade(plan, dependent)
