"""Task model: the closed task-type set, task specs and plan state.

A plan is a DAG over task ids. Acyclicity is validated on construction and
after every mutation; callers never hold a cyclic plan.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

from codeedu.errors import CycleError, UnknownTaskError


class TaskType(str, Enum):
    KNOWLEDGE_RETRIEVAL = "knowledge_retrieval"
    MATERIAL_GENERATION = "material_generation"
    TUTORING_QA = "tutoring_qa"
    CODING_EXERCISE = "coding_exercise"
    DEBUGGING_REVIEW = "debugging_review"
    REPORT_GENERATION = "report_generation"


class TaskStatus(str, Enum):
    PENDING = "pending"
    READY = "ready"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    type: TaskType
    description: str
    inputs: dict[str, Any] = field(default_factory=dict)
    depends_on: frozenset[str] = frozenset()
    priority: int = 0

    def __post_init__(self) -> None:
        if not self.task_id:
            raise ValueError("task_id must be non-empty")
        if self.task_id in self.depends_on:
            raise ValueError(f"task {self.task_id} depends on itself")


@dataclass(frozen=True)
class HistoryEntry:
    kind: str  # message | outcome
    author: str
    content: str


class ConversationHistory:
    """Append-only record of attributed messages and task outcomes."""

    def __init__(self) -> None:
        self._entries: list[HistoryEntry] = []

    def append(self, kind: str, author: str, content: str) -> None:
        self._entries.append(HistoryEntry(kind=kind, author=author, content=content))

    @property
    def entries(self) -> tuple[HistoryEntry, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)


def _check_acyclic(tasks: dict[str, TaskSpec]) -> None:
    """Kahn's algorithm; raises CycleError when some edge set never drains."""
    indegree = {task_id: 0 for task_id in tasks}
    dependents: dict[str, list[str]] = {task_id: [] for task_id in tasks}
    for task in tasks.values():
        for dep in task.depends_on:
            if dep not in tasks:
                raise UnknownTaskError(f"task {task.task_id} depends on unknown task {dep}")
            indegree[task.task_id] += 1
            dependents[dep].append(task.task_id)
    queue = deque(task_id for task_id, degree in indegree.items() if degree == 0)
    seen = 0
    while queue:
        current = queue.popleft()
        seen += 1
        for child in dependents[current]:
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if seen != len(tasks):
        cyclic = sorted(task_id for task_id, degree in indegree.items() if degree > 0)
        raise CycleError(f"plan contains a dependency cycle through: {', '.join(cyclic)}")


@dataclass
class PlanState:
    tasks: dict[str, TaskSpec] = field(default_factory=dict)
    statuses: dict[str, TaskStatus] = field(default_factory=dict)
    assignments: dict[str, str] = field(default_factory=dict)  # task_id -> agent_id

    @classmethod
    def from_tasks(cls, tasks: Iterable[TaskSpec]) -> "PlanState":
        plan = cls()
        task_map: dict[str, TaskSpec] = {}
        for task in tasks:
            if task.task_id in task_map:
                raise ValueError(f"duplicate task id: {task.task_id}")
            task_map[task.task_id] = task
        _check_acyclic(task_map)
        plan.tasks = task_map
        plan.statuses = {task_id: TaskStatus.PENDING for task_id in task_map}
        plan.refresh_readiness()
        return plan

    def validate(self) -> None:
        _check_acyclic(self.tasks)

    def add_task(self, task: TaskSpec) -> None:
        if task.task_id in self.tasks:
            raise ValueError(f"duplicate task id: {task.task_id}")
        candidate = dict(self.tasks)
        candidate[task.task_id] = task
        _check_acyclic(candidate)
        self.tasks = candidate
        self.statuses[task.task_id] = TaskStatus.PENDING
        self.refresh_readiness()

    def require(self, task_id: str) -> TaskSpec:
        task = self.tasks.get(task_id)
        if task is None:
            raise UnknownTaskError(f"no such task in plan: {task_id}")
        return task

    def deps_done(self, task_id: str) -> bool:
        return all(self.statuses[dep] == TaskStatus.DONE for dep in self.require(task_id).depends_on)

    def refresh_readiness(self) -> None:
        for task_id, status in self.statuses.items():
            if status == TaskStatus.PENDING and self.deps_done(task_id):
                self.statuses[task_id] = TaskStatus.READY

    def assign(self, task_id: str, agent_id: str) -> None:
        self.require(task_id)
        self.assignments[task_id] = agent_id

    def mark_running(self, task_id: str) -> None:
        self.require(task_id)
        self.statuses[task_id] = TaskStatus.RUNNING

    def mark_done(self, task_id: str) -> None:
        self.require(task_id)
        if task_id not in self.assignments:
            raise ValueError(f"task {task_id} finished without ever being assigned")
        self.statuses[task_id] = TaskStatus.DONE
        self.refresh_readiness()

    def dependents_of(self, task_id: str) -> tuple[str, ...]:
        return tuple(t.task_id for t in self.tasks.values() if task_id in t.depends_on)

    @property
    def is_settled(self) -> bool:
        return all(s in (TaskStatus.DONE, TaskStatus.FAILED) for s in self.statuses.values())

    def to_json_dict(self) -> dict:
        return {
            "tasks": {
                task_id: {
                    "type": task.type.value,
                    "description": task.description,
                    "inputs": task.inputs,
                    "priority": task.priority,
                }
                for task_id, task in sorted(self.tasks.items())
            },
            "statuses": {task_id: status.value for task_id, status in sorted(self.statuses.items())},
            "assignments": dict(sorted(self.assignments.items())),
            "edges": sorted(
                [dep, task.task_id] for task in self.tasks.values() for dep in task.depends_on
            ),
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "PlanState":
        deps: dict[str, set[str]] = {task_id: set() for task_id in payload.get("tasks", {})}
        for dep, child in payload.get("edges", []):
            deps[child].add(dep)
        tasks = [
            TaskSpec(
                task_id=task_id,
                type=TaskType(item["type"]),
                description=item.get("description", ""),
                inputs=item.get("inputs", {}),
                depends_on=frozenset(deps[task_id]),
                priority=item.get("priority", 0),
            )
            for task_id, item in payload.get("tasks", {}).items()
        ]
        plan = cls.from_tasks(tasks)
        for task_id, status in payload.get("statuses", {}).items():
            plan.statuses[task_id] = TaskStatus(status)
        plan.assignments = dict(payload.get("assignments", {}))
        plan.validate()
        return plan
