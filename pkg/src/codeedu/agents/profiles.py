"""Agent profiles and the default five-agent pool.

Each default agent carries the tool bindings its job actually needs and the
task types it is capable of executing; the planner executes nothing itself,
it only plans.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from codeedu.errors import DuplicateAgentError
from codeedu.planning.tasks import TaskType
from codeedu.tools import (
    TOOL_CODE_INTERPRETER,
    TOOL_DEEP_RESEARCH,
    TOOL_FILE_IO,
    TOOL_WEB_CRAWLER,
)

PROMPTS_DIR = Path(__file__).parent / "prompts"

ROLE_PLANNER = "planner"
ROLE_RESEARCHER = "researcher"
ROLE_REPORT_ANALYST = "report_analyst"
ROLE_PROGRAMMER = "programmer"
ROLE_TUTOR = "tutor"

ALL_ROLES = (ROLE_PLANNER, ROLE_RESEARCHER, ROLE_REPORT_ANALYST, ROLE_PROGRAMMER, ROLE_TUTOR)


@dataclass(frozen=True)
class AgentProfile:
    agent_id: str
    role_name: str
    role_prompt: str
    tool_bindings: frozenset[str] = frozenset()
    capabilities: frozenset[TaskType] = frozenset()


def load_role_prompt(role_name: str) -> str:
    path = PROMPTS_DIR / f"{role_name}.txt"
    if not path.is_file():
        raise FileNotFoundError(f"no prompt asset for role {role_name!r} at {path}")
    return path.read_text()


class AgentPool:
    """Registry of agent profiles keyed by agent_id."""

    def __init__(self) -> None:
        self._agents: dict[str, AgentProfile] = {}

    def register(self, profile: AgentProfile) -> None:
        if profile.agent_id in self._agents:
            raise DuplicateAgentError(f"agent already registered: {profile.agent_id}")
        self._agents[profile.agent_id] = profile

    def get(self, agent_id: str) -> AgentProfile:
        if agent_id not in self._agents:
            raise KeyError(f"no such agent: {agent_id}")
        return self._agents[agent_id]

    def by_role(self, role_name: str) -> AgentProfile:
        for profile in self.list_agents():
            if profile.role_name == role_name:
                return profile
        raise KeyError(f"no agent with role: {role_name}")

    def list_agents(self) -> tuple[AgentProfile, ...]:
        """Stable listing, ordered by agent_id."""
        return tuple(self._agents[agent_id] for agent_id in sorted(self._agents))


def build_default_pool() -> AgentPool:
    """The stock five agents with their standard tool bindings."""
    pool = AgentPool()
    pool.register(
        AgentProfile(
            agent_id=ROLE_PLANNER,
            role_name=ROLE_PLANNER,
            role_prompt=load_role_prompt(ROLE_PLANNER),
        )
    )
    pool.register(
        AgentProfile(
            agent_id=ROLE_RESEARCHER,
            role_name=ROLE_RESEARCHER,
            role_prompt=load_role_prompt(ROLE_RESEARCHER),
            tool_bindings=frozenset({TOOL_WEB_CRAWLER}),
            capabilities=frozenset({TaskType.KNOWLEDGE_RETRIEVAL, TaskType.MATERIAL_GENERATION}),
        )
    )
    pool.register(
        AgentProfile(
            agent_id=ROLE_REPORT_ANALYST,
            role_name=ROLE_REPORT_ANALYST,
            role_prompt=load_role_prompt(ROLE_REPORT_ANALYST),
            tool_bindings=frozenset({TOOL_FILE_IO}),
            capabilities=frozenset({TaskType.REPORT_GENERATION}),
        )
    )
    pool.register(
        AgentProfile(
            agent_id=ROLE_PROGRAMMER,
            role_name=ROLE_PROGRAMMER,
            role_prompt=load_role_prompt(ROLE_PROGRAMMER),
            tool_bindings=frozenset({TOOL_CODE_INTERPRETER}),
            capabilities=frozenset({TaskType.CODING_EXERCISE, TaskType.DEBUGGING_REVIEW}),
        )
    )
    pool.register(
        AgentProfile(
            agent_id=ROLE_TUTOR,
            role_name=ROLE_TUTOR,
            role_prompt=load_role_prompt(ROLE_TUTOR),
            tool_bindings=frozenset({TOOL_DEEP_RESEARCH}),
            capabilities=frozenset({TaskType.TUTORING_QA}),
        )
    )
    return pool
