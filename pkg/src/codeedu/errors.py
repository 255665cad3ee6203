"""Shared exception hierarchy.

Every error raised across module boundaries derives from CodeEduError so
callers can catch platform failures without fishing for module-local types.
"""

from __future__ import annotations


class CodeEduError(Exception):
    """Base class for all platform errors."""


# --- LLM gateway ---


class GatewayError(CodeEduError):
    pass


class DuplicateProviderError(GatewayError):
    pass


class UnknownProviderError(GatewayError):
    pass


class ProviderUnreachableError(GatewayError):
    """Raised after retries are exhausted; carries the attempt count."""

    def __init__(self, message: str, attempts: int) -> None:
        super().__init__(message)
        self.attempts = attempts


class RateLimitedError(GatewayError):
    pass


class FixtureExhaustedError(GatewayError):
    pass


class BindingError(GatewayError):
    """A role is missing a model binding, or has more than one."""


# --- tool pool ---


class ToolError(CodeEduError):
    pass


class UnknownToolError(ToolError):
    pass


class SchemaMismatchError(ToolError):
    pass


class SandboxSetupError(ToolError):
    pass


class PathEscapeError(ToolError):
    pass


class WorkspaceFileNotFoundError(ToolError):
    pass


class NetworkUnavailableError(ToolError):
    pass


# --- agent pool ---


class AgentError(CodeEduError):
    pass


class DuplicateAgentError(AgentError):
    pass


class CapabilityMismatchError(AgentError):
    pass


class ToolFailureError(AgentError):
    """A tool invocation failed inside an agent loop; carries the tool name."""

    def __init__(self, message: str, tool_name: str) -> None:
        super().__init__(message)
        self.tool_name = tool_name


class StepCapExceededError(AgentError):
    pass


class ActionProtocolError(AgentError):
    """The model's action reply stayed malformed after the repair re-prompt."""


# --- planner ---


class PlannerError(CodeEduError):
    pass


class EmptyRequestError(PlannerError):
    pass


class DecompositionError(PlannerError):
    pass


class CycleError(PlannerError):
    pass


class NoCapableAgentError(PlannerError):
    pass


class UnknownTaskError(PlannerError):
    pass


# --- session orchestrator ---


class SessionError(CodeEduError):
    pass


class MissingIntakeFieldError(SessionError):
    def __init__(self, field_name: str) -> None:
        super().__init__(f"intake answer missing required field: {field_name}")
        self.field_name = field_name


class PhaseError(SessionError):
    pass


class TurnLimitReachedError(SessionError):
    pass


class UnknownExerciseError(SessionError):
    pass


class NothingToReportError(SessionError):
    """A report was requested before anything happened in the session."""


class StepOrderError(SessionError):
    pass


# --- evaluation harness ---


class EvalError(CodeEduError):
    pass


class DatasetError(EvalError):
    pass


class UndefinedBaselineError(EvalError):
    """Improvement rate is undefined when the pre-tutoring score is zero."""


class UnparseableRatingError(EvalError):
    pass
