"""Provider gateway: one seam between agents and chat-completion backends.

Design notes:
- Providers implement a single complete() method; the gateway owns retry
  policy and registration so callers never talk to a backend directly.
- Transient transport failures are retried with exponential backoff; rate
  limits are surfaced immediately so callers can decide how to back off.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence, runtime_checkable

from codeedu.errors import (
    BindingError,
    DuplicateProviderError,
    ProviderUnreachableError,
    UnknownProviderError,
)

logger = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant", "tool")
FINISH_REASONS = ("stop", "length", "error")

RETRY_LIMIT = 3  # retries after the first attempt
BACKOFF_BASE_SECONDS = 0.1


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str
    author_agent: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown chat role: {self.role!r}")
        if self.role in ("user", "assistant") and not self.content:
            raise ValueError(f"{self.role} message must have content")


@dataclass(frozen=True)
class TokenUsage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def __post_init__(self) -> None:
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be non-negative")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    finish_reason: str
    usage: TokenUsage = field(default_factory=TokenUsage)

    def __post_init__(self) -> None:
        if self.finish_reason not in FINISH_REASONS:
            raise ValueError(f"unknown finish reason: {self.finish_reason!r}")
        if self.finish_reason == "stop" and not self.text:
            raise ValueError("a completion that stopped normally cannot be empty")


@dataclass(frozen=True)
class ModelBinding:
    """Which provider and sampling settings an agent role talks through."""

    agent_role: str
    provider_id: str
    model_name: str
    temperature: float = 0.7
    max_output_tokens: int = 1024

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of range: {self.temperature}")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")


@runtime_checkable
class Provider(Protocol):
    def complete(self, binding: ModelBinding, messages: Sequence[ChatMessage]) -> CompletionResult:
        ...


class Gateway:
    """Registry of providers plus the retry loop around complete()."""

    def __init__(
        self,
        backoff_base: float = BACKOFF_BASE_SECONDS,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self._providers: dict[str, Provider] = {}
        self._backoff_base = backoff_base
        self._sleep = sleep

    def register_provider(self, provider_id: str, provider: Provider) -> None:
        if provider_id in self._providers:
            raise DuplicateProviderError(f"provider already registered: {provider_id}")
        self._providers[provider_id] = provider

    def provider_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._providers))

    def complete(self, binding: ModelBinding, messages: Sequence[ChatMessage]) -> CompletionResult:
        """Run one chat completion.

        Raises:
            ValueError: messages is empty.
            UnknownProviderError: binding names an unregistered provider.
            ProviderUnreachableError: transport kept failing after retries.
        """
        if not messages:
            raise ValueError("complete() needs at least one message")
        provider = self._providers.get(binding.provider_id)
        if provider is None:
            raise UnknownProviderError(f"no such provider: {binding.provider_id}")
        frozen = tuple(messages)
        attempts = 0
        while True:
            attempts += 1
            try:
                return provider.complete(binding, frozen)
            except ProviderUnreachableError as exc:
                if attempts > RETRY_LIMIT:
                    raise ProviderUnreachableError(
                        f"provider {binding.provider_id} unreachable: {exc}", attempts
                    ) from exc
                delay = self._backoff_base * (2 ** (attempts - 1))
                logger.warning(
                    "provider %s unreachable (attempt %d), retrying in %.2fs",
                    binding.provider_id,
                    attempts,
                    delay,
                )
                self._sleep(delay)


def validate_bindings(bindings: Iterable[ModelBinding], required_roles: Iterable[str]) -> dict[str, ModelBinding]:
    """Check that every required agent role has exactly one binding.

    Returns a role -> binding map. Raises BindingError on a missing or
    duplicated role so misconfiguration dies at startup, not mid-session.
    """
    by_role: dict[str, ModelBinding] = {}
    for binding in bindings:
        if binding.agent_role in by_role:
            raise BindingError(f"role bound more than once: {binding.agent_role}")
        by_role[binding.agent_role] = binding
    missing = [role for role in required_roles if role not in by_role]
    if missing:
        raise BindingError(f"roles without a model binding: {', '.join(sorted(missing))}")
    return by_role
