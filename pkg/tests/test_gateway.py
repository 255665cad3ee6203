from __future__ import annotations

import json

import pytest

from codeedu.errors import (
    BindingError,
    DuplicateProviderError,
    FixtureExhaustedError,
    ProviderUnreachableError,
    RateLimitedError,
    UnknownProviderError,
)
from codeedu.llm.config import api_key_for, default_temperature, load_provider_config
from codeedu.llm.gateway import (
    ChatMessage,
    CompletionResult,
    Gateway,
    ModelBinding,
    TokenUsage,
    validate_bindings,
)
from codeedu.llm.mock import FixtureEntry, MockProvider, ScriptedFixture, load_fixture

BINDING = ModelBinding(agent_role="tutor", provider_id="mock", model_name="scripted")


def make_gateway(*responses: str, mode: str = "sequence", matchers: tuple[str, ...] = ()) -> Gateway:
    if mode == "substring":
        entries = [FixtureEntry(response=r, matcher=m) for r, m in zip(responses, matchers)]
    else:
        entries = [FixtureEntry(response=r) for r in responses]
    gateway = Gateway()
    gateway.register_provider("mock", MockProvider(ScriptedFixture(entries, match_mode=mode)))
    return gateway


def test_sequence_fixture_replies_in_order() -> None:
    gateway = make_gateway("first", "second")
    messages = [ChatMessage(role="user", content="anything")]
    assert gateway.complete(BINDING, messages).text == "first"
    assert gateway.complete(BINDING, messages).text == "second"


def test_fixture_exhaustion_is_an_error() -> None:
    gateway = make_gateway("only")
    messages = [ChatMessage(role="user", content="hi")]
    gateway.complete(BINDING, messages)
    with pytest.raises(FixtureExhaustedError):
        gateway.complete(BINDING, messages)


def test_substring_fixture_matches_out_of_order() -> None:
    gateway = make_gateway(
        "about loops", "about types", mode="substring", matchers=("loops", "types")
    )
    assert gateway.complete(BINDING, [ChatMessage(role="user", content="tell me about types")]).text == "about types"
    assert gateway.complete(BINDING, [ChatMessage(role="user", content="now loops please")]).text == "about loops"
    with pytest.raises(FixtureExhaustedError):
        gateway.complete(BINDING, [ChatMessage(role="user", content="loops again")])


def test_substring_entries_require_matchers() -> None:
    with pytest.raises(ValueError):
        ScriptedFixture([FixtureEntry(response="x")], match_mode="substring")


def test_unlimited_use_entries_can_repeat() -> None:
    fixture = ScriptedFixture(
        [FixtureEntry(response="CONTINUE", matcher="stop?", max_uses=None)],
        match_mode="substring",
    )
    gateway = Gateway()
    gateway.register_provider("mock", MockProvider(fixture))
    for _ in range(3):
        assert gateway.complete(BINDING, [ChatMessage(role="user", content="stop?")]).text == "CONTINUE"


def test_empty_messages_precondition() -> None:
    gateway = make_gateway("x")
    with pytest.raises(ValueError):
        gateway.complete(BINDING, [])


def test_unregistered_provider() -> None:
    gateway = Gateway()
    with pytest.raises(UnknownProviderError):
        gateway.complete(BINDING, [ChatMessage(role="user", content="hi")])


def test_duplicate_provider_registration() -> None:
    gateway = make_gateway("x")
    with pytest.raises(DuplicateProviderError):
        gateway.register_provider("mock", MockProvider(ScriptedFixture([])))


def test_complete_does_not_mutate_messages() -> None:
    gateway = make_gateway("reply")
    messages = [ChatMessage(role="system", content="s"), ChatMessage(role="user", content="u")]
    snapshot = list(messages)
    gateway.complete(BINDING, messages)
    assert messages == snapshot


def test_mock_determinism_across_gateways() -> None:
    def run() -> list[str]:
        gateway = make_gateway("a", "b", "c")
        msg = [ChatMessage(role="user", content="same request")]
        return [gateway.complete(BINDING, msg).text for _ in range(3)]

    assert run() == run()


class FlakyProvider:
    def __init__(self, failures: int) -> None:
        self.failures = failures
        self.calls = 0

    def complete(self, binding, messages) -> CompletionResult:
        self.calls += 1
        if self.calls <= self.failures:
            raise ProviderUnreachableError("connection refused", attempts=1)
        return CompletionResult(text="ok", finish_reason="stop")


def test_retries_with_exponential_backoff_then_succeeds() -> None:
    sleeps: list[float] = []
    gateway = Gateway(backoff_base=0.1, sleep=sleeps.append)
    provider = FlakyProvider(failures=2)
    gateway.register_provider("mock", provider)
    result = gateway.complete(BINDING, [ChatMessage(role="user", content="hi")])
    assert result.text == "ok"
    assert provider.calls == 3
    assert sleeps == [pytest.approx(0.1), pytest.approx(0.2)]


def test_unreachable_error_carries_attempt_count() -> None:
    sleeps: list[float] = []
    gateway = Gateway(backoff_base=0.1, sleep=sleeps.append)
    gateway.register_provider("mock", FlakyProvider(failures=99))
    with pytest.raises(ProviderUnreachableError) as excinfo:
        gateway.complete(BINDING, [ChatMessage(role="user", content="hi")])
    assert excinfo.value.attempts == 4  # first try plus three retries
    assert sleeps == [pytest.approx(0.1), pytest.approx(0.2), pytest.approx(0.4)]


class RateLimitedProvider:
    def complete(self, binding, messages):
        raise RateLimitedError("slow down")


def test_rate_limit_surfaces_without_retry() -> None:
    sleeps: list[float] = []
    gateway = Gateway(sleep=sleeps.append)
    gateway.register_provider("mock", RateLimitedProvider())
    with pytest.raises(RateLimitedError):
        gateway.complete(BINDING, [ChatMessage(role="user", content="hi")])
    assert sleeps == []


# --- types ---


def test_message_role_validation() -> None:
    with pytest.raises(ValueError):
        ChatMessage(role="wizard", content="x")
    with pytest.raises(ValueError):
        ChatMessage(role="user", content="")


def test_binding_validation() -> None:
    with pytest.raises(ValueError):
        ModelBinding(agent_role="tutor", provider_id="p", model_name="m", temperature=2.5)
    with pytest.raises(ValueError):
        ModelBinding(agent_role="tutor", provider_id="p", model_name="m", max_output_tokens=0)


def test_stopped_completion_cannot_be_empty() -> None:
    with pytest.raises(ValueError):
        CompletionResult(text="", finish_reason="stop")
    assert CompletionResult(text="", finish_reason="length").text == ""


def test_usage_counts_non_negative() -> None:
    with pytest.raises(ValueError):
        TokenUsage(prompt_tokens=-1)


def test_validate_bindings_one_per_role() -> None:
    bindings = [
        ModelBinding(agent_role="tutor", provider_id="p", model_name="m"),
        ModelBinding(agent_role="programmer", provider_id="p", model_name="m"),
    ]
    by_role = validate_bindings(bindings, ["tutor", "programmer"])
    assert set(by_role) == {"tutor", "programmer"}
    with pytest.raises(BindingError):
        validate_bindings(bindings, ["tutor", "programmer", "planner"])
    with pytest.raises(BindingError):
        validate_bindings(bindings + [bindings[0]], ["tutor"])


# --- config ---


def test_provider_config_round_trip(tmp_path) -> None:
    config = {
        "providers": [{"id": "main", "base_url": "http://localhost:9", "model_names": ["m1"]}],
        "bindings": [{"agent_role": "programmer", "provider_id": "main", "model_name": "m1"}],
    }
    path = tmp_path / "providers.json"
    path.write_text(json.dumps(config))
    providers, bindings = load_provider_config(path)
    assert providers[0].provider_id == "main"
    assert bindings[0].temperature == 0.2  # programmer default
    assert bindings[0].max_output_tokens == 1024


def test_provider_config_rejects_unknown_references(tmp_path) -> None:
    path = tmp_path / "bad.json"
    path.write_text(
        json.dumps({"providers": [], "bindings": [{"agent_role": "tutor", "provider_id": "ghost", "model_name": "m"}]})
    )
    with pytest.raises(ValueError):
        load_provider_config(path)
    path.write_text(
        json.dumps(
            {
                "providers": [{"id": "p", "base_url": "http://x", "model_names": ["served"]}],
                "bindings": [{"agent_role": "tutor", "provider_id": "p", "model_name": "other"}],
            }
        )
    )
    with pytest.raises(ValueError):
        load_provider_config(path)


def test_default_temperatures_by_role() -> None:
    assert default_temperature("programmer") == 0.2
    assert default_temperature("Programmer") == 0.2
    assert default_temperature("tutor") == 0.7
    assert default_temperature("researcher") == 0.7


def test_api_keys_come_from_environment_only() -> None:
    env = {"CODEEDU_PROVIDER_MAIN_KEY": "sk-test"}
    assert api_key_for("main", env) == "sk-test"
    assert api_key_for("other", env) is None


def test_fixture_file_and_directory_loading(tmp_path) -> None:
    (tmp_path / "b_second.json").write_text(
        json.dumps({"mode": "substring", "entries": [{"matcher": "two", "response": "2"}]})
    )
    (tmp_path / "a_first.json").write_text(
        json.dumps({"mode": "substring", "entries": [{"matcher": "one", "response": "1"}]})
    )
    fixture = load_fixture(tmp_path)
    assert fixture.remaining == 2
    assert fixture.take("one please") == "1"
    single = tmp_path / "a_first.json"
    assert load_fixture(single).take("one") == "1"
