"""Provider/binding configuration.

Config files carry endpoints and bindings only. API keys come exclusively
from the environment (CODEEDU_PROVIDER_<ID>_KEY) and are never read from or
written to config files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from codeedu.llm.gateway import ModelBinding

DEFAULT_TEMPERATURES = {"programmer": 0.2}
FALLBACK_TEMPERATURE = 0.7


@dataclass(frozen=True)
class ProviderSpec:
    provider_id: str
    base_url: str
    model_names: tuple[str, ...]


def default_temperature(agent_role: str) -> float:
    return DEFAULT_TEMPERATURES.get(agent_role.lower(), FALLBACK_TEMPERATURE)


def api_key_for(provider_id: str, env: dict[str, str] | None = None) -> str | None:
    source = os.environ if env is None else env
    return source.get(f"CODEEDU_PROVIDER_{provider_id.upper()}_KEY")


def load_provider_config(path: str | Path) -> tuple[list[ProviderSpec], list[ModelBinding]]:
    """Parse the provider config JSON.

    Shape:
        {"providers": [{"id", "base_url", "model_names"}],
         "bindings":  [{"agent_role", "provider_id", "model_name",
                        "temperature"?, "max_output_tokens"?}]}

    Raises ValueError on unknown provider references or models a provider
    does not serve; binding validation proper (one per role) happens at
    platform startup via validate_bindings.
    """
    payload = json.loads(Path(path).read_text())
    providers = [
        ProviderSpec(
            provider_id=item["id"],
            base_url=item["base_url"],
            model_names=tuple(item.get("model_names", [])),
        )
        for item in payload.get("providers", [])
    ]
    by_id = {p.provider_id: p for p in providers}
    if len(by_id) != len(providers):
        raise ValueError("duplicate provider id in config")
    bindings = []
    for item in payload.get("bindings", []):
        provider = by_id.get(item["provider_id"])
        if provider is None:
            raise ValueError(f"binding references unknown provider: {item['provider_id']}")
        if provider.model_names and item["model_name"] not in provider.model_names:
            raise ValueError(
                f"provider {provider.provider_id} does not serve model {item['model_name']}"
            )
        bindings.append(
            ModelBinding(
                agent_role=item["agent_role"],
                provider_id=item["provider_id"],
                model_name=item["model_name"],
                temperature=item.get("temperature", default_temperature(item["agent_role"])),
                max_output_tokens=item.get("max_output_tokens", 1024),
            )
        )
    return providers, bindings
