"""Minimal OpenAI-compatible chat provider over HTTP.

Only what the platform needs: POST /chat/completions, bearer auth, typed
errors. The gateway owns retries; this provider raises once per attempt.
"""

from __future__ import annotations

from typing import Sequence

import httpx

from codeedu.errors import GatewayError, ProviderUnreachableError, RateLimitedError
from codeedu.llm.gateway import ChatMessage, CompletionResult, ModelBinding, TokenUsage


class OpenAiChatProvider:
    def __init__(self, base_url: str, api_key: str | None, timeout: float = 60.0) -> None:
        self.base_url = base_url.rstrip("/")
        self._api_key = api_key
        self._timeout = timeout

    def complete(self, binding: ModelBinding, messages: Sequence[ChatMessage]) -> CompletionResult:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        body = {
            "model": binding.model_name,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": binding.temperature,
            "max_tokens": binding.max_output_tokens,
        }
        try:
            response = httpx.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers=headers,
                timeout=self._timeout,
            )
        except httpx.HTTPError as exc:
            raise ProviderUnreachableError(str(exc), attempts=1) from exc
        if response.status_code == 429:
            raise RateLimitedError(f"rate limited by {self.base_url}")
        if response.status_code >= 500:
            raise ProviderUnreachableError(
                f"server error {response.status_code} from {self.base_url}", attempts=1
            )
        if response.status_code >= 400:
            raise GatewayError(f"request rejected ({response.status_code}): {response.text[:200]}")
        payload = response.json()
        try:
            choice = payload["choices"][0]
            text = choice["message"]["content"] or ""
            finish = choice.get("finish_reason", "stop")
        except (KeyError, IndexError, TypeError) as exc:
            raise GatewayError(f"malformed completion payload: {exc}") from exc
        if finish not in ("stop", "length"):
            finish = "error"
        usage = payload.get("usage", {})
        return CompletionResult(
            text=text,
            finish_reason=finish if (text or finish != "stop") else "error",
            usage=TokenUsage(
                prompt_tokens=int(usage.get("prompt_tokens", 0)),
                completion_tokens=int(usage.get("completion_tokens", 0)),
            ),
        )
