"""Scripted provider for offline tests and deterministic eval runs.

A fixture is an ordered list of canned responses. In the default sequence
mode entries are consumed strictly in order. In substring mode each request
picks the first entry (by position) whose matcher occurs in the rendered
conversation; entries can allow repeated use for probe-style prompts.
Substring-last mode matches against the newest message only, which keeps
long-lived actors scriptable after their history has accumulated every
earlier marker. Running past the script is always an error, never a silent
default.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from codeedu.errors import FixtureExhaustedError
from codeedu.llm.gateway import ChatMessage, CompletionResult, ModelBinding, TokenUsage

MATCH_MODES = ("sequence", "substring", "substring-last")


@dataclass(frozen=True)
class FixtureEntry:
    response: str
    matcher: str | None = None
    max_uses: int | None = 1  # None = unlimited


class ScriptedFixture:
    """Session-scoped script of provider replies. Access is serialized."""

    def __init__(self, entries: Sequence[FixtureEntry], match_mode: str = "sequence") -> None:
        if match_mode not in MATCH_MODES:
            raise ValueError(f"unknown match mode: {match_mode!r}")
        if match_mode != "sequence":
            for entry in entries:
                if entry.matcher is None:
                    raise ValueError(
                        f"{match_mode} fixtures need a matcher on every entry"
                    )
        self.match_mode = match_mode
        self._entries = list(entries)
        self._uses = [0] * len(entries)
        self._cursor = 0
        self._lock = threading.Lock()

    def take(self, rendered_request: str, last_message: str | None = None) -> str:
        haystack = rendered_request
        if self.match_mode == "substring-last" and last_message is not None:
            haystack = last_message
        with self._lock:
            if self.match_mode == "sequence":
                if self._cursor >= len(self._entries):
                    raise FixtureExhaustedError(
                        f"fixture exhausted after {len(self._entries)} scripted replies"
                    )
                entry = self._entries[self._cursor]
                self._cursor += 1
                return entry.response
            for index, entry in enumerate(self._entries):
                if entry.max_uses is not None and self._uses[index] >= entry.max_uses:
                    continue
                assert entry.matcher is not None
                if entry.matcher in haystack:
                    self._uses[index] += 1
                    return entry.response
            raise FixtureExhaustedError(
                "no unconsumed fixture entry matches the request "
                f"(tail: {haystack[-160:]!r})"
            )

    @property
    def remaining(self) -> int:
        if self.match_mode == "sequence":
            return len(self._entries) - self._cursor
        return sum(
            1
            for index, entry in enumerate(self._entries)
            if entry.max_uses is None or self._uses[index] < entry.max_uses
        )


class MockProvider:
    """Provider backed entirely by a ScriptedFixture. No I/O, no clock, no RNG."""

    def __init__(self, fixture: ScriptedFixture) -> None:
        self.fixture = fixture

    def complete(self, binding: ModelBinding, messages: Sequence[ChatMessage]) -> CompletionResult:
        rendered = "\n".join(f"{m.role}: {m.content}" for m in messages)
        last = f"{messages[-1].role}: {messages[-1].content}" if messages else ""
        text = self.fixture.take(rendered, last_message=last)
        usage = TokenUsage(
            prompt_tokens=sum(len(m.content.split()) for m in messages),
            completion_tokens=len(text.split()),
        )
        return CompletionResult(text=text, finish_reason="stop", usage=usage)


def fixture_from_dict(payload: dict) -> ScriptedFixture:
    entries = [
        FixtureEntry(
            response=item["response"],
            matcher=item.get("matcher"),
            max_uses=item.get("max_uses", 1),
        )
        for item in payload.get("entries", [])
    ]
    return ScriptedFixture(entries, match_mode=payload.get("mode", "sequence"))


def load_fixture(path: str | Path) -> ScriptedFixture:
    """Load a fixture from a JSON file, or merge every *.json in a directory.

    Directory merge order is by file name, so scripts stay reproducible.
    Mixed modes inside one directory are rejected.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(path.glob("*.json"))
        if not files:
            raise FileNotFoundError(f"no fixture files in {path}")
        payloads = [json.loads(f.read_text()) for f in files]
        modes = {p.get("mode", "sequence") for p in payloads}
        if len(modes) > 1:
            raise ValueError(f"fixture directory mixes match modes: {sorted(modes)}")
        merged = {
            "mode": modes.pop(),
            "entries": [e for p in payloads for e in p.get("entries", [])],
        }
        return fixture_from_dict(merged)
    return fixture_from_dict(json.loads(path.read_text()))
