"""Append-only session event log, persisted as JSONL.

The in-memory list and the on-disk file grow together; nothing is ever
rewritten. A condition variable lets stream consumers block for the next
event without polling the file.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

EVENT_KINDS = ("intake", "material", "question", "answer", "submission", "feedback", "report")


@dataclass(frozen=True)
class EventRecord:
    ts: str
    kind: str
    payload: dict[str, Any]

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {self.kind!r}")


class EventLog:
    def __init__(self, path: Path, clock: Callable[[], str]) -> None:
        self.path = path
        self._clock = clock
        self._records: list[EventRecord] = []
        self._lock = threading.Lock()
        self._changed = threading.Condition(self._lock)
        path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, kind: str, payload: dict[str, Any]) -> EventRecord:
        record = EventRecord(ts=self._clock(), kind=kind, payload=payload)
        line = json.dumps({"ts": record.ts, "kind": record.kind, "payload": record.payload}, sort_keys=True)
        with self._changed:
            with self.path.open("a") as handle:
                handle.write(line + "\n")
            self._records.append(record)
            self._changed.notify_all()
        return record

    @property
    def records(self) -> tuple[EventRecord, ...]:
        with self._lock:
            return tuple(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def wait_for_more(self, seen: int, timeout: float) -> bool:
        """Block until the log grows beyond `seen` records. True when it did."""
        with self._changed:
            if len(self._records) > seen:
                return True
            self._changed.wait(timeout)
            return len(self._records) > seen

    @classmethod
    def replay(cls, path: Path, clock: Callable[[], str]) -> "EventLog":
        log = cls(path, clock)
        if path.is_file():
            for line in path.read_text().splitlines():
                if not line.strip():
                    continue
                item = json.loads(line)
                log._records.append(EventRecord(ts=item["ts"], kind=item["kind"], payload=item["payload"]))
        return log
