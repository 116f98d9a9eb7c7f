"""Session events: the append-only record every engine state is folded from."""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Callable, Iterable

from ..errors import EventLogError

EVENT_VERSION = 1

Clock = Callable[[], datetime]


def utc_clock() -> datetime:
    return datetime.now(timezone.utc)


class FixedClock:
    """Deterministic clock for simulations: fixed start, fixed step per call."""

    def __init__(self, start: str = "2026-01-01T00:00:00+00:00", step_seconds: float = 1.0):
        self._t = datetime.fromisoformat(start)
        self._step = timedelta(seconds=step_seconds)

    def __call__(self) -> datetime:
        now = self._t
        self._t = self._t + self._step
        return now


def format_ts(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


@dataclass(frozen=True)
class SessionEvent:
    """One appended fact; seq is gapless from 1 within a session."""

    seq: int
    ts: str
    session_id: str
    kind: str
    payload: dict

    def to_json(self) -> str:
        doc = {
            "v": EVENT_VERSION,
            "seq": self.seq,
            "ts": self.ts,
            "session_id": self.session_id,
            "kind": self.kind,
            "payload": self.payload,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "SessionEvent":
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise EventLogError(f"malformed event line: {exc.msg}")
        try:
            return cls(
                seq=int(doc["seq"]),
                ts=str(doc["ts"]),
                session_id=str(doc["session_id"]),
                kind=str(doc["kind"]),
                payload=dict(doc.get("payload", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise EventLogError(f"malformed event object: {exc}")


def check_gapless(events: Iterable[SessionEvent]) -> None:
    """Raise if the sequence numbers are not exactly 1, 2, 3, ..."""
    expected = 1
    for event in events:
        if event.seq != expected:
            raise EventLogError(f"event log gap: expected seq {expected}, got {event.seq}",
                                missing=expected)
        expected += 1


def write_event_log(events: Iterable[SessionEvent], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(event.to_json() + "\n")


def read_event_log(path) -> list[SessionEvent]:
    events = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(SessionEvent.from_json(line))
    return events
