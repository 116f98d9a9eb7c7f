"""Persistent session store: append-only JSONL logs plus an index file.

Each session's events live in ``events/<session_id>.jsonl``; the index holds
resource metadata. A restart replays every log through the engines' own
transition functions, so reconstructed state is exactly the live state. One
asyncio lock per session serializes commands (single logical writer); if a
command or its persistence fails midway, the in-memory engine is rebuilt from
disk, which makes commands atomic: all events of a command or none.
"""

from __future__ import annotations

import asyncio
import json
import os
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import CapacityError, ConfigError, MayaError
from ..sessions import (
    BoardConfig,
    GameEngine,
    PainEngine,
    SessionEvent,
    UtautEngine,
    utc_clock,
)

SESSION_KINDS = ("game", "pain", "utaut")
_END = object()  # subscriber sentinel


@dataclass
class SessionRuntime:
    session_id: str
    kind: str
    created_at: str
    engine: object
    config: dict = field(default_factory=dict)
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    subscribers: list[asyncio.Queue] = field(default_factory=list)

    @property
    def status(self) -> str:
        phase = getattr(self.engine.state, "phase", "active")
        if phase == "finished":
            return "finished"
        if phase == "aborted":
            return "aborted"
        return "active"

    @property
    def events(self) -> list[SessionEvent]:
        return self.engine.events

    def resource(self) -> dict:
        return {
            "session_id": self.session_id,
            "kind": self.kind,
            "created_at": self.created_at,
            "status": self.status,
            "config": self.config,
            "last_seq": len(self.events),
            "state": self.engine.state.snapshot(),
        }


def _new_engine(kind: str, session_id: str, config: dict, clock) -> object:
    if kind == "game":
        board = BoardConfig.from_dict(config.get("board", {}))
        return GameEngine(
            session_id=session_id,
            config=board,
            child_name=str(config.get("child_name", "")),
            seed=int(config.get("seed", 0)),
            clock=clock,
        )
    if kind == "pain":
        return PainEngine(session_id=session_id, clock=clock)
    if kind == "utaut":
        return UtautEngine(session_id=session_id, clock=clock)
    raise ConfigError(f"unknown session kind {kind!r}")


def _resume_engine(kind: str, events: list[SessionEvent], clock) -> object:
    if kind == "game":
        return GameEngine.resume(events, clock=clock)
    if kind == "pain":
        return PainEngine.resume(events, clock=clock)
    if kind == "utaut":
        return UtautEngine.resume(events, clock=clock)
    raise ConfigError(f"unknown session kind {kind!r}")


class SessionStore:
    def __init__(self, data_dir, max_sessions: int = 64, clock=utc_clock):
        self.data_dir = Path(data_dir)
        self.events_dir = self.data_dir / "events"
        self.index_path = self.data_dir / "index.json"
        self.max_sessions = max_sessions
        self.clock = clock
        self.runtimes: dict[str, SessionRuntime] = {}
        self.events_dir.mkdir(parents=True, exist_ok=True)
        self._load()

    # -- persistence ---------------------------------------------------------

    def _log_path(self, session_id: str) -> Path:
        return self.events_dir / f"{session_id}.jsonl"

    def _write_index(self) -> None:
        doc = {
            "v": 1,
            "sessions": [
                {
                    "session_id": rt.session_id,
                    "kind": rt.kind,
                    "created_at": rt.created_at,
                    "status": rt.status,
                    "config": rt.config,
                }
                for rt in self.runtimes.values()
            ],
        }
        tmp = self.index_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True, indent=1), encoding="utf-8")
        os.replace(tmp, self.index_path)

    def _append_events(self, session_id: str, events: list[SessionEvent]) -> None:
        lines = "".join(event.to_json() + "\n" for event in events)
        with open(self._log_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(lines)
            fh.flush()
            os.fsync(fh.fileno())

    def _load(self) -> None:
        if not self.index_path.exists():
            return
        doc = json.loads(self.index_path.read_text(encoding="utf-8"))
        for entry in doc.get("sessions", []):
            session_id = entry["session_id"]
            path = self._log_path(session_id)
            if not path.exists():
                continue
            events = []
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        events.append(SessionEvent.from_json(line))
            engine = _resume_engine(entry["kind"], events, self.clock)
            self.runtimes[session_id] = SessionRuntime(
                session_id=session_id,
                kind=entry["kind"],
                created_at=entry["created_at"],
                engine=engine,
                config=entry.get("config", {}),
            )

    # -- API -----------------------------------------------------------------

    def active_count(self) -> int:
        return sum(1 for rt in self.runtimes.values() if rt.status == "active")

    def get(self, session_id: str) -> SessionRuntime:
        rt = self.runtimes.get(session_id)
        if rt is None:
            raise KeyError(session_id)
        return rt

    def create_session(self, kind: str, config: Optional[dict] = None) -> SessionRuntime:
        if kind not in SESSION_KINDS:
            raise ConfigError(f"kind must be one of {SESSION_KINDS}, got {kind!r}")
        if self.active_count() >= self.max_sessions:
            raise CapacityError(f"capacity of {self.max_sessions} active sessions reached")
        config = config or {}
        session_id = f"{kind}-{uuid.uuid4().hex[:12]}"
        engine = _new_engine(kind, session_id, config, self.clock)
        rt = SessionRuntime(
            session_id=session_id,
            kind=kind,
            created_at=engine.events[0].ts,
            engine=engine,
            config=config,
        )
        self._append_events(session_id, engine.events)
        self.runtimes[session_id] = rt
        self._write_index()
        return rt

    async def execute(self, session_id: str, fn) -> tuple[list[SessionEvent], object]:
        """Run one engine command atomically; returns (new events, fn result)."""
        rt = self.get(session_id)
        async with rt.lock:
            mark = len(rt.events)
            was_active = rt.status == "active"
            try:
                result = fn(rt.engine)
                new_events = rt.events[mark:]
                if new_events:
                    self._append_events(session_id, new_events)
            except MayaError:
                self._rollback(rt, mark)
                raise
            except Exception:
                self._rollback(rt, mark)
                raise
            if new_events:
                self._broadcast(rt, new_events)
            if was_active and rt.status != "active":
                self._write_index()
                self._finish_streams(rt)
            return new_events, result

    def _rollback(self, rt: SessionRuntime, mark: int) -> None:
        if len(rt.events) == mark:
            return
        events = rt.events[:mark]
        rt.engine = _resume_engine(rt.kind, events, self.clock)

    # -- streaming -----------------------------------------------------------

    def _broadcast(self, rt: SessionRuntime, events: list[SessionEvent]) -> None:
        for queue in list(rt.subscribers):
            for event in events:
                queue.put_nowait(event)

    def _finish_streams(self, rt: SessionRuntime) -> None:
        for queue in list(rt.subscribers):
            queue.put_nowait(_END)

    async def subscribe(self, session_id: str, from_seq: int = 1):
        """Async generator: backlog from from_seq, then live events in seq order."""
        rt = self.get(session_id)
        async with rt.lock:
            backlog = [e for e in rt.events if e.seq >= from_seq]
            live = rt.status == "active"
            queue: Optional[asyncio.Queue] = None
            if live:
                queue = asyncio.Queue()
                rt.subscribers.append(queue)
        try:
            for event in backlog:
                yield event
            if queue is not None:
                while True:
                    item = await queue.get()
                    if item is _END:
                        break
                    yield item
        finally:
            if queue is not None and queue in rt.subscribers:
                rt.subscribers.remove(queue)
