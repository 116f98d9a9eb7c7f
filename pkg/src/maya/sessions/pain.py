"""The two-mode pain protocol: records, counterbalancing, event-sourced session."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

from ..errors import ConfigError, DuplicateRecordError, EventLogError, PhaseError, RangeError
from .driver import LoggingRobotDriver, RobotAction, RobotDriver
from .events import Clock, SessionEvent, check_gapless, format_ts, utc_clock


class PainMode(str, Enum):
    A_NO_ROBOT = "A_no_robot"
    B_WITH_ROBOT = "B_with_robot"


# Face-glyph names for the 11-point chart, index = reported score.
PAIN_FACES = (
    "no hurt",
    "hurts a tiny bit",
    "hurts a little",
    "hurts a little more",
    "hurts more",
    "hurts a lot",
    "hurts even more",
    "hurts a whole lot",
    "hurts very much",
    "hurts terribly",
    "hurts worst",
)


@dataclass(frozen=True)
class PainRecord:
    participant_id: str
    mode: PainMode
    score: int
    order_index: int = 0

    def __post_init__(self):
        if not isinstance(self.score, int) or isinstance(self.score, bool):
            raise RangeError(f"pain score must be an integer, got {self.score!r}")
        if not 0 <= self.score <= 10:
            raise RangeError(f"pain score must be 0..10, got {self.score}")


@dataclass(frozen=True)
class CounterbalanceAssignment:
    """Per-participant first mode, with the odd-count tiebreak documented."""

    first_modes: tuple[PainMode, ...]
    extra_mode: Optional[PainMode]
    seed: int

    def counts(self) -> dict[PainMode, int]:
        return {
            mode: sum(1 for m in self.first_modes if m is mode)
            for mode in PainMode
        }


def counterbalance_assign(n: int, seed: int = 0) -> CounterbalanceAssignment:
    """Split n participants into A-first and B-first halves, shuffled by seed.

    One mode receives ceil(n/2) participants; which one gets the extra slot
    when n is odd alternates with the seed's parity.
    """
    if n < 1:
        raise ConfigError(f"need at least 1 participant, got {n}")
    big, small = (PainMode.A_NO_ROBOT, PainMode.B_WITH_ROBOT) if seed % 2 == 0 else (
        PainMode.B_WITH_ROBOT, PainMode.A_NO_ROBOT)
    modes = [big] * math.ceil(n / 2) + [small] * (n // 2)
    random.Random(seed).shuffle(modes)
    return CounterbalanceAssignment(
        first_modes=tuple(modes),
        extra_mode=big if n % 2 == 1 else None,
        seed=seed,
    )


@dataclass
class PainSessionState:
    records: list[PainRecord] = field(default_factory=list)
    phase: str = "active"

    def taken(self) -> set[tuple[str, str]]:
        return {(r.participant_id, r.mode.value) for r in self.records}

    def snapshot(self) -> dict:
        return {
            "phase": self.phase,
            "records": [
                {
                    "participant_id": r.participant_id,
                    "mode": r.mode.value,
                    "score": r.score,
                    "order_index": r.order_index,
                }
                for r in self.records
            ],
        }


def apply_pain_event(state: Optional[PainSessionState], event: SessionEvent) -> PainSessionState:
    kind = event.kind
    p = event.payload
    if kind == "session_started":
        if state is not None:
            raise EventLogError("session_started after start")
        return PainSessionState()
    if state is None:
        raise EventLogError(f"first event must be session_started, got {kind}")
    if kind == "pain_recorded":
        state.records.append(PainRecord(
            participant_id=str(p["participant_id"]),
            mode=PainMode(p["mode"]),
            score=int(p["score"]),
            order_index=int(p["order_index"]),
        ))
        return state
    if kind == "robot_action":
        return state
    if kind == "session_aborted":
        state.phase = "aborted"
        return state
    raise EventLogError(f"unknown event kind {kind!r} at seq {event.seq}")


class PainEngine:
    kind = "pain"

    def __init__(self, session_id: str, clock: Clock = utc_clock,
                 driver: Optional[RobotDriver] = None):
        self.session_id = session_id
        self.clock = clock
        self.driver = driver or LoggingRobotDriver(clock)
        self.events: list[SessionEvent] = []
        self.state: Optional[PainSessionState] = None
        self._emit("session_started", {"session_kind": self.kind})

    @classmethod
    def resume(cls, events: Sequence[SessionEvent], clock: Clock = utc_clock,
               driver: Optional[RobotDriver] = None) -> "PainEngine":
        check_gapless(events)
        if not events:
            raise EventLogError("cannot resume from an empty log")
        engine = object.__new__(cls)
        engine.session_id = events[0].session_id
        engine.clock = clock
        engine.driver = driver or LoggingRobotDriver(clock)
        engine.events = list(events)
        state = None
        for event in events:
            state = apply_pain_event(state, event)
        engine.state = state
        return engine

    def _emit(self, kind: str, payload: dict) -> SessionEvent:
        event = SessionEvent(
            seq=len(self.events) + 1,
            ts=format_ts(self.clock()),
            session_id=self.session_id,
            kind=kind,
            payload=payload,
        )
        self.state = apply_pain_event(self.state, event)
        payload["state_after"] = self.state.snapshot()
        self.events.append(event)
        return event

    def record_pain(self, participant_id: str, mode: PainMode, score: int) -> SessionEvent:
        """At most one score per (participant, mode); integers 0..10 only."""
        if self.state.phase != "active":
            raise PhaseError("session is not active", phase=self.state.phase)
        mode = PainMode(mode)
        record = PainRecord(participant_id, mode, score)  # validates the score
        if (participant_id, mode.value) in self.state.taken():
            raise DuplicateRecordError(
                f"participant {participant_id} already has a {mode.value} score"
            )
        return self._emit("pain_recorded", {
            "participant_id": record.participant_id,
            "mode": mode.value,
            "score": record.score,
            "order_index": len(self.state.records),
        })

    def robot_action(self, kind: str, **params) -> SessionEvent:
        event = self._emit("robot_action", {"action": kind, "params": params})
        self.driver.dispatch(RobotAction(kind, params))
        return event

    def abort(self) -> SessionEvent:
        if self.state.phase != "active":
            raise PhaseError("session already over", phase=self.state.phase)
        return self._emit("session_aborted", {})


def replay_pain(events: Sequence[SessionEvent]) -> PainSessionState:
    check_gapless(events)
    if not events:
        raise EventLogError("empty event log")
    state: Optional[PainSessionState] = None
    for event in events:
        state = apply_pain_event(state, event)
    return state
