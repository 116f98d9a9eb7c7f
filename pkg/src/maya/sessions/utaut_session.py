"""Event-sourced administration of the 43-item questionnaire."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import DuplicateRecordError, EventLogError, PhaseError, StatsError
from ..stats.utaut import GROUPS, NUM_QUESTIONS, UTAUTResponse
from .events import Clock, SessionEvent, check_gapless, format_ts, utc_clock


@dataclass
class UtautSessionState:
    # (respondent_id, question) -> answer
    answers: dict[tuple[str, int], int] = field(default_factory=dict)
    groups: dict[str, str] = field(default_factory=dict)
    dyads: dict[str, Optional[str]] = field(default_factory=dict)
    phase: str = "active"

    def answered(self, respondent_id: str) -> set[int]:
        return {q for (rid, q) in self.answers if rid == respondent_id}

    def missing(self, respondent_id: str) -> list[int]:
        got = self.answered(respondent_id)
        return [q for q in range(1, NUM_QUESTIONS + 1) if q not in got]

    def complete_responses(self) -> list[UTAUTResponse]:
        out = []
        for rid in sorted(self.groups):
            if not self.missing(rid):
                answers = tuple(self.answers[(rid, q)] for q in range(1, NUM_QUESTIONS + 1))
                out.append(UTAUTResponse(
                    respondent_id=rid,
                    group=self.groups[rid],
                    answers=answers,
                    dyad_id=self.dyads.get(rid),
                ))
        return out

    def snapshot(self) -> dict:
        return {
            "phase": self.phase,
            "respondents": {
                rid: {
                    "group": self.groups[rid],
                    "dyad_id": self.dyads.get(rid),
                    "answered": sorted(self.answered(rid)),
                }
                for rid in sorted(self.groups)
            },
        }


def apply_utaut_event(state: Optional[UtautSessionState], event: SessionEvent) -> UtautSessionState:
    kind = event.kind
    p = event.payload
    if kind == "session_started":
        if state is not None:
            raise EventLogError("session_started after start")
        return UtautSessionState()
    if state is None:
        raise EventLogError(f"first event must be session_started, got {kind}")
    if kind == "utaut_answer":
        rid = str(p["respondent_id"])
        state.groups[rid] = str(p["group"])
        state.dyads[rid] = p.get("dyad_id")
        state.answers[(rid, int(p["question"]))] = int(p["answer"])
        return state
    if kind == "session_aborted":
        state.phase = "aborted"
        return state
    raise EventLogError(f"unknown event kind {kind!r} at seq {event.seq}")


class UtautEngine:
    kind = "utaut"

    def __init__(self, session_id: str, clock: Clock = utc_clock):
        self.session_id = session_id
        self.clock = clock
        self.events: list[SessionEvent] = []
        self.state: Optional[UtautSessionState] = None
        self._emit("session_started", {"session_kind": self.kind})

    @classmethod
    def resume(cls, events: Sequence[SessionEvent], clock: Clock = utc_clock) -> "UtautEngine":
        check_gapless(events)
        if not events:
            raise EventLogError("cannot resume from an empty log")
        engine = object.__new__(cls)
        engine.session_id = events[0].session_id
        engine.clock = clock
        engine.events = list(events)
        state = None
        for event in events:
            state = apply_utaut_event(state, event)
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
        self.state = apply_utaut_event(self.state, event)
        payload["state_after"] = self.state.snapshot()
        self.events.append(event)
        return event

    def record_answer(
        self,
        respondent_id: str,
        group: str,
        question: int,
        answer: int,
        dyad_id: Optional[str] = None,
    ) -> SessionEvent:
        if self.state.phase != "active":
            raise PhaseError("session is not active", phase=self.state.phase)
        if group not in GROUPS:
            raise StatsError(f"group must be child or parent, got {group!r}")
        if not 1 <= question <= NUM_QUESTIONS:
            raise StatsError(f"question must be 1..{NUM_QUESTIONS}, got {question}")
        if not isinstance(answer, int) or isinstance(answer, bool) or not 1 <= answer <= 5:
            raise StatsError(f"answer must be 1..5, got {answer!r}")
        prior_group = self.state.groups.get(respondent_id)
        if prior_group is not None and prior_group != group:
            raise StatsError(f"respondent {respondent_id} already registered as {prior_group}")
        if (respondent_id, question) in self.state.answers:
            raise DuplicateRecordError(
                f"respondent {respondent_id} already answered q{question}"
            )
        return self._emit("utaut_answer", {
            "respondent_id": respondent_id,
            "group": group,
            "dyad_id": dyad_id,
            "question": question,
            "answer": answer,
        })

    def abort(self) -> SessionEvent:
        if self.state.phase != "active":
            raise PhaseError("session already over", phase=self.state.phase)
        return self._emit("session_aborted", {})


def replay_utaut(events: Sequence[SessionEvent]) -> UtautSessionState:
    check_gapless(events)
    if not events:
        raise EventLogError("empty event log")
    state: Optional[UtautSessionState] = None
    for event in events:
        state = apply_utaut_event(state, event)
    return state
