"""Event-sourced engines for the game, pain and questionnaire protocols."""

from typing import Sequence

from ..errors import EventLogError
from .driver import ACTION_KINDS, LoggingRobotDriver, NullRobotDriver, RobotAction, RobotDriver
from .events import (
    Clock,
    FixedClock,
    SessionEvent,
    check_gapless,
    format_ts,
    read_event_log,
    utc_clock,
    write_event_log,
)
from .game import (
    EMOTION_WORDS,
    BoardConfig,
    GameEngine,
    GameState,
    apply_game_event,
    default_cell_emotions,
    dice_value,
    replay_game,
)
from .pain import (
    PAIN_FACES,
    CounterbalanceAssignment,
    PainEngine,
    PainMode,
    PainRecord,
    PainSessionState,
    counterbalance_assign,
    replay_pain,
)
from .simulate import simulate_game, simulated_event_log
from .utaut_session import UtautEngine, UtautSessionState, replay_utaut

_REPLAYERS = {"game": replay_game, "pain": replay_pain, "utaut": replay_utaut}


def replay(events: Sequence[SessionEvent]):
    """Rebuild any session's terminal state from its event log."""
    if not events:
        raise EventLogError("empty event log")
    kind = events[0].payload.get("session_kind")
    if events[0].kind != "session_started" or kind not in _REPLAYERS:
        raise EventLogError(f"cannot determine session kind from first event {events[0].kind!r}")
    return _REPLAYERS[kind](events)


__all__ = [
    "ACTION_KINDS",
    "BoardConfig",
    "Clock",
    "CounterbalanceAssignment",
    "EMOTION_WORDS",
    "FixedClock",
    "GameEngine",
    "GameState",
    "LoggingRobotDriver",
    "NullRobotDriver",
    "PAIN_FACES",
    "PainEngine",
    "PainMode",
    "PainRecord",
    "PainSessionState",
    "RobotAction",
    "RobotDriver",
    "SessionEvent",
    "UtautEngine",
    "UtautSessionState",
    "apply_game_event",
    "check_gapless",
    "counterbalance_assign",
    "default_cell_emotions",
    "dice_value",
    "format_ts",
    "read_event_log",
    "replay",
    "replay_game",
    "replay_pain",
    "replay_utaut",
    "simulate_game",
    "simulated_event_log",
    "utc_clock",
    "write_event_log",
]
