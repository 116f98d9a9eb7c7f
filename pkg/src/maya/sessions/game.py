"""The Elephant-and-Ladder game engine, event-sourced.

Commands validate the current phase, emit events, and fold them through
``apply_game_event`` — the same pure transition replay uses — so a live
session and a replayed log can never disagree. Dice rolls are a pure
function of (seed, draw index), which keeps snapshots comparable and logs
sufficient for exact reconstruction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import ConfigError, EventLogError, PhaseError
from ..landmarks import NON_NEUTRAL_LABELS, EmotionLabel
from .driver import LoggingRobotDriver, RobotAction, RobotDriver
from .events import Clock, SessionEvent, check_gapless, format_ts, utc_clock

CONFIG_VERSION = 1

PHASES = (
    "awaiting_neutral_calibration",
    "awaiting_roll",
    "awaiting_expression",
    "robot_turn",
    "finished",
    "aborted",
)

# Word pairs taught during play: emotion -> (Persian transliteration, English).
EMOTION_WORDS = {
    EmotionLabel.SADNESS: ("ghamgin", "sad"),
    EmotionLabel.HAPPINESS: ("khoshhal", "happy"),
    EmotionLabel.ANGER: ("asabani", "angry"),
    EmotionLabel.STRESS: ("moztareb", "stressed"),
    EmotionLabel.SURPRISE: ("moteajeb", "surprised"),
    EmotionLabel.DISGUST: ("monzajer", "disgusted"),
}

DEFAULT_LADDERS = ((3, 12), (7, 21), (16, 27))
DEFAULT_SLIDES = ((11, 4), (19, 6), (28, 13))


def default_cell_emotions(cell_count: int) -> tuple[EmotionLabel, ...]:
    """Cells 1..cell_count cycle through the six non-neutral emotions."""
    return tuple(NON_NEUTRAL_LABELS[(cell - 1) % 6] for cell in range(1, cell_count + 1))


@dataclass(frozen=True)
class BoardConfig:
    cell_count: int = 30
    cell_emotions: tuple[EmotionLabel, ...] = ()
    ladders: tuple[tuple[int, int], ...] = DEFAULT_LADDERS
    slides: tuple[tuple[int, int], ...] = DEFAULT_SLIDES
    overshoot_rule: str = "clamp"
    dice_sides: int = 6
    pass_threshold: float = 0.5
    max_retries: int = 3
    calibration_seconds: float = 3.0

    def __post_init__(self):
        if self.cell_count < 2:
            raise ConfigError(f"cell_count must be >= 2, got {self.cell_count}")
        emotions = self.cell_emotions or default_cell_emotions(self.cell_count)
        object.__setattr__(self, "cell_emotions", tuple(EmotionLabel(e) for e in emotions))
        if len(self.cell_emotions) != self.cell_count:
            raise ConfigError(
                f"cell_emotions must list {self.cell_count} entries, got {len(self.cell_emotions)}"
            )
        if any(e is EmotionLabel.NEUTRAL for e in self.cell_emotions):
            raise ConfigError("cell emotions must be the six non-neutral labels")
        if self.overshoot_rule not in ("clamp", "exact"):
            raise ConfigError(f"overshoot_rule must be clamp or exact, got {self.overshoot_rule!r}")
        if self.dice_sides < 2:
            raise ConfigError(f"dice_sides must be >= 2, got {self.dice_sides}")
        if not 0.0 <= self.pass_threshold <= 1.0:
            raise ConfigError(f"pass_threshold must be in [0, 1], got {self.pass_threshold}")
        if self.max_retries < 1:
            raise ConfigError(f"max_retries must be >= 1, got {self.max_retries}")
        froms = set()
        for name, pairs, ascending in (("ladder", self.ladders, True), ("slide", self.slides, False)):
            for lo_hi in pairs:
                if len(lo_hi) != 2:
                    raise ConfigError(f"{name} must be a (from, to) pair, got {lo_hi}")
                src, dst = lo_hi
                for cell in (src, dst):
                    if not 1 <= cell <= self.cell_count:
                        raise ConfigError(f"{name} ({src}, {dst}) endpoint {cell} outside board")
                    if cell == self.cell_count:
                        raise ConfigError(f"top cell may not carry a {name}")
                if ascending and src >= dst:
                    raise ConfigError(f"ladder ({src}, {dst}) must ascend")
                if not ascending and src <= dst:
                    raise ConfigError(f"slide ({src}, {dst}) must descend")
                if src in froms:
                    raise ConfigError(f"cell {src} has more than one ladder/slide")
                froms.add(src)

    def jump_from(self, cell: int) -> tuple[Optional[str], int]:
        for src, dst in self.ladders:
            if src == cell:
                return "ladder", dst
        for src, dst in self.slides:
            if src == cell:
                return "slide", dst
        return None, cell

    def emotion_at(self, cell: int) -> EmotionLabel:
        if not 1 <= cell <= self.cell_count:
            raise ConfigError(f"no emotion for cell {cell}")
        return self.cell_emotions[cell - 1]

    def to_dict(self) -> dict:
        return {
            "v": CONFIG_VERSION,
            "cell_count": self.cell_count,
            "cell_emotions": [e.display_name for e in self.cell_emotions],
            "ladders": [list(p) for p in self.ladders],
            "slides": [list(p) for p in self.slides],
            "overshoot_rule": self.overshoot_rule,
            "dice_sides": self.dice_sides,
            "pass_threshold": self.pass_threshold,
            "max_retries": self.max_retries,
            "calibration_seconds": self.calibration_seconds,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BoardConfig":
        doc = dict(doc)
        doc.pop("v", None)
        if "cell_emotions" in doc and doc["cell_emotions"]:
            doc["cell_emotions"] = tuple(
                EmotionLabel.from_name(e) if isinstance(e, str) else EmotionLabel(e)
                for e in doc["cell_emotions"]
            )
        else:
            doc.pop("cell_emotions", None)
        if "ladders" in doc:
            doc["ladders"] = tuple(tuple(p) for p in doc["ladders"])
        if "slides" in doc:
            doc["slides"] = tuple(tuple(p) for p in doc["slides"])
        return cls(**doc)


def dice_value(seed: int, draw_index: int, sides: int = 6) -> int:
    """The draw_index-th dice roll of a session seeded with ``seed``."""
    return random.Random(seed * 4294967296 + draw_index).randint(1, sides)


@dataclass
class GameState:
    config: BoardConfig
    seed: int
    child_name: str
    child_pos: int = 0
    robot_pos: int = 0
    turn: str = "child"
    phase: str = "awaiting_neutral_calibration"
    pending_emotion: Optional[EmotionLabel] = None
    retry_count: int = 0
    dice_draws: int = 0
    winner: Optional[str] = None

    def position(self, player: str) -> int:
        return self.child_pos if player == "child" else self.robot_pos

    def snapshot(self) -> dict:
        """JSON-friendly view of every field (used by the service and console)."""
        return {
            "child_name": self.child_name,
            "child_pos": self.child_pos,
            "robot_pos": self.robot_pos,
            "turn": self.turn,
            "phase": self.phase,
            "pending_emotion": None if self.pending_emotion is None
            else self.pending_emotion.display_name,
            "retry_count": self.retry_count,
            "dice_draws": self.dice_draws,
            "winner": self.winner,
            "seed": self.seed,
        }


def apply_game_event(state: Optional[GameState], event: SessionEvent) -> GameState:
    """Pure transition shared by live execution and replay."""
    kind = event.kind
    p = event.payload
    if kind == "session_started":
        if state is not None:
            raise EventLogError("session_started after start")
        return GameState(
            config=BoardConfig.from_dict(p["config"]),
            seed=int(p["seed"]),
            child_name=str(p.get("child_name", "")),
        )
    if state is None:
        raise EventLogError(f"first event must be session_started, got {kind}")

    if kind in ("greeted", "name_asked", "word_taught", "expression_attempt",
                "robot_action", "farewell"):
        return state
    if kind == "dice_rolled":
        state.dice_draws += 1
        return state
    if kind == "moved":
        player = p["player"]
        src, dst = int(p["from"]), int(p["to"])
        if player == "child":
            state.child_pos = dst
        else:
            state.robot_pos = dst
        if p.get("won"):
            state.winner = player
            state.phase = "finished"
            state.pending_emotion = None
        elif player == "robot":
            state.turn = "child"
            state.phase = "awaiting_roll"
        elif src == dst:
            # Exact-rule overshoot: no landing, no expression; turn passes.
            state.turn = "robot"
            state.phase = "robot_turn"
        return state
    if kind == "word_prompted":
        state.pending_emotion = EmotionLabel.from_name(p["emotion"])
        state.phase = "awaiting_expression"
        state.retry_count = 0
        return state
    if kind == "retry_requested":
        state.retry_count = int(p["retry_count"])
        return state
    if kind == "expression_passed":
        state.retry_count = 0
        state.pending_emotion = None
        if p.get("calibration"):
            state.turn = "child"
            state.phase = "awaiting_roll"
        else:
            state.turn = "robot"
            state.phase = "robot_turn"
        return state
    if kind == "session_aborted":
        state.phase = "aborted"
        return state
    raise EventLogError(f"unknown event kind {kind!r} at seq {event.seq}")


class GameEngine:
    """Single-writer command surface over an append-only event list."""

    kind = "game"

    def __init__(
        self,
        session_id: str,
        config: BoardConfig,
        child_name: str,
        seed: int,
        clock: Clock = utc_clock,
        driver: Optional[RobotDriver] = None,
    ):
        self.session_id = session_id
        self.clock = clock
        self.driver = driver or LoggingRobotDriver(clock)
        self.events: list[SessionEvent] = []
        self.state: Optional[GameState] = None
        self._emit("session_started", {
            "session_kind": self.kind,
            "config": config.to_dict(),
            "seed": seed,
            "child_name": child_name,
        })
        self._emit("greeted", {"child_name": child_name})
        self._act("greet", child_name=child_name)
        self._emit("name_asked", {})
        self._act("ask_name")

    @classmethod
    def resume(cls, events: Sequence[SessionEvent], clock: Clock = utc_clock,
               driver: Optional[RobotDriver] = None) -> "GameEngine":
        """Rebuild a live engine from a persisted event log."""
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
            state = apply_game_event(state, event)
        engine.state = state
        return engine

    # -- internals ----------------------------------------------------------

    def _emit(self, kind: str, payload: dict) -> SessionEvent:
        event = SessionEvent(
            seq=len(self.events) + 1,
            ts=format_ts(self.clock()),
            session_id=self.session_id,
            kind=kind,
            payload=payload,
        )
        self.state = apply_game_event(self.state, event)
        # Decorate with the post-event view so stream consumers need no rules.
        payload["state_after"] = self.state.snapshot()
        self.events.append(event)
        return event

    def _act(self, kind: str, **params) -> None:
        self.driver.dispatch(RobotAction(kind, params))

    def _require_phase(self, *phases: str) -> None:
        if self.state.phase not in phases:
            raise PhaseError(
                f"command not legal in phase {self.state.phase!r}",
                phase=self.state.phase, allowed=list(phases),
            )

    # -- commands -----------------------------------------------------------

    def roll_dice(self) -> tuple[int, list[SessionEvent]]:
        """Roll for whichever player's turn it is; resolve the move."""
        self._require_phase("awaiting_roll", "robot_turn")
        player = "child" if self.state.phase == "awaiting_roll" else "robot"
        value = dice_value(self.state.seed, self.state.dice_draws, self.state.config.dice_sides)
        events = [self._emit("dice_rolled", {"player": player, "value": value})]
        events.extend(self._move(player, value))
        return value, events

    def robot_roll(self) -> tuple[int, list[SessionEvent]]:
        self._require_phase("robot_turn")
        return self.roll_dice()

    def _move(self, player: str, roll: int) -> list[SessionEvent]:
        config = self.state.config
        src = self.state.position(player)
        raw = src + roll
        overshoot = raw > config.cell_count
        if overshoot and config.overshoot_rule == "exact":
            dst, via = src, None
        else:
            landed = min(raw, config.cell_count)
            via, dst = config.jump_from(landed) if landed < config.cell_count else (None, landed)
        won = dst == config.cell_count
        events = [self._emit("moved", {
            "player": player, "from": src, "to": dst, "raw": min(raw, config.cell_count),
            "via": via, "overshoot": overshoot, "won": won,
        })]
        if won:
            events.append(self._emit("farewell", {"winner": player}))
            self._act("farewell", winner=player)
        elif player == "child" and dst != src:
            emotion = config.emotion_at(dst)
            fa, en = EMOTION_WORDS[emotion]
            events.append(self._emit("word_prompted", {
                "emotion": emotion.display_name, "word_fa": fa, "word_en": en, "cell": dst,
            }))
            self._act("speak_word", word=fa, language="fa")
        return events

    def teach_word(self) -> list[SessionEvent]:
        """Robot introduces the English word when the child does not know it."""
        self._require_phase("awaiting_expression")
        emotion = self.state.pending_emotion
        fa, en = EMOTION_WORDS[emotion]
        event = self._emit("word_taught", {"emotion": emotion.display_name, "word_en": en})
        self._act("speak_word", word=en, language="en")
        return [event]

    def resolve_expression(
        self,
        prediction,
        expected: Optional[EmotionLabel] = None,
        pass_threshold: Optional[float] = None,
    ) -> tuple[bool, list[SessionEvent]]:
        """Judge an expression attempt against the expected emotion.

        In the calibration phase the expected emotion is neutral; during play
        it is the pending cell emotion. A pass requires the top prediction to
        match at or above the threshold; a fail increments the retry count and
        asks the robot to encourage another try.
        """
        self._require_phase("awaiting_neutral_calibration", "awaiting_expression")
        calibration = self.state.phase == "awaiting_neutral_calibration"
        if expected is None:
            expected = EmotionLabel.NEUTRAL if calibration else self.state.pending_emotion
        threshold = self.state.config.pass_threshold if pass_threshold is None else pass_threshold
        top = EmotionLabel(int(prediction.top))
        prob = float(prediction.probs[int(expected)])
        events = [self._emit("expression_attempt", {
            "expected": expected.display_name,
            "top": top.display_name,
            "prob": prob,
            "calibration": calibration,
        })]
        passed = top == expected and prob >= threshold
        if passed:
            events.append(self._emit("expression_passed", {
                "expected": expected.display_name,
                "overridden": False,
                "calibration": calibration,
            }))
        else:
            retries = self.state.retry_count + 1
            events.append(self._emit("retry_requested", {
                "expected": expected.display_name,
                "retry_count": retries,
                "calibration": calibration,
            }))
            self._act("encourage", expected=expected.display_name)
        return passed, events

    def override_expression(self) -> list[SessionEvent]:
        """Mediator forces progression after the retry budget is used up."""
        self._require_phase("awaiting_neutral_calibration", "awaiting_expression")
        if self.state.retry_count < self.state.config.max_retries:
            raise PhaseError(
                f"override requires {self.state.config.max_retries} failed retries, "
                f"got {self.state.retry_count}",
                phase=self.state.phase,
            )
        calibration = self.state.phase == "awaiting_neutral_calibration"
        expected = EmotionLabel.NEUTRAL if calibration else self.state.pending_emotion
        return [self._emit("expression_passed", {
            "expected": expected.display_name,
            "overridden": True,
            "calibration": calibration,
        })]

    def robot_action(self, kind: str, **params) -> list[SessionEvent]:
        """Operator-initiated robot behavior, recorded in the log."""
        action = RobotAction(kind, params)
        event = self._emit("robot_action", {"action": kind, "params": params})
        self.driver.dispatch(action)
        return [event]

    def abort(self) -> list[SessionEvent]:
        if self.state.phase in ("finished", "aborted"):
            raise PhaseError("session already over", phase=self.state.phase)
        return [self._emit("session_aborted", {})]


def replay_game(events: Sequence[SessionEvent]) -> GameState:
    """Fold an event log back into the terminal state it produced."""
    check_gapless(events)
    if not events:
        raise EventLogError("empty event log")
    state: Optional[GameState] = None
    for event in events:
        state = apply_game_event(state, event)
    return state
