"""Scripted full-game simulation: a deterministic operator policy.

Drives calibration, alternating turns, occasional expression retries and
overrides, through the same command surface a live operator would use. With a
fixed seed the emitted event log is byte-identical across runs (fixed clock).
"""

from __future__ import annotations

import random
from typing import NamedTuple, Optional

from ..landmarks import EmotionLabel
from .driver import NullRobotDriver
from .events import FixedClock, SessionEvent
from .game import BoardConfig, GameEngine


class ScriptedPrediction(NamedTuple):
    top: int
    probs: tuple


def _prediction(expected: EmotionLabel, pass_it: bool, rng: random.Random) -> ScriptedPrediction:
    """A synthetic classifier output: confident hit or a confident miss."""
    probs = [0.02] * 7
    if pass_it:
        top = int(expected)
    else:
        top = int(rng.choice([l for l in EmotionLabel if l != expected]))
    probs[top] = 1.0 - 0.02 * 6
    return ScriptedPrediction(top=top, probs=tuple(probs))


def simulate_game(
    seed: int,
    config: Optional[BoardConfig] = None,
    session_id: str = "simulated-game",
    pass_rate: float = 0.8,
    max_turns: int = 10_000,
) -> GameEngine:
    """Play one full game to completion under a seeded policy."""
    config = config or BoardConfig()
    policy = random.Random(seed ^ 0x5EED)
    engine = GameEngine(
        session_id=session_id,
        config=config,
        child_name="Sim Child",
        seed=seed,
        clock=FixedClock(),
        driver=NullRobotDriver(),
    )

    def attempt_until_done():
        expected = (EmotionLabel.NEUTRAL
                    if engine.state.phase == "awaiting_neutral_calibration"
                    else engine.state.pending_emotion)
        while True:
            if policy.random() < 0.15:
                engine.teach_word() if engine.state.phase == "awaiting_expression" else None
            passed, _ = engine.resolve_expression(
                _prediction(expected, policy.random() < pass_rate, policy)
            )
            if passed:
                return
            if engine.state.retry_count >= config.max_retries:
                engine.override_expression()
                return

    for _ in range(max_turns):
        phase = engine.state.phase
        if phase in ("finished", "aborted"):
            break
        if phase == "awaiting_neutral_calibration":
            attempt_until_done()
        elif phase == "awaiting_roll":
            engine.roll_dice()
        elif phase == "awaiting_expression":
            attempt_until_done()
        elif phase == "robot_turn":
            engine.robot_roll()
    return engine


def simulated_event_log(seed: int, config: Optional[BoardConfig] = None) -> list[SessionEvent]:
    return simulate_game(seed, config).events
