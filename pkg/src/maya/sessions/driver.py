"""Pluggable robot-action driver.

Motor control is out of scope, so the shipped driver only logs what the
physical robot would have done, with timestamps. Engines call the driver for
side effects; replay never does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Protocol

from ..errors import ConfigError
from .events import Clock, utc_clock

ACTION_KINDS = (
    "greet",
    "ask_name",
    "speak_word",
    "encourage",
    "play_music",
    "dance",
    "move_trunk",
    "move_ears",
    "farewell",
)


@dataclass(frozen=True)
class RobotAction:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ConfigError(f"unknown robot action {self.kind!r}")


class RobotDriver(Protocol):
    def dispatch(self, action: RobotAction) -> None: ...


class LoggingRobotDriver:
    """Records every dispatched action as (timestamp, action)."""

    def __init__(self, clock: Clock = utc_clock):
        self.clock = clock
        self.log: list[tuple[datetime, RobotAction]] = []

    def dispatch(self, action: RobotAction) -> None:
        self.log.append((self.clock(), action))


class NullRobotDriver:
    def dispatch(self, action: RobotAction) -> None:
        pass
