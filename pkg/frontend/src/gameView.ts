/** Pure derivation of the board view from the event feed.
 *
 * Every game event carries the server-computed `state_after` snapshot, so the
 * view is a mirror: no dice math, no ladder logic, no phase rules run here.
 */

import type { EventFeed } from "./feed.js";
import type { GamePhase, GameStateSnapshot, SessionEvent } from "./types.js";

export const GAME_COMMANDS = [
  "roll",
  "robot_roll",
  "resolve_expression",
  "override",
  "teach_word",
  "robot_action",
  "finish",
] as const;

export type GameCommand = (typeof GAME_COMMANDS)[number];

/** Which operator buttons are live in a phase; a pure function of it. */
export function enabledCommands(phase: GamePhase): Set<GameCommand> {
  switch (phase) {
    case "awaiting_neutral_calibration":
      return new Set(["resolve_expression", "override", "robot_action", "finish"]);
    case "awaiting_roll":
      return new Set(["roll", "robot_action", "finish"]);
    case "awaiting_expression":
      return new Set(["resolve_expression", "override", "teach_word", "robot_action", "finish"]);
    case "robot_turn":
      return new Set(["robot_roll", "robot_action", "finish"]);
    case "finished":
    case "aborted":
      return new Set();
  }
}

export function stateAfter(event: SessionEvent): GameStateSnapshot | undefined {
  const state = event.payload.state_after;
  if (state && typeof state === "object" && "phase" in (state as object)) {
    return state as GameStateSnapshot;
  }
  return undefined;
}

/** Latest board state carried by the feed, or undefined before any event. */
export function currentState(feed: EventFeed): GameStateSnapshot | undefined {
  const latest = feed.latest();
  return latest === undefined ? undefined : stateAfter(latest);
}

export interface FeedLine {
  seq: number;
  ts: string;
  text: string;
}

/** One human-readable line per event for the operator's feed pane. */
export function describeEvent(event: SessionEvent): FeedLine {
  const p = event.payload as Record<string, any>;
  let text = event.kind;
  switch (event.kind) {
    case "session_started":
      text = "session started";
      break;
    case "greeted":
      text = `robot greeted ${p.child_name ?? ""}`;
      break;
    case "name_asked":
      text = "robot asked for the child's name";
      break;
    case "dice_rolled":
      text = `${p.player} rolled ${p.value}`;
      break;
    case "moved": {
      const via = p.via ? ` via ${p.via}` : "";
      text = `${p.player} moved ${p.from} -> ${p.to}${via}${p.won ? " and wins!" : ""}`;
      break;
    }
    case "word_prompted":
      text = `cell ${p.cell}: say "${p.word_fa}" in English (${p.emotion})`;
      break;
    case "word_taught":
      text = `robot taught "${p.word_en}"`;
      break;
    case "expression_attempt":
      text = `expression: saw ${p.top} (needed ${p.expected}, p=${Number(p.prob).toFixed(2)})`;
      break;
    case "expression_passed":
      text = p.overridden ? `${p.expected} accepted by operator override` : `${p.expected} passed`;
      break;
    case "retry_requested":
      text = `retry ${p.retry_count} requested for ${p.expected}`;
      break;
    case "robot_action":
      text = `robot action: ${p.action}`;
      break;
    case "pain_recorded":
      text = `pain ${p.score}/10 recorded for ${p.participant_id} (${p.mode})`;
      break;
    case "utaut_answer":
      text = `${p.respondent_id} answered q${p.question}: ${p.answer}`;
      break;
    case "farewell":
      text = `robot says farewell (winner: ${p.winner})`;
      break;
    case "session_aborted":
      text = "session aborted by operator";
      break;
  }
  return { seq: event.seq, ts: event.ts, text };
}
