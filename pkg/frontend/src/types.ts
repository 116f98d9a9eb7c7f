/** Wire types mirrored from the /v1 API. The console never re-derives game
 * rules; everything it shows comes from these server-produced shapes. */

export type SessionKind = "game" | "pain" | "utaut";

export type GamePhase =
  | "awaiting_neutral_calibration"
  | "awaiting_roll"
  | "awaiting_expression"
  | "robot_turn"
  | "finished"
  | "aborted";

export interface GameStateSnapshot {
  child_name: string;
  child_pos: number;
  robot_pos: number;
  turn: "child" | "robot";
  phase: GamePhase;
  pending_emotion: string | null;
  retry_count: number;
  dice_draws: number;
  winner: "child" | "robot" | null;
  seed: number;
}

export interface SessionEvent {
  v: number;
  seq: number;
  ts: string;
  session_id: string;
  kind: string;
  payload: Record<string, unknown> & { state_after?: unknown };
}

export interface SessionResource {
  session_id: string;
  kind: SessionKind;
  created_at: string;
  status: "active" | "finished" | "aborted";
  config: Record<string, unknown>;
  last_seq: number;
  state: Record<string, unknown>;
}

export interface CommandResponse {
  seq: number;
  result: Record<string, unknown>;
  events: SessionEvent[];
  state: Record<string, unknown>;
  status: string;
}

export interface Prediction {
  probs: number[];
  top: string;
  embedding: number[];
  latency_ms: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export interface UtautQuestion {
  index: number;
  text: string;
}

export interface UtautCategory {
  code: string;
  title: string;
  questions: UtautQuestion[];
}

export interface UtautSchema {
  categories: UtautCategory[];
  scale: { value: number; label: string }[];
}

export const EMOTIONS = [
  "sadness",
  "happiness",
  "anger",
  "stress",
  "surprise",
  "disgust",
  "neutral",
] as const;
