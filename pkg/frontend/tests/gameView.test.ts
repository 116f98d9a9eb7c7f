import { describe, expect, it } from "vitest";

import { EventFeed } from "../src/feed.js";
import { currentState, describeEvent, enabledCommands } from "../src/gameView.js";
import type { GamePhase, SessionEvent } from "../src/types.js";

function gameEvent(seq: number, kind: string, payload: Record<string, unknown>): SessionEvent {
  return { v: 1, seq, ts: "2026-01-01T00:00:00.000Z", session_id: "g", kind, payload };
}

function snapshot(phase: GamePhase, extra: Record<string, unknown> = {}) {
  return {
    child_name: "Z", child_pos: 0, robot_pos: 0, turn: "child", phase,
    pending_emotion: null, retry_count: 0, dice_draws: 0, winner: null, seed: 1,
    ...extra,
  };
}

describe("enabledCommands", () => {
  it("is a pure function of the phase", () => {
    expect(enabledCommands("awaiting_roll").has("roll")).toBe(true);
    expect(enabledCommands("awaiting_roll").has("robot_roll")).toBe(false);
    expect(enabledCommands("robot_turn").has("robot_roll")).toBe(true);
    expect(enabledCommands("robot_turn").has("roll")).toBe(false);
    expect(enabledCommands("awaiting_expression").has("resolve_expression")).toBe(true);
    expect(enabledCommands("awaiting_expression").has("teach_word")).toBe(true);
    expect(enabledCommands("awaiting_roll").has("resolve_expression")).toBe(false);
    expect(enabledCommands("finished").size).toBe(0);
    expect(enabledCommands("aborted").size).toBe(0);
  });

  it("allows calibration resolution before the first roll", () => {
    const set = enabledCommands("awaiting_neutral_calibration");
    expect(set.has("resolve_expression")).toBe(true);
    expect(set.has("roll")).toBe(false);
  });
});

describe("currentState", () => {
  it("mirrors the latest server snapshot without local rules", () => {
    const feed = new EventFeed();
    feed.add(gameEvent(1, "session_started", { state_after: snapshot("awaiting_neutral_calibration") }));
    feed.add(gameEvent(2, "dice_rolled", {
      player: "child", value: 5,
      state_after: snapshot("awaiting_roll", { dice_draws: 1 }),
    }));
    feed.add(gameEvent(3, "moved", {
      player: "child", from: 0, to: 5,
      state_after: snapshot("awaiting_expression", { child_pos: 5, pending_emotion: "surprise" }),
    }));
    const state = currentState(feed)!;
    expect(state.child_pos).toBe(5);
    expect(state.phase).toBe("awaiting_expression");
    expect(state.pending_emotion).toBe("surprise");
  });

  it("is undefined before any event arrives", () => {
    expect(currentState(new EventFeed())).toBeUndefined();
  });
});

describe("describeEvent", () => {
  it("renders readable lines for the operator feed", () => {
    const moved = describeEvent(gameEvent(4, "moved", {
      player: "robot", from: 3, to: 12, via: "ladder", won: false,
    }));
    expect(moved.text).toContain("robot moved 3 -> 12 via ladder");
    const won = describeEvent(gameEvent(9, "moved", {
      player: "child", from: 28, to: 30, via: null, won: true,
    }));
    expect(won.text).toContain("wins");
    const retry = describeEvent(gameEvent(5, "retry_requested", {
      expected: "anger", retry_count: 2,
    }));
    expect(retry.text).toBe("retry 2 requested for anger");
  });
});
