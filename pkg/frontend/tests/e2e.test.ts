/** End-to-end: the console core drives a full game against a live service.
 *
 * Spawns `maya serve` (the Python package must be installed), plays
 * calibration, alternating turns, deliberate expression retries, an operator
 * override, a teach-word, through to a win and farewell. After every command
 * the console's stream-derived board state must equal the server's snapshot,
 * and a mid-game stream drop must resume with no gaps and no duplicates.
 */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { currentState, enabledCommands } from "../src/gameView.js";
import { SessionWatcher } from "../src/watch.js";
import type { GameStateSnapshot } from "../src/types.js";

const PORT = 8900 + (process.pid % 90);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

function neutralPrediction(prob = 0.9) {
  const probs = Array(7).fill((1 - prob) / 6);
  probs[6] = prob;
  return { top: "neutral", probs };
}

function predictionFor(emotion: string, correct: boolean, prob = 0.9) {
  const emotions = ["sadness", "happiness", "anger", "stress", "surprise", "disgust", "neutral"];
  const wanted = emotions.indexOf(emotion);
  const top = correct ? wanted : (wanted + 1) % 6;
  const probs = Array(7).fill((1 - prob) / 6);
  probs[top] = prob;
  return { top, probs };
}

async function waitForHealth(api: ApiClient, attempts = 60): Promise<void> {
  for (let i = 0; i < attempts; i += 1) {
    try {
      await api.healthz();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "maya-e2e-"));
  server = spawn("maya", ["serve", "--port", String(PORT), "--data-dir", dataDir], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stderr?.on("data", (chunk) => process.stderr.write(chunk));
  await waitForHealth(new ApiClient(BASE));
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe("operator console against a live service", () => {
  it("plays a scripted full game with snapshot equality at every step", async () => {
    const api = new ApiClient(BASE);
    const { session_id } = await api.createSession("game", {
      child_name: "E2E",
      seed: 424242,
    });

    const watcher = new SessionWatcher(api, session_id, 100);
    const run = watcher.run();

    const waitForSeq = async (seq: number) => {
      for (let i = 0; i < 200 && watcher.feed.lastSeq < seq; i += 1) {
        await new Promise((resolve) => setTimeout(resolve, 25));
      }
      expect(watcher.feed.lastSeq).toBeGreaterThanOrEqual(seq);
    };

    const checkMirror = async () => {
      const resource = await api.getSession(session_id);
      await waitForSeq(resource.last_seq);
      const mirrored = currentState(watcher.feed);
      expect(mirrored).toEqual(resource.state);
      return resource;
    };

    // initial events (started/greeted/name_asked) arrive over the stream
    await waitForSeq(3);
    let resource = await checkMirror();
    expect((resource.state as unknown as GameStateSnapshot).phase).toBe(
      "awaiting_neutral_calibration",
    );

    // calibration: one deliberate failure, then neutral passes
    await api.command(session_id, "resolve_expression", {
      prediction: predictionFor("neutral", false),
    });
    await checkMirror();
    const calibrated = await api.command(session_id, "resolve_expression", {
      prediction: neutralPrediction(),
    });
    expect(calibrated.result.passed).toBe(true);
    await checkMirror();

    let retriedOnce = false;
    let overrodeOnce = false;
    let taughtOnce = false;
    let droppedOnce = false;
    let steps = 0;

    for (; steps < 500; steps += 1) {
      const state = currentState(watcher.feed)!;
      if (state.phase === "finished") break;

      // exercise the reconnect path once, mid-game
      if (!droppedOnce && steps === 6) {
        watcher.dropConnection();
        droppedOnce = true;
      }

      if (state.phase === "awaiting_roll") {
        await api.command(session_id, "roll");
      } else if (state.phase === "robot_turn") {
        await api.command(session_id, "robot_roll");
      } else if (state.phase === "awaiting_expression") {
        const emotion = state.pending_emotion!;
        if (!taughtOnce) {
          await api.command(session_id, "teach_word");
          taughtOnce = true;
        }
        if (!retriedOnce) {
          // two misses, then a hit
          await api.command(session_id, "resolve_expression", {
            prediction: predictionFor(emotion, false),
          });
          await api.command(session_id, "resolve_expression", {
            prediction: predictionFor(emotion, false),
          });
          retriedOnce = true;
        } else if (!overrodeOnce && state.retry_count >= 3) {
          await api.command(session_id, "override");
          overrodeOnce = true;
        }
        await api.command(session_id, "resolve_expression", {
          prediction: predictionFor(emotion, true),
        }).catch(() => undefined); // may 409 if the override just passed it
      }
      resource = await checkMirror();
      if (resource.status === "finished") break;
    }

    resource = await api.getSession(session_id);
    expect(resource.status).toBe("finished");
    const finalState = resource.state as unknown as GameStateSnapshot;
    expect(finalState.winner === "child" || finalState.winner === "robot").toBe(true);

    // the feed saw the whole game: gapless, duplicate-free, farewell included
    await waitForSeq(resource.last_seq);
    expect(droppedOnce).toBe(true);
    expect(retriedOnce).toBe(true);
    expect(watcher.feed.gaps()).toEqual([]);
    expect(watcher.feed.size).toBe(resource.last_seq);
    const seqs = watcher.feed.ordered().map((e) => e.seq);
    expect(seqs).toEqual(Array.from({ length: resource.last_seq }, (_, i) => i + 1));
    const kinds = watcher.feed.ordered().map((e) => e.kind);
    expect(kinds).toContain("retry_requested");
    expect(kinds).toContain("word_taught");
    expect(kinds[kinds.length - 1]).toBe("farewell");

    // final mirrored state equals the server's terminal snapshot
    expect(currentState(watcher.feed)).toEqual(resource.state);

    watcher.stop();
    await run;
  }, 120_000);

  it("mirrors phase-driven button enablement from server state", async () => {
    const api = new ApiClient(BASE);
    const { session_id } = await api.createSession("game", { child_name: "B", seed: 7 });
    const resource = await api.getSession(session_id);
    const phase = (resource.state as unknown as GameStateSnapshot).phase;
    const enabled = enabledCommands(phase);
    expect(enabled.has("resolve_expression")).toBe(true);
    expect(enabled.has("roll")).toBe(false);
    // the server agrees: roll is a phase violation right now
    await expect(api.command(session_id, "roll")).rejects.toMatchObject({ status: 409 });
  }, 30_000);

  it("records pain scores and surfaces duplicate errors", async () => {
    const api = new ApiClient(BASE);
    const { session_id } = await api.createSession("pain", {});
    const watcher = new SessionWatcher(api, session_id, 100);
    const run = watcher.run();
    await api.command(session_id, "record_pain", {
      participant_id: "c1", mode: "B_with_robot", score: 4,
    });
    for (let i = 0; i < 100 && watcher.feed.lastSeq < 2; i += 1) {
      await new Promise((resolve) => setTimeout(resolve, 25));
    }
    const kinds = watcher.feed.ordered().map((e) => e.kind);
    expect(kinds).toContain("pain_recorded");
    await expect(
      api.command(session_id, "record_pain", {
        participant_id: "c1", mode: "B_with_robot", score: 5,
      }),
    ).rejects.toMatchObject({ status: 422, code: "duplicate-record" });
    watcher.stop();
    await run;
  }, 30_000);

  it("submits a full questionnaire and fetches the comparison", async () => {
    const api = new ApiClient(BASE);
    const schema = await api.utautSchema();
    const questionCount = schema.categories.reduce(
      (sum, category) => sum + category.questions.length, 0);
    expect(questionCount).toBe(43);
    expect(schema.categories.length).toBe(13);

    // per-respondent multipliers keep every category's scores varied enough
    // for a meaningful t-test; modulus 4 avoids the residue cycle that a
    // 5-question category would complete under mod 5 (constant means)
    const pattern = (mult: number, base: number) => (q: number) =>
      1 + ((q * mult + base) % 4);
    const answersFor = (mult: number, base: number) =>
      Array.from({ length: 43 }, (_, i) => pattern(mult, base)(i + 1));

    const { session_id } = await api.createSession("utaut", {});
    const submit = async (rid: string, group: string, answer: (q: number) => number) => {
      for (let q = 1; q <= 43; q += 1) {
        await api.command(session_id, "utaut_answer", {
          respondent_id: rid, group, question: q, answer: answer(q), dyad_id: rid.slice(1),
        });
      }
    };
    await submit("c1", "child", pattern(2, 1));
    await submit("c2", "child", pattern(3, 2));
    await submit("p1", "parent", pattern(1, 0));
    await submit("p2", "parent", pattern(4, 3));

    const resource = await api.getSession(session_id);
    const respondents = (resource.state as any).respondents;
    expect(Object.keys(respondents).sort()).toEqual(["c1", "c2", "p1", "p2"]);
    expect(respondents.c1.answered.length).toBe(43);

    const report = await api.utautStats([
      { respondent_id: "c1", group: "child", answers: answersFor(2, 1) },
      { respondent_id: "c2", group: "child", answers: answersFor(3, 2) },
      { respondent_id: "p1", group: "parent", answers: answersFor(1, 0) },
      { respondent_id: "p2", group: "parent", answers: answersFor(4, 3) },
    ]);
    const rows = report.categories as { item: string }[];
    expect(rows.length).toBe(13);
    expect(rows[rows.length - 2].item).toBe("Trust");
  }, 60_000);
});
