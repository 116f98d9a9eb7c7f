import { describe, expect, it } from "vitest";

import { EventFeed } from "../src/feed.js";
import type { SessionEvent } from "../src/types.js";

function event(seq: number, kind = "dice_rolled"): SessionEvent {
  return { v: 1, seq, ts: "2026-01-01T00:00:00.000Z", session_id: "s", kind, payload: {} };
}

describe("EventFeed", () => {
  it("keeps events in seq order regardless of arrival order", () => {
    const feed = new EventFeed();
    feed.addAll([event(2), event(1), event(3)]);
    expect(feed.ordered().map((e) => e.seq)).toEqual([1, 2, 3]);
    expect(feed.lastSeq).toBe(3);
  });

  it("is idempotent by seq", () => {
    const feed = new EventFeed();
    expect(feed.add(event(1))).toBe(true);
    expect(feed.add(event(1))).toBe(false);
    expect(feed.size).toBe(1);
  });

  it("counts only new events from a batch", () => {
    const feed = new EventFeed();
    feed.add(event(1));
    expect(feed.addAll([event(1), event(2), event(2), event(3)])).toBe(2);
  });

  it("resumes from lastSeq + 1", () => {
    const feed = new EventFeed();
    expect(feed.resumeFrom).toBe(1);
    feed.addAll([event(1), event(2)]);
    expect(feed.resumeFrom).toBe(3);
  });

  it("reports gaps below the high-water mark", () => {
    const feed = new EventFeed();
    feed.addAll([event(1), event(4)]);
    expect(feed.gaps()).toEqual([2, 3]);
    feed.addAll([event(2), event(3)]);
    expect(feed.gaps()).toEqual([]);
  });

  it("notifies listeners once per unique event", () => {
    const feed = new EventFeed();
    const seen: number[] = [];
    feed.onEvent((e) => seen.push(e.seq));
    feed.addAll([event(1), event(1), event(2)]);
    expect(seen).toEqual([1, 2]);
  });
});
