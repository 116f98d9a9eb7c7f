import { describe, expect, it } from "vitest";

import { SseParser } from "../src/sse.js";

describe("SseParser", () => {
  it("parses id and data fields", () => {
    const parser = new SseParser();
    const messages = parser.push('id: 3\ndata: {"seq": 3}\n\n');
    expect(messages).toEqual([{ id: "3", event: undefined, data: '{"seq": 3}' }]);
  });

  it("handles chunks split at arbitrary byte boundaries", () => {
    const parser = new SseParser();
    const full = 'id: 1\ndata: {"a": 1}\n\nid: 2\ndata: {"a": 2}\n\n';
    const collected = [];
    for (const piece of [full.slice(0, 7), full.slice(7, 23), full.slice(23)]) {
      collected.push(...parser.push(piece));
    }
    expect(collected.map((m) => m.id)).toEqual(["1", "2"]);
    expect(JSON.parse(collected[1].data)).toEqual({ a: 2 });
  });

  it("joins multi-line data and reads event names", () => {
    const parser = new SseParser();
    const messages = parser.push("event: end\ndata: line1\ndata: line2\n\n");
    expect(messages[0].event).toBe("end");
    expect(messages[0].data).toBe("line1\nline2");
  });

  it("ignores comments and handles crlf", () => {
    const parser = new SseParser();
    const messages = parser.push(": keepalive\r\nid: 9\r\ndata: x\r\n\r\n");
    expect(messages).toEqual([{ id: "9", event: undefined, data: "x" }]);
  });

  it("emits nothing for incomplete messages", () => {
    const parser = new SseParser();
    expect(parser.push("data: pending\n")).toEqual([]);
    expect(parser.push("\n")[0].data).toBe("pending");
  });
});
