/** Minimal server-sent-events reader over fetch streams.
 *
 * Works in both the browser and node 20 (no EventSource dependency), which
 * lets the same code run in the page and in the e2e tests. Only the fields
 * this service emits are handled: `id`, `event`, `data`.
 */

export interface SseMessage {
  id?: string;
  event?: string;
  data: string;
}

export class SseParser {
  private buffer = "";
  private id: string | undefined;
  private event: string | undefined;
  private data: string[] = [];

  /** Feed a decoded chunk; returns every message completed by it. */
  push(chunk: string): SseMessage[] {
    this.buffer += chunk;
    const messages: SseMessage[] = [];
    let index;
    while ((index = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, index).replace(/\r$/, "");
      this.buffer = this.buffer.slice(index + 1);
      if (line === "") {
        if (this.data.length > 0 || this.event !== undefined) {
          messages.push({ id: this.id, event: this.event, data: this.data.join("\n") });
        }
        this.id = undefined;
        this.event = undefined;
        this.data = [];
        continue;
      }
      if (line.startsWith(":")) continue; // comment
      const colon = line.indexOf(":");
      const field = colon < 0 ? line : line.slice(0, colon);
      let value = colon < 0 ? "" : line.slice(colon + 1);
      if (value.startsWith(" ")) value = value.slice(1);
      if (field === "id") this.id = value;
      else if (field === "event") this.event = value;
      else if (field === "data") this.data.push(value);
    }
    return messages;
  }
}

/** Stream messages from an SSE endpoint until it closes or is aborted. */
export async function* sseStream(
  url: string,
  signal?: AbortSignal,
): AsyncGenerator<SseMessage> {
  const response = await fetch(url, {
    headers: { accept: "text/event-stream" },
    signal,
  });
  if (!response.ok || !response.body) {
    throw new Error(`stream failed: ${response.status}`);
  }
  const reader = response.body.getReader();
  const decoder = new TextDecoder();
  const parser = new SseParser();
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      for (const message of parser.push(decoder.decode(value, { stream: true }))) {
        yield message;
      }
    }
  } finally {
    reader.releaseLock();
  }
}
