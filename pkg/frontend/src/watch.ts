/** Live session watcher: streams events into a feed, resuming after drops.
 *
 * Reconnects always ask for `from = lastSeq + 1`, and the feed deduplicates
 * by seq, so a reconnect can neither lose nor duplicate events.
 */

import type { ApiClient } from "./api.js";
import { EventFeed } from "./feed.js";
import { sseStream } from "./sse.js";
import type { SessionEvent } from "./types.js";

export type WatcherStatus = "connecting" | "live" | "reconnecting" | "ended";

export class SessionWatcher {
  readonly feed = new EventFeed();
  status: WatcherStatus = "connecting";
  private controller: AbortController | undefined;
  private stopped = false;
  private statusListeners: ((status: WatcherStatus) => void)[] = [];

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private reconnectDelayMs = 500,
  ) {}

  onStatus(listener: (status: WatcherStatus) => void): void {
    this.statusListeners.push(listener);
  }

  private setStatus(status: WatcherStatus): void {
    this.status = status;
    for (const listener of this.statusListeners) listener(status);
  }

  /** Run until the server ends the stream or stop() is called. */
  async run(): Promise<void> {
    while (!this.stopped) {
      this.controller = new AbortController();
      const url = this.api.streamUrl(this.sessionId, this.feed.resumeFrom);
      try {
        for await (const message of sseStream(url, this.controller.signal)) {
          if (message.event === "end") {
            this.setStatus("ended");
            return;
          }
          if (message.data) {
            this.feed.add(JSON.parse(message.data) as SessionEvent);
            this.setStatus("live");
          }
        }
        // server closed without an end marker: treat as a drop and resume
        if (!this.stopped) this.setStatus("reconnecting");
      } catch (error) {
        if (this.stopped) return;
        this.setStatus("reconnecting");
      }
      await new Promise((resolve) => setTimeout(resolve, this.reconnectDelayMs));
    }
  }

  /** Abort the current connection (run() will resume unless stopped). */
  dropConnection(): void {
    this.controller?.abort();
  }

  stop(): void {
    this.stopped = true;
    this.controller?.abort();
  }
}
