/** Seq-keyed event feed: the console's single source of truth.
 *
 * Events may arrive twice (command acknowledgements overlap the stream, and
 * reconnects can replay), so insertion is idempotent by seq. A gap means a
 * broken resume and is surfaced loudly instead of being papered over.
 */

import type { SessionEvent } from "./types.js";

export class EventFeed {
  private events = new Map<number, SessionEvent>();
  private listeners: ((event: SessionEvent) => void)[] = [];

  get lastSeq(): number {
    return this.events.size === 0 ? 0 : Math.max(...this.events.keys());
  }

  get size(): number {
    return this.events.size;
  }

  /** Next `from` value for a stream (re)connect. */
  get resumeFrom(): number {
    return this.lastSeq + 1;
  }

  has(seq: number): boolean {
    return this.events.has(seq);
  }

  /** Insert an event; returns true only for first-time arrivals. */
  add(event: SessionEvent): boolean {
    if (this.events.has(event.seq)) {
      return false;
    }
    this.events.set(event.seq, event);
    for (const listener of this.listeners) {
      listener(event);
    }
    return true;
  }

  addAll(events: SessionEvent[]): number {
    let added = 0;
    for (const event of events) {
      if (this.add(event)) added += 1;
    }
    return added;
  }

  onEvent(listener: (event: SessionEvent) => void): void {
    this.listeners.push(listener);
  }

  /** All events in seq order. */
  ordered(): SessionEvent[] {
    return [...this.events.values()].sort((a, b) => a.seq - b.seq);
  }

  /** Seq numbers missing below the high-water mark (should always be []). */
  gaps(): number[] {
    const missing: number[] = [];
    for (let seq = 1; seq <= this.lastSeq; seq += 1) {
      if (!this.events.has(seq)) missing.push(seq);
    }
    return missing;
  }

  latest(): SessionEvent | undefined {
    const last = this.lastSeq;
    return last === 0 ? undefined : this.events.get(last);
  }
}
