/** Pain protocol panel: the 0..10 faces chart and per-mode score recording. */

import { ApiClient, ApiError } from "../api.js";
import { SessionWatcher } from "../watch.js";
import { describeEvent } from "../gameView.js";

export const FACE_LABELS = [
  "no hurt", "hurts a tiny bit", "hurts a little", "hurts a little more",
  "hurts more", "hurts a lot", "hurts even more", "hurts a whole lot",
  "hurts very much", "hurts terribly", "hurts worst",
];
export const FACE_GLYPHS = ["😀", "🙂", "🙂", "😐", "😐", "😕", "😕", "☹️", "☹️", "😢", "😭"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class PainPanel {
  private watcher: SessionWatcher;
  private selected: number | null = null;
  private scaleNodes: HTMLElement[] = [];
  private feedList = el("ul", "feed");

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private root: HTMLElement,
  ) {
    this.watcher = new SessionWatcher(api, sessionId);
  }

  async mount(): Promise<void> {
    const scale = el("div", "pain-scale");
    for (let score = 0; score <= 10; score += 1) {
      const node = el("button", "pain-point");
      node.append(el("div", "glyph", FACE_GLYPHS[score]));
      node.append(el("div", "score", String(score)));
      node.title = FACE_LABELS[score];
      node.addEventListener("click", () => this.select(score));
      this.scaleNodes.push(node);
      scale.append(node);
    }

    const form = el("div", "pain-form");
    const participant = el("input") as HTMLInputElement;
    participant.placeholder = "participant id";
    const mode = el("select") as HTMLSelectElement;
    for (const value of ["A_no_robot", "B_with_robot"]) {
      const option = el("option", undefined, value) as HTMLOptionElement;
      option.value = value;
      mode.append(option);
    }
    const record = el("button", "cmd", "record score") as HTMLButtonElement;
    record.addEventListener("click", () => {
      if (this.selected === null || !participant.value) {
        this.toast("pick a score and a participant id first");
        return;
      }
      void this.api
        .command(this.sessionId, "record_pain", {
          participant_id: participant.value,
          mode: mode.value,
          score: this.selected,
        })
        .catch((error) => this.toast(
          error instanceof ApiError ? `${error.code}: ${error.message}` : String(error)));
    });
    form.append(participant, mode, record);

    this.root.append(scale, form, this.feedList);
    this.watcher.feed.onEvent((event) => {
      const line = describeEvent(event);
      this.feedList.prepend(el("li", `ev ev-${event.kind}`, `#${line.seq} ${line.text}`));
    });
    void this.watcher.run();
  }

  unmount(): void {
    this.watcher.stop();
  }

  private select(score: number): void {
    this.selected = score;
    this.scaleNodes.forEach((node, i) => node.classList.toggle("selected", i === score));
  }

  private toast(message: string): void {
    const node = el("div", "toast", message);
    this.root.append(node);
    setTimeout(() => node.remove(), 4000);
  }
}
