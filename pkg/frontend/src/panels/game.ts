/** Operator panel for a live Elephant-and-Ladder session.
 *
 * Renders the board (emotion-colored cells, both pieces), the phase banner,
 * and the command buttons; button enablement mirrors the server phase and
 * every acknowledged command shows up through the event stream, never through
 * local rule evaluation.
 */

import { ApiClient, ApiError } from "../api.js";
import { currentState, describeEvent, enabledCommands, GameCommand } from "../gameView.js";
import { SessionWatcher } from "../watch.js";
import type { GameStateSnapshot, SessionEvent } from "../types.js";

const EMOTION_COLORS: Record<string, string> = {
  sadness: "#7aa6d9",
  happiness: "#f2c94c",
  anger: "#eb5757",
  stress: "#bb6bd9",
  surprise: "#6fcf97",
  disgust: "#9b9b4b",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class GamePanel {
  private watcher: SessionWatcher;
  private board = el("div", "board");
  private phaseBanner = el("div", "phase");
  private connBanner = el("div", "banner hidden", "connection lost - resuming...");
  private feedList = el("ul", "feed");
  private buttons = new Map<GameCommand, HTMLButtonElement>();
  private cellEmotions: string[] = [];
  private cellCount = 30;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private root: HTMLElement,
  ) {
    this.watcher = new SessionWatcher(api, sessionId);
  }

  async mount(): Promise<void> {
    const resource = await this.api.getSession(this.sessionId);
    const board = (resource.config.board ?? {}) as Record<string, unknown>;
    this.cellCount = (board.cell_count as number) ?? 30;
    this.cellEmotions = (board.cell_emotions as string[]) ?? [];

    this.root.append(this.connBanner, this.phaseBanner, this.board);
    this.root.append(this.buildControls(), this.feedList);

    this.watcher.feed.onEvent((event) => this.onEvent(event));
    this.watcher.onStatus((status) => {
      this.connBanner.classList.toggle("hidden", status !== "reconnecting");
    });
    void this.watcher.run();
    this.render(resource.state as unknown as GameStateSnapshot);
  }

  unmount(): void {
    this.watcher.stop();
  }

  private buildControls(): HTMLElement {
    const bar = el("div", "controls");
    const defs: [GameCommand, string, () => Promise<unknown>][] = [
      ["roll", "roll (child)", () => this.send("roll")],
      ["robot_roll", "robot roll", () => this.send("robot_roll")],
      ["resolve_expression", "capture expression", () => this.captureExpression()],
      ["teach_word", "teach word", () => this.send("teach_word")],
      ["override", "override", () => this.send("override")],
      ["robot_action", "encourage", () =>
        this.send("robot_action", { kind: "encourage", params: {} })],
      ["finish", "end session", () => this.send("finish")],
    ];
    for (const [command, label, handler] of defs) {
      const button = el("button", `cmd cmd-${command}`, label);
      button.addEventListener("click", () => void handler().catch((e) => this.toast(e)));
      this.buttons.set(command, button);
      bar.append(button);
    }
    return bar;
  }

  private async send(command: string, payload: Record<string, unknown> = {}) {
    return this.api.command(this.sessionId, command, payload);
  }

  /** The operator pastes landmark JSON captured by the external tool. */
  private async captureExpression(): Promise<unknown> {
    const raw = window.prompt("Paste 68 [x, y] landmark pairs (JSON):");
    if (!raw) return undefined;
    return this.send("resolve_expression", { points: JSON.parse(raw) });
  }

  private onEvent(event: SessionEvent): void {
    const line = describeEvent(event);
    const item = el("li", `ev ev-${event.kind}`, `#${line.seq} ${line.text}`);
    this.feedList.prepend(item);
    const state = currentState(this.watcher.feed);
    if (state) this.render(state);
  }

  private render(state: GameStateSnapshot): void {
    this.phaseBanner.textContent =
      `phase: ${state.phase}` +
      (state.pending_emotion ? ` - waiting for ${state.pending_emotion}` : "") +
      (state.retry_count ? ` (retry ${state.retry_count})` : "") +
      (state.winner ? ` - winner: ${state.winner}` : "");

    this.board.replaceChildren();
    for (let cell = this.cellCount; cell >= 0; cell -= 1) {
      const node = el("div", "cell", String(cell));
      const emotion = cell >= 1 ? this.cellEmotions[cell - 1] : undefined;
      if (emotion) node.style.background = EMOTION_COLORS[emotion] ?? "#ddd";
      if (state.child_pos === cell) node.append(el("span", "piece child", "C"));
      if (state.robot_pos === cell) node.append(el("span", "piece robot", "R"));
      this.board.append(node);
    }

    const enabled = enabledCommands(state.phase);
    for (const [command, button] of this.buttons) {
      button.disabled = !enabled.has(command);
    }
  }

  private toast(error: unknown): void {
    const message =
      error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    const node = el("div", "toast", message);
    this.root.append(node);
    setTimeout(() => node.remove(), 4000);
  }
}
