/** Console shell: create or open a session and mount the matching panel. */

import { ApiClient } from "./api.js";
import { GamePanel } from "./panels/game.js";
import { PainPanel } from "./panels/pain.js";
import { UtautPanel } from "./panels/utaut.js";
import type { SessionKind } from "./types.js";

interface Panel {
  mount(): Promise<void>;
  unmount(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export async function startConsole(root: HTMLElement, baseUrl = ""): Promise<void> {
  const api = new ApiClient(baseUrl || window.location.origin);
  let active: Panel | undefined;

  const header = el("header");
  header.append(el("h1", undefined, "Maya operator console"));
  const picker = el("div", "picker");
  const panelRoot = el("main", "panel");

  const open = async (kind: SessionKind, sessionId: string) => {
    active?.unmount();
    panelRoot.replaceChildren();
    panelRoot.append(el("h2", undefined, `${kind} session ${sessionId}`));
    if (kind === "game") active = new GamePanel(api, sessionId, panelRoot);
    else if (kind === "pain") active = new PainPanel(api, sessionId, panelRoot);
    else active = new UtautPanel(api, sessionId, panelRoot);
    await active.mount();
  };

  for (const kind of ["game", "pain", "utaut"] as SessionKind[]) {
    const button = el("button", "cmd", `new ${kind} session`);
    button.addEventListener("click", () => {
      void (async () => {
        const config =
          kind === "game"
            ? { child_name: window.prompt("child's name?") ?? "friend", seed: Date.now() % 100000 }
            : {};
        const { session_id } = await api.createSession(kind, config);
        await open(kind, session_id);
      })();
    });
    picker.append(button);
  }

  const existing = el("input") as HTMLInputElement;
  existing.placeholder = "open session id...";
  existing.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && existing.value) {
      void api.getSession(existing.value).then((r) => open(r.kind, r.session_id));
    }
  });
  picker.append(existing);

  header.append(picker);
  root.append(header, panelRoot);
}

declare global {
  interface Window {
    mayaConsole?: typeof startConsole;
  }
}

if (typeof window !== "undefined") {
  window.mayaConsole = startConsole;
  const root = document.getElementById("console-root");
  if (root) {
    void startConsole(root);
  }
}
