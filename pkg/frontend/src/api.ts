/** Typed client for the /v1 HTTP API.
 *
 * Commands for one session are serialized through a promise chain so the
 * operator's clicks reach the server in the order they were made.
 */

import type {
  CommandResponse,
  Prediction,
  SessionKind,
  SessionResource,
  UtautSchema,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "unknown";
  let message = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body === "object" && body.detail) {
      code = body.detail.code ?? code;
      message = body.detail.message ?? JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  private commandQueues = new Map<string, Promise<unknown>>();

  constructor(public baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  createSession(kind: SessionKind, config: Record<string, unknown> = {}) {
    return this.request<{ session_id: string }>("POST", "/v1/sessions", { kind, config });
  }

  getSession(sessionId: string) {
    return this.request<SessionResource>("GET", `/v1/sessions/${sessionId}`);
  }

  /** Issue a command; per-session ordering is preserved across await points. */
  command(sessionId: string, command: string, payload: Record<string, unknown> = {}) {
    const prior = this.commandQueues.get(sessionId) ?? Promise.resolve();
    const next = prior
      .catch(() => undefined) // a failed command must not block the next one
      .then(() =>
        this.request<CommandResponse>("POST", `/v1/sessions/${sessionId}/commands`, {
          command,
          payload,
        }),
      );
    this.commandQueues.set(sessionId, next);
    return next;
  }

  predict(points: number[][]) {
    return this.request<Prediction>("POST", "/v1/fer/predict", { points });
  }

  painStats(records: Record<string, unknown>[]) {
    return this.request<Record<string, unknown>>("POST", "/v1/stats/pain", { records });
  }

  utautStats(responses: Record<string, unknown>[], pairing = "independent") {
    return this.request<Record<string, unknown>>("POST", "/v1/stats/utaut", {
      responses,
      pairing,
    });
  }

  utautSchema() {
    return this.request<UtautSchema>("GET", "/v1/utaut/schema");
  }

  healthz() {
    return this.request<Record<string, unknown>>("GET", "/v1/healthz");
  }

  streamUrl(sessionId: string, fromSeq: number): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/stream?from=${fromSeq}`;
  }
}
