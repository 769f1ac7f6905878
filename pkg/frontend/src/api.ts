/** Typed client for the session service's REST and WebSocket contract. */

import type {
  EpisodesResponse,
  ExpressionJson,
  GraphSnapshot,
  HmeProposal,
  InstructionResponse,
  SceneResponse,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
  }
}

export class ApiClient {
  constructor(public base: string) {
    this.base = base.replace(/\/$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 204) return undefined as T;
    const data = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail = typeof data.detail === "string" ? data.detail : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return data as T;
  }

  createSession(config: Record<string, unknown>): Promise<{ id: string; config: object }> {
    return this.request("POST", "/sessions", config);
  }

  state(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}/state`);
  }

  graph(id: string, full = false): Promise<GraphSnapshot> {
    return this.request("GET", `/sessions/${id}/graph${full ? "?full=true" : ""}`);
  }

  episodes(id: string, mode: string, count: number): Promise<EpisodesResponse> {
    return this.request("POST", `/sessions/${id}/episodes`, { mode, count });
  }

  setSceneIntervention(id: string, intervention: object): Promise<SceneResponse> {
    return this.request("POST", `/sessions/${id}/scene`, { intervention });
  }

  instruct(
    id: string,
    expression: ExpressionJson,
    attempts: number,
    languageMode: string,
  ): Promise<InstructionResponse> {
    return this.request("POST", `/sessions/${id}/instruction`, {
      expression,
      attempts,
      language_mode: languageMode,
    });
  }

  instructGoal(id: string, goal: string, attempts: number): Promise<InstructionResponse> {
    return this.request("POST", `/sessions/${id}/instruction`, { goal, attempts });
  }

  hmePropose(id: string): Promise<HmeProposal> {
    return this.request("POST", `/sessions/${id}/hme/propose`);
  }

  deleteSession(id: string): Promise<void> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  /** One WebSocket per open session; `since` resumes the append-only log. */
  openEvents(id: string, since: number): WebSocket {
    const ws = this.base.replace(/^http/, "ws");
    return new WebSocket(`${ws}/sessions/${id}/events?since=${since}`);
  }
}
