/** Typed fetch client for the session service's JSON API. */

import type {
  OverrideAck, ProfileDoc, RunReport, ScenarioDoc, ScenarioSummary,
  SessionInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseJson(response: Response): Promise<unknown> {
  const text = await response.text();
  return text ? JSON.parse(text) : {};
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await parseJson(response)) as Record<string, unknown>;
    if (!response.ok) {
      const error = (payload.error ?? {}) as { code?: string; message?: string };
      throw new ApiError(response.status, error.code ?? "unknown",
        error.message ?? `request failed with ${response.status}`);
    }
    return payload as T;
  }

  listProfiles(): Promise<{ profiles: Array<{ worker_id: string; display_name: string }> }> {
    return this.request("GET", "/profiles");
  }

  getProfile(workerId: string): Promise<ProfileDoc> {
    return this.request("GET", `/profiles/${encodeURIComponent(workerId)}`);
  }

  listScenarios(): Promise<{ scenarios: ScenarioSummary[] }> {
    return this.request("GET", "/scenarios");
  }

  getScenario(name: string): Promise<ScenarioDoc> {
    return this.request("GET", `/scenarios/${encodeURIComponent(name)}`);
  }

  createSession(body: {
    profile_id: string;
    scenario_id: string;
    mode?: string;
    speed?: number;
  }): Promise<SessionInfo> {
    return this.request("POST", "/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionInfo> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  start(sessionId: string): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${sessionId}/start`);
  }

  pause(sessionId: string): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${sessionId}/pause`);
  }

  finish(sessionId: string): Promise<SessionInfo> {
    return this.request("POST", `/sessions/${sessionId}/finish`);
  }

  sendOverride(sessionId: string, kind: string, value: number): Promise<OverrideAck> {
    return this.request("POST", `/sessions/${sessionId}/override`, { kind, value });
  }

  clearOverride(sessionId: string, kind: string): Promise<OverrideAck> {
    return this.request("DELETE", `/sessions/${sessionId}/override/${encodeURIComponent(kind)}`);
  }

  getReport(sessionId: string): Promise<RunReport> {
    return this.request("GET", `/sessions/${sessionId}/report`);
  }
}
