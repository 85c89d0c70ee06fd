/**
 * Controller wiring the API client, telemetry stream, throttle, reducer,
 * and DOM together. The server is the source of truth for every rendered
 * level, status, and color.
 */

import { ApiClient } from "./api.js";
import { Dashboard } from "./render.js";
import {
  applyConnection, applyMessage, initialViewState, markPending,
  overridesEnabled, setReport,
} from "./state.js";
import type { DashboardViewState } from "./state.js";
import { openTelemetryStream } from "./stream.js";
import type { StreamHandle, StreamOptions } from "./stream.js";
import { KeyedThrottle } from "./throttle.js";
import type { ProfileDoc, TelemetryMessage } from "./types.js";

export const OVERRIDE_THROTTLE_MS = 100;

export interface AppOptions {
  fetchImpl?: typeof fetch;
  streamOverrides?: Partial<StreamOptions>;
}

export class DashboardApp {
  readonly api: ApiClient;
  readonly view: Dashboard;
  state: DashboardViewState;
  private stream: StreamHandle | null = null;
  private readonly throttle: KeyedThrottle<number>;
  sessionId: string | null = null;

  constructor(
    container: HTMLElement,
    baseUrl: string,
    readonly profile: ProfileDoc,
    private readonly options: AppOptions = {},
  ) {
    this.api = new ApiClient(baseUrl, options.fetchImpl ?? fetch);
    this.state = initialViewState(Object.keys(profile.kinds));
    this.view = new Dashboard(container, profile, {
      onSliderInput: (kind, value) => this.handleSliderInput(kind, value),
      onTransport: (action) => void this.handleTransport(action),
    });
    this.throttle = new KeyedThrottle<number>(OVERRIDE_THROTTLE_MS,
      (kind, value) => void this.sendOverride(kind, value));
    this.view.update(this.state);
  }

  private setState(state: DashboardViewState): void {
    this.state = state;
    this.view.update(state);
  }

  async createSession(profileId: string, scenarioId: string,
                      mode = "realtime", speed?: number): Promise<string> {
    const info = await this.api.createSession({
      profile_id: profileId, scenario_id: scenarioId, mode, speed,
    });
    this.sessionId = info.session_id;
    this.setState({ ...this.state, sessionId: info.session_id,
                    transport: info.state });
    this.connect(info.session_id);
    return info.session_id;
  }

  /** Subscribe to a session's telemetry from the current tick onward. */
  connect(sessionId: string, fromTick?: number): void {
    this.stream?.close();
    this.sessionId = sessionId;
    this.setState(applyConnection(
      { ...this.state, sessionId }, "connecting"));
    this.stream = openTelemetryStream({
      baseUrl: this.api.baseUrl,
      sessionId,
      fromTick,
      fetchImpl: this.options.fetchImpl,
      ...this.options.streamOverrides,
      callbacks: {
        onMessage: (message) => this.dispatch(message),
        onStatus: (status, detail) => {
          this.setState(applyConnection(this.state,
            status === "live" ? "live"
              : status === "connecting" ? "connecting"
              : status === "reconnecting" ? "reconnecting" : "closed",
            detail));
        },
      },
    });
  }

  dispatch(message: TelemetryMessage): void {
    this.setState(applyMessage(this.state, message));
    if (message.type === "session_event" && message.event === "finished") {
      void this.loadReport();
    }
  }

  private async loadReport(): Promise<void> {
    if (!this.sessionId) return;
    try {
      const report = await this.api.getReport(this.sessionId);
      this.setState(setReport(this.state, report));
    } catch {
      // The report endpoint may briefly race the finish event; not fatal.
    }
  }

  handleSliderInput(kind: string, value: number): void {
    if (!overridesEnabled(this.state) || !this.sessionId) return;
    this.setState(markPending(this.state, kind, value));
    this.throttle.push(kind, value);
  }

  private async sendOverride(kind: string, value: number): Promise<void> {
    if (!this.sessionId) return;
    try {
      await this.api.sendOverride(this.sessionId, kind, value);
    } catch (error) {
      this.dispatch({ type: "error", code: "override_failed",
                      message: String(error) });
    }
  }

  async handleTransport(action: "start" | "pause" | "finish"): Promise<void> {
    if (!this.sessionId) return;
    try {
      const info = await this.api[action](this.sessionId);
      this.setState({ ...this.state, transport: info.state });
    } catch (error) {
      this.dispatch({ type: "error", code: "transport_failed",
                      message: String(error) });
    }
  }

  close(): void {
    this.stream?.close();
    this.throttle.dispose();
  }
}
