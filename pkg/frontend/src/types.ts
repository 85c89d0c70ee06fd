/**
 * Wire types mirrored from the session service.
 *
 * The dashboard never recomputes levels, statuses, or colors: everything
 * rendered comes verbatim from these payloads.
 */

export type MpiColor = "green" | "amber" | "red";
export type RangeLevel = "low" | "mid" | "high";
export type StatusClass = "optimal" | "thread" | "suboptimal";
export type ChannelName = "facial" | "body";
export type SessionState = "created" | "running" | "paused" | "finished";

export interface StateEntry {
  value: number;
  level: RangeLevel;
  status: StatusClass;
}

export interface MpiPayload {
  color: MpiColor;
  aura: MpiColor;
  sphere: MpiColor;
  statuses: Record<string, StatusClass>;
}

export interface ReactionPayload {
  animation_id: string;
  source_rule_id: string;
  cause: { kind: string; status: StatusClass } | null;
  changed: boolean;
}

export interface TaskPayload {
  step_id: string | null;
  step_index: number;
  fraction: number;
  errors: number;
  completed: boolean;
  paused: boolean;
  break_suggested: boolean;
}

export interface FrameMessage {
  type: "frame";
  tick: number;
  t_ms: number;
  states: Record<string, StateEntry>;
  mpi: MpiPayload;
  reactions: Record<ChannelName, ReactionPayload>;
  task: TaskPayload;
}

export interface SessionEventMessage {
  type: "session_event";
  event: "running" | "paused" | "finished";
  tick: number;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type TelemetryMessage = FrameMessage | SessionEventMessage | ErrorMessage;

export interface SessionInfo {
  session_id: string;
  profile_id: string;
  scenario_id: string;
  mode: string;
  state: SessionState;
  next_tick: number;
  total_ticks: number;
}

export interface ThresholdsDoc {
  t_low: number;
  t_high: number;
}

export interface ProfileDoc {
  schema_version: number;
  worker_id: string;
  display_name: string;
  hysteresis: number;
  kinds: Record<string, { polarity: string; thresholds: ThresholdsDoc }>;
}

export interface ScenarioSummary {
  name: string;
  duration_ms: number;
  tick_ms: number;
}

export interface ScenarioDoc {
  schema_version: number;
  name: string;
  seed: number;
  tick_ms: number;
  duration_ms: number;
  timeline: Record<string, Array<[number, number]>>;
}

export interface RunReport {
  ticks: number;
  tick_ms: number;
  duration_ms: number;
  task: { completed: boolean; completion_ms: number | null; errors: number };
  dwell_ms: Record<MpiColor, number>;
  reaction_events: Record<string, number>;
  break_suggestions: number;
}

export interface OverrideAck {
  session_id: string;
  kind: string;
  value: number;
  effective_tick: number;
}
