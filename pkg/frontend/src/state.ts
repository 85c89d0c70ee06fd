/**
 * Dashboard view state and its pure reducer.
 *
 * Invariants: the rendered index color (and therefore both indicator
 * channels) comes only from server frames; slider values are shown as
 * confirmed only once an echoing frame arrives; the reaction log is
 * ordered by tick and never reorders, including across reconnects.
 */

import type {
  ChannelName, FrameMessage, MpiColor, RangeLevel, RunReport, SessionState,
  StatusClass, TelemetryMessage,
} from "./types.js";

export type ConnectionStatus = "idle" | "connecting" | "live" | "reconnecting" | "closed";

export interface KindView {
  /** Last value sent from the slider, awaiting a server echo. */
  pending: number | null;
  /** Last server-confirmed raw value. */
  value: number | null;
  level: RangeLevel | null;
  status: StatusClass | null;
}

export interface ReactionLogEntry {
  tick: number;
  channel: ChannelName;
  animationId: string;
  sourceRuleId: string;
}

export interface Notice {
  kind: "error" | "reconnected" | "info";
  text: string;
}

export interface DashboardViewState {
  connection: ConnectionStatus;
  sessionId: string | null;
  transport: SessionState | null;
  lastTick: number | null;
  mpiColor: MpiColor | null;
  kinds: Record<string, KindView>;
  reactionLog: ReactionLogEntry[];
  notices: Notice[];
  report: RunReport | null;
  taskFraction: number;
  taskStep: string | null;
  taskErrors: number;
}

export const MAX_LOG_ENTRIES = 200;
export const MAX_NOTICES = 50;

export function initialViewState(kindNames: string[]): DashboardViewState {
  const kinds: Record<string, KindView> = {};
  for (const name of kindNames) {
    kinds[name] = { pending: null, value: null, level: null, status: null };
  }
  return {
    connection: "idle",
    sessionId: null,
    transport: null,
    lastTick: null,
    mpiColor: null,
    kinds,
    reactionLog: [],
    notices: [],
    report: null,
    taskFraction: 0,
    taskStep: null,
    taskErrors: 0,
  };
}

function applyFrame(state: DashboardViewState, frame: FrameMessage): DashboardViewState {
  // Ordering guard: never apply a frame at or before the last seen tick.
  if (state.lastTick !== null && frame.tick <= state.lastTick) {
    return state;
  }
  const kinds: Record<string, KindView> = { ...state.kinds };
  for (const [name, entry] of Object.entries(frame.states)) {
    const previous = kinds[name] ?? { pending: null, value: null, level: null, status: null };
    const echoed = previous.pending !== null && entry.value === previous.pending;
    kinds[name] = {
      pending: echoed ? null : previous.pending,
      value: entry.value,
      level: entry.level,
      status: entry.status,
    };
  }
  const log = [...state.reactionLog];
  for (const channel of ["facial", "body"] as ChannelName[]) {
    const reaction = frame.reactions[channel];
    if (reaction && reaction.changed) {
      log.push({
        tick: frame.tick,
        channel,
        animationId: reaction.animation_id,
        sourceRuleId: reaction.source_rule_id,
      });
    }
  }
  return {
    ...state,
    lastTick: frame.tick,
    mpiColor: frame.mpi.color,
    kinds,
    reactionLog: log.slice(-MAX_LOG_ENTRIES),
    taskFraction: frame.task.fraction,
    taskStep: frame.task.step_id,
    taskErrors: frame.task.errors,
  };
}

function pushNotice(state: DashboardViewState, notice: Notice): DashboardViewState {
  return { ...state, notices: [...state.notices, notice].slice(-MAX_NOTICES) };
}

export function applyMessage(
  state: DashboardViewState,
  message: TelemetryMessage,
): DashboardViewState {
  switch (message.type) {
    case "frame":
      return applyFrame(state, message);
    case "session_event":
      return { ...state, transport: message.event };
    case "error":
      return pushNotice(state, {
        kind: "error",
        text: `${message.code}: ${message.message}`,
      });
  }
}

export function applyConnection(
  state: DashboardViewState,
  connection: ConnectionStatus,
  detail?: string,
): DashboardViewState {
  let next: DashboardViewState = { ...state, connection };
  if (detail === "reconnected") {
    next = pushNotice(next, { kind: "reconnected", text: "reconnected" });
  }
  return next;
}

export function markPending(
  state: DashboardViewState,
  kind: string,
  value: number,
): DashboardViewState {
  const view = state.kinds[kind];
  if (!view) return state;
  return {
    ...state,
    kinds: { ...state.kinds, [kind]: { ...view, pending: value } },
  };
}

export function setReport(
  state: DashboardViewState,
  report: RunReport,
): DashboardViewState {
  return { ...state, report };
}

/** True when slider input should be accepted and sent. */
export function overridesEnabled(state: DashboardViewState): boolean {
  return state.transport === "running";
}
