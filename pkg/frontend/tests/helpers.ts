/** Shared fixtures: a wire-accurate profile and frame factory. */

import type {
  FrameMessage, MpiColor, ProfileDoc, RangeLevel, StatusClass,
} from "../src/types.js";

export const KINDS = ["stress", "attention", "cognitive_workload",
  "physical_fatigue"] as const;

export function testProfile(): ProfileDoc {
  const kinds: ProfileDoc["kinds"] = {};
  for (const kind of KINDS) {
    kinds[kind] = {
      polarity: kind === "attention" ? "higher_is_better" : "lower_is_better",
      thresholds: { t_low: 0.4, t_high: 0.7 },
    };
  }
  return {
    schema_version: 1,
    worker_id: "default",
    display_name: "Default Worker",
    hysteresis: 0,
    kinds,
  };
}

export interface FrameSpec {
  tick: number;
  color?: MpiColor;
  stress?: { value: number; level: RangeLevel; status: StatusClass };
  facial?: { animation: string; changed: boolean; rule?: string };
  body?: { animation: string; changed: boolean; rule?: string };
}

export function makeFrame(spec: FrameSpec): FrameMessage {
  const color = spec.color ?? "green";
  const stress = spec.stress ?? { value: 0.2, level: "low", status: "optimal" };
  const optimal = (value: number, level: RangeLevel): FrameMessage["states"][string] =>
    ({ value, level, status: "optimal" });
  const facial = spec.facial ?? { animation: "neutral_face", changed: spec.tick === 0 };
  const body = spec.body ?? { animation: "idle", changed: spec.tick === 0 };
  return {
    type: "frame",
    tick: spec.tick,
    t_ms: spec.tick * 100,
    states: {
      stress,
      attention: optimal(0.9, "high"),
      cognitive_workload: optimal(0.2, "low"),
      physical_fatigue: optimal(0.1, "low"),
    },
    mpi: {
      color,
      aura: color,
      sphere: color,
      statuses: {
        stress: stress.status,
        attention: "optimal",
        cognitive_workload: "optimal",
        physical_fatigue: "optimal",
      },
    },
    reactions: {
      facial: {
        animation_id: facial.animation,
        source_rule_id: facial.rule ?? "default",
        cause: null,
        changed: facial.changed,
      },
      body: {
        animation_id: body.animation,
        source_rule_id: body.rule ?? "default",
        cause: null,
        changed: body.changed,
      },
    },
    task: {
      step_id: "work",
      step_index: 0,
      fraction: Math.min(1, spec.tick * 0.01),
      errors: 0,
      completed: false,
      paused: false,
      break_suggested: false,
    },
  };
}
