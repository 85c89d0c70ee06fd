import { describe, expect, it } from "vitest";

import {
  applyConnection, applyMessage, initialViewState, markPending,
  overridesEnabled,
} from "../src/state.js";
import { KINDS, makeFrame, testProfile } from "./helpers.js";

function freshState() {
  return initialViewState(Object.keys(testProfile().kinds));
}

describe("view state reducer", () => {
  it("frames update color, readouts, and tick", () => {
    let state = freshState();
    state = applyMessage(state, makeFrame({ tick: 0 }));
    expect(state.lastTick).toBe(0);
    expect(state.mpiColor).toBe("green");
    expect(state.kinds.stress?.value).toBe(0.2);
    expect(state.kinds.stress?.status).toBe("optimal");

    state = applyMessage(state, makeFrame({
      tick: 1, color: "red",
      stress: { value: 0.9, level: "high", status: "suboptimal" },
    }));
    expect(state.mpiColor).toBe("red");
    expect(state.kinds.stress?.status).toBe("suboptimal");
  });

  it("never applies frames at or before the last seen tick", () => {
    let state = freshState();
    state = applyMessage(state, makeFrame({ tick: 5, color: "amber" }));
    const before = state;
    state = applyMessage(state, makeFrame({ tick: 5, color: "red" }));
    expect(state).toBe(before);
    state = applyMessage(state, makeFrame({ tick: 3, color: "red" }));
    expect(state.mpiColor).toBe("amber");
  });

  it("reaction log appends only changed events, ordered by tick", () => {
    let state = freshState();
    state = applyMessage(state, makeFrame({ tick: 0 }));
    state = applyMessage(state, makeFrame({ tick: 1 }));
    state = applyMessage(state, makeFrame({
      tick: 2,
      facial: { animation: "stress_face", changed: true, rule: "stress_face" },
    }));
    state = applyMessage(state, makeFrame({
      tick: 3,
      facial: { animation: "stress_face", changed: false, rule: "stress_face" },
    }));
    const entries = state.reactionLog.map((e) => `${e.tick}:${e.channel}:${e.animationId}`);
    expect(entries).toEqual([
      "0:facial:neutral_face", "0:body:idle", "2:facial:stress_face",
    ]);
    const ticks = state.reactionLog.map((e) => e.tick);
    expect(ticks).toEqual([...ticks].sort((a, b) => a - b));
  });

  it("pending values clear only when the server echoes them", () => {
    let state = freshState();
    state = applyMessage(state, makeFrame({ tick: 0 }));
    state = markPending(state, "stress", 0.95);
    expect(state.kinds.stress?.pending).toBe(0.95);
    state = applyMessage(state, makeFrame({
      tick: 1,
      stress: { value: 0.2, level: "low", status: "optimal" },
    }));
    expect(state.kinds.stress?.pending).toBe(0.95);
    state = applyMessage(state, makeFrame({
      tick: 2, color: "red",
      stress: { value: 0.95, level: "high", status: "suboptimal" },
    }));
    expect(state.kinds.stress?.pending).toBeNull();
    expect(state.kinds.stress?.value).toBe(0.95);
  });

  it("error envelopes surface as notices and leave the feed live", () => {
    let state = freshState();
    state = applyMessage(state, makeFrame({ tick: 0 }));
    state = applyMessage(state, { type: "error", code: "backpressure",
                                  message: "too slow" });
    expect(state.notices.at(-1)?.text).toContain("backpressure");
    expect(state.mpiColor).toBe("green");
    state = applyMessage(state, makeFrame({ tick: 1, color: "amber" }));
    expect(state.mpiColor).toBe("amber");
  });

  it("session events drive the transport state", () => {
    let state = freshState();
    state = applyMessage(state, { type: "session_event", event: "running", tick: 0 });
    expect(state.transport).toBe("running");
    expect(overridesEnabled(state)).toBe(true);
    state = applyMessage(state, { type: "session_event", event: "paused", tick: 4 });
    expect(overridesEnabled(state)).toBe(false);
    state = applyMessage(state, { type: "session_event", event: "finished", tick: 9 });
    expect(state.transport).toBe("finished");
  });

  it("reconnect marker is recorded as a notice", () => {
    let state = freshState();
    state = applyConnection(state, "live", "reconnected");
    expect(state.connection).toBe("live");
    expect(state.notices.at(-1)?.kind).toBe("reconnected");
  });

  it("covers every profile kind", () => {
    const state = freshState();
    expect(Object.keys(state.kinds)).toEqual([...KINDS]);
  });
});
