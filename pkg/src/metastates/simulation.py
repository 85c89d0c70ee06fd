"""Deterministic tick engine: state pipeline, task model, telemetry frames.

Each tick runs the same pipeline: resolve raw values (live overrides beat
the scenario timeline), smooth, classify, aggregate the index, evaluate the
reaction rules, advance the task, and emit one immutable TickFrame. A batch
run is a pure function of (scenario, profile, performance model, seed).
"""
from __future__ import annotations

import hashlib
import math
import random
import threading
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import (Diagnostic, InvalidSample, InvalidState, UnknownKind,
                     ValidationFailed)
from .ingest import StreamSmoother
from .jsonio import dump_line
from .mpi import MpiColor, MpiSnapshot, aggregate_mpi, mpi_snapshot
from .profiles import WorkerProfile, validate_profile
from .reactions import ReactionChannel, ReactionEvent, evaluate_mrm
from .scenario import Scenario, scenario_value, validate_scenario
from .states import (DEFAULT_REGISTRY, OrderedWireEnum, RangeLevel,
                     StateRegistry, StateSnapshot, snapshot)

#: Bernoulli error probabilities are clamped strictly below 1.
_MAX_ERROR_PROB = math.nextafter(1.0, 0.0)


class BreakPolicy(OrderedWireEnum):
    """What a RED index does to the task: nothing, a suggestion, or a pause."""

    NONE = 0
    SUGGEST = 1
    PAUSE = 2


@dataclass(frozen=True)
class PerformanceModel:
    """How the index color modulates task duration and error probability.

    The green duration multiplier is pinned to 1.0 (baseline); amber and red
    multipliers may only slow things down, never speed them up, and grow
    with severity. The optional green boost (< 1.0) models a worker
    exceeding baseline while green; it is off by default.
    """

    duration_multipliers: Mapping[MpiColor, float] = field(
        default_factory=lambda: {MpiColor.GREEN: 1.0,
                                 MpiColor.AMBER: 1.25,
                                 MpiColor.RED: 2.0})
    error_multipliers: Mapping[MpiColor, float] = field(
        default_factory=lambda: {MpiColor.GREEN: 1.0,
                                 MpiColor.AMBER: 1.5,
                                 MpiColor.RED: 3.0})
    red_break_policy: BreakPolicy = BreakPolicy.NONE
    green_boost_multiplier: float | None = None

    def duration_multiplier(self, color: MpiColor) -> float:
        if color == MpiColor.GREEN and self.green_boost_multiplier is not None:
            return self.green_boost_multiplier
        return self.duration_multipliers[color]

    def error_multiplier(self, color: MpiColor) -> float:
        return self.error_multipliers[color]


DEFAULT_PERFORMANCE_MODEL = PerformanceModel()


def validate_performance_model(perf: PerformanceModel) -> list[Diagnostic]:
    diagnostics: list[Diagnostic] = []
    for mapping, label in ((perf.duration_multipliers, "duration"),
                           (perf.error_multipliers, "error")):
        for color in MpiColor:
            if color not in mapping:
                diagnostics.append(Diagnostic(
                    "missing_multiplier", f"no {label} multiplier for {color.wire}",
                    subject=color.wire))
    if diagnostics:
        return diagnostics
    if perf.duration_multipliers[MpiColor.GREEN] != 1.0:
        diagnostics.append(Diagnostic(
            "bad_multiplier", "green duration multiplier must be exactly 1.0"))
    for mapping, label in ((perf.duration_multipliers, "duration"),
                           (perf.error_multipliers, "error")):
        ordered = [mapping[c] for c in MpiColor]
        if any(b < a for a, b in zip(ordered, ordered[1:])):
            diagnostics.append(Diagnostic(
                "bad_multiplier",
                f"{label} multipliers must be non-decreasing in severity"))
    if perf.green_boost_multiplier is not None:
        if not 0.0 < perf.green_boost_multiplier < 1.0:
            diagnostics.append(Diagnostic(
                "bad_multiplier", "green boost multiplier must lie in (0, 1)"))
    return diagnostics


def performance_model_to_dict(perf: PerformanceModel) -> dict:
    return {
        "duration_multipliers": {c.wire: perf.duration_multipliers[c]
                                 for c in MpiColor},
        "error_multipliers": {c.wire: perf.error_multipliers[c]
                              for c in MpiColor},
        "red_break_policy": perf.red_break_policy.wire,
        "green_boost_multiplier": perf.green_boost_multiplier,
    }


def performance_model_from_dict(data: Mapping) -> PerformanceModel:
    try:
        boost = data.get("green_boost_multiplier")
        return PerformanceModel(
            duration_multipliers={MpiColor.from_wire(c): float(m)
                                  for c, m in data["duration_multipliers"].items()},
            error_multipliers={MpiColor.from_wire(c): float(m)
                               for c, m in data["error_multipliers"].items()},
            red_break_policy=BreakPolicy.from_wire(
                data.get("red_break_policy", "none")),
            green_boost_multiplier=None if boost is None else float(boost),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ValidationFailed([Diagnostic("bad_performance_model", str(exc))]) from exc


@dataclass(frozen=True)
class TaskProgress:
    """Task state as reported in a frame; fraction is of the current step."""

    step_id: str | None
    step_index: int
    fraction: float
    errors: int
    completed: bool
    paused: bool
    break_suggested: bool

    def to_dict(self) -> dict:
        return {
            "step_id": self.step_id,
            "step_index": self.step_index,
            "fraction": self.fraction,
            "errors": self.errors,
            "completed": self.completed,
            "paused": self.paused,
            "break_suggested": self.break_suggested,
        }


class TaskRunner:
    """Advances the step list one tick at a time under the index color.

    Progress is accumulated as effective milliseconds (tick_ms divided by
    the color's duration multiplier) so integer tick counts stay exact for
    exactly-representable multipliers. Completed steps do not carry leftover
    progress into the next step. Stepping a completed task is a no-op.
    """

    def __init__(self, steps, rng: random.Random):
        self._steps = list(steps)
        self._rng = rng
        self._index = 0
        self._effective_ms = 0.0
        self._errors: list[str] = []
        self.completed = not self._steps
        self.paused = False
        self.break_suggested = False

    def step(self, color: MpiColor, perf: PerformanceModel, tick_ms: int) -> None:
        if self.completed:
            return
        self.paused = False
        self.break_suggested = False
        if color == MpiColor.RED:
            if perf.red_break_policy == BreakPolicy.PAUSE:
                self.paused = True
                return
            if perf.red_break_policy == BreakPolicy.SUGGEST:
                self.break_suggested = True
        current = self._steps[self._index]
        self._effective_ms += tick_ms / perf.duration_multiplier(color)
        if self._effective_ms >= current.base_duration_ms - 1e-9:
            p = min(current.base_error_prob * perf.error_multiplier(color),
                    _MAX_ERROR_PROB)
            if p > 0 and self._rng.random() < p:
                self._errors.append(current.step_id)
            self._index += 1
            self._effective_ms = 0.0
            if self._index >= len(self._steps):
                self.completed = True

    def progress(self) -> TaskProgress:
        if self.completed:
            last = self._steps[-1] if self._steps else None
            return TaskProgress(
                step_id=last.step_id if last else None,
                step_index=max(len(self._steps) - 1, 0),
                fraction=1.0,
                errors=len(self._errors),
                completed=True,
                paused=False,
                break_suggested=False,
            )
        current = self._steps[self._index]
        return TaskProgress(
            step_id=current.step_id,
            step_index=self._index,
            fraction=min(self._effective_ms / current.base_duration_ms, 1.0),
            errors=len(self._errors),
            completed=False,
            paused=self.paused,
            break_suggested=self.break_suggested,
        )


@dataclass(frozen=True)
class TickFrame:
    """The per-tick telemetry unit; all sub-structures share one timestamp."""

    tick: int
    t_ms: int
    states: StateSnapshot
    mpi: MpiSnapshot
    reactions: Mapping[ReactionChannel, ReactionEvent]
    changed: Mapping[ReactionChannel, bool]
    task: TaskProgress

    def to_dict(self) -> dict:
        return {
            "type": "frame",
            "tick": self.tick,
            "t_ms": self.t_ms,
            "states": {
                kind: {"value": r.value, "level": r.level.wire,
                       "status": r.status.wire}
                for kind, r in self.states.readings.items()
            },
            "mpi": self.mpi.to_dict(),
            "reactions": {
                channel.wire: {**event.to_dict(),
                               "changed": self.changed[channel]}
                for channel, event in self.reactions.items()
            },
            "task": self.task.to_dict(),
        }

    def to_json_line(self) -> str:
        return dump_line(self.to_dict())


def derive_substream_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed for a labeled stream of one run."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class SimulationEngine:
    """Owns one run's mutable state and produces frames tick by tick.

    Thread-safe for the one-writer pattern the session service uses: the
    tick loop is the sole caller of tick(), while overrides may arrive from
    any thread and take effect at the next tick boundary.
    """

    def __init__(self, scenario: Scenario, profile: WorkerProfile,
                 perf: PerformanceModel = DEFAULT_PERFORMANCE_MODEL,
                 registry: StateRegistry = DEFAULT_REGISTRY,
                 smoothing_alpha: float = 1.0):
        diagnostics = validate_profile(profile, registry)
        diagnostics += validate_scenario(scenario, registry)
        diagnostics += validate_performance_model(perf)
        if diagnostics:
            raise ValidationFailed(diagnostics)
        self.scenario = scenario
        self.profile = profile
        self.perf = perf
        self.registry = registry
        self._noise_rngs = {
            kind: random.Random(derive_substream_seed(scenario.seed, f"noise:{kind}"))
            for kind in registry
        }
        self._task = TaskRunner(
            scenario.task.steps,
            random.Random(derive_substream_seed(scenario.seed, "task")))
        self._smoother = StreamSmoother(smoothing_alpha)
        self._overrides: dict[str, float] = {}
        self._previous_levels: dict[str, RangeLevel] = {}
        self._previous_animations: dict[ReactionChannel, str] = {}
        self._next_tick = 0
        self._lock = threading.Lock()

    @property
    def total_ticks(self) -> int:
        return self.scenario.total_ticks

    @property
    def next_tick(self) -> int:
        with self._lock:
            return self._next_tick

    @property
    def done(self) -> bool:
        with self._lock:
            return self._next_tick >= self.scenario.total_ticks

    def set_override(self, kind: str, value: float) -> int:
        """Pin one kind's raw input; returns the first tick that sees it."""
        if kind not in self.registry:
            raise UnknownKind(kind)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidSample(value, kind=kind)
        with self._lock:
            self._overrides[kind] = float(value)
            return self._next_tick

    def clear_override(self, kind: str) -> int:
        """Return one kind to the scenario timeline from the next tick on."""
        if kind not in self.registry:
            raise UnknownKind(kind)
        with self._lock:
            self._overrides.pop(kind, None)
            return self._next_tick

    def tick(self) -> TickFrame:
        with self._lock:
            tick_index = self._next_tick
            if tick_index >= self.scenario.total_ticks:
                raise InvalidState("scenario duration exhausted", state="done")
            self._next_tick += 1
            overrides = dict(self._overrides)
        t_ms = tick_index * self.scenario.tick_ms
        raw: dict[str, float] = {}
        for kind in self.registry:
            if kind in overrides:
                raw[kind] = overrides[kind]
            else:
                raw[kind] = scenario_value(self.scenario, kind, t_ms,
                                           rng=self._noise_rngs[kind])
        smoothed = {kind: self._smoother.update(kind, value)
                    for kind, value in raw.items()}
        state = snapshot(smoothed, self.profile, t_ms,
                         previous_levels=self._previous_levels)
        self._previous_levels = {k: r.level for k, r in state.readings.items()}
        index = mpi_snapshot(state)
        events = evaluate_mrm(state.statuses(), self.profile.mrm_rules,
                              self.profile.default_animations, t_ms)
        changed = {
            channel: self._previous_animations.get(channel) != event.animation_id
            for channel, event in events.items()
        }
        self._previous_animations = {
            channel: event.animation_id for channel, event in events.items()
        }
        self._task.step(index.color, self.perf, self.scenario.tick_ms)
        return TickFrame(
            tick=tick_index,
            t_ms=t_ms,
            states=state,
            mpi=index,
            reactions=events,
            changed=changed,
            task=self._task.progress(),
        )

    def frames(self) -> Iterator[TickFrame]:
        while not self.done:
            yield self.tick()


def run_batch(scenario: Scenario, profile: WorkerProfile,
              perf: PerformanceModel = DEFAULT_PERFORMANCE_MODEL,
              registry: StateRegistry = DEFAULT_REGISTRY,
              smoothing_alpha: float = 1.0) -> list[TickFrame]:
    """Run a whole scenario as fast as possible and return every frame."""
    engine = SimulationEngine(scenario, profile, perf, registry,
                              smoothing_alpha=smoothing_alpha)
    return list(engine.frames())


def audit_frame_dict(frame: Mapping, profile: WorkerProfile) -> list[str]:
    """Recompute index and reactions from a frame's own snapshot.

    Returns human-readable mismatch descriptions; an empty list means the
    frame is internally consistent with the pipeline that claims to have
    produced it.
    """
    from .states import StatusClass

    problems: list[str] = []
    statuses = {kind: StatusClass.from_wire(entry["status"])
                for kind, entry in frame["states"].items()}
    expected_color = aggregate_mpi(statuses).wire
    if frame["mpi"]["color"] != expected_color:
        problems.append(
            f"tick {frame['tick']}: mpi color {frame['mpi']['color']} != "
            f"recomputed {expected_color}")
    for indicator in ("aura", "sphere"):
        if frame["mpi"][indicator] != frame["mpi"]["color"]:
            problems.append(
                f"tick {frame['tick']}: indicator {indicator} diverges from color")
    for kind, status in statuses.items():
        if frame["mpi"]["statuses"].get(kind) != status.wire:
            problems.append(
                f"tick {frame['tick']}: mpi status for {kind} diverges from snapshot")
    events = evaluate_mrm(statuses, profile.mrm_rules,
                          profile.default_animations, frame["t_ms"])
    for channel, event in events.items():
        reported = frame["reactions"][channel.wire]
        if reported["animation_id"] != event.animation_id:
            problems.append(
                f"tick {frame['tick']}: {channel.wire} animation "
                f"{reported['animation_id']} != recomputed {event.animation_id}")
        if reported["source_rule_id"] != event.source_rule_id:
            problems.append(
                f"tick {frame['tick']}: {channel.wire} source rule "
                f"{reported['source_rule_id']} != recomputed {event.source_rule_id}")
    return problems
