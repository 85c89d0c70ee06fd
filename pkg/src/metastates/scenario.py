"""Scripted scenarios: seeded timelines of state setpoints plus a task spec."""
from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .errors import Diagnostic, MigrationRequired, ValidationFailed
from .jsonio import dump_document
from .states import DEFAULT_REGISTRY, StateRegistry

SCHEMA_VERSION = 1
DEFAULT_TICK_MS = 100


@dataclass(frozen=True)
class TaskStep:
    step_id: str
    base_duration_ms: int
    base_error_prob: float = 0.0


@dataclass(frozen=True)
class TaskSpec:
    steps: tuple[TaskStep, ...]


@dataclass(frozen=True)
class Scenario:
    """A deterministic, seedable timeline of per-kind keyframes and a task.

    Values between keyframes interpolate linearly; outside the keyframe span
    they clamp to the endpoints. Per-kind gaussian noise (sigma >= 0) comes
    from substreams of the scenario seed.
    """

    name: str
    seed: int
    tick_ms: int
    duration_ms: int
    timeline: Mapping[str, tuple[tuple[int, float], ...]]
    task: TaskSpec
    noise_sigma: Mapping[str, float] = field(default_factory=dict)

    def sigma(self, kind: str) -> float:
        return self.noise_sigma.get(kind, 0.0)

    @property
    def total_ticks(self) -> int:
        return self.duration_ms // self.tick_ms

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)


def validate_scenario(scenario: Scenario,
                      registry: StateRegistry = DEFAULT_REGISTRY,
                      ) -> list[Diagnostic]:
    """Semantic checks; empty list means the scenario can drive a run."""
    diagnostics: list[Diagnostic] = []
    if scenario.tick_ms <= 0:
        diagnostics.append(Diagnostic("bad_tick", "tick_ms must be positive"))
    if scenario.duration_ms <= 0:
        diagnostics.append(Diagnostic("bad_duration", "duration_ms must be positive"))
    elif scenario.tick_ms > 0 and scenario.duration_ms % scenario.tick_ms != 0:
        diagnostics.append(Diagnostic(
            "bad_duration", "duration_ms must be a whole number of ticks"))
    for kind in registry:
        if kind not in scenario.timeline:
            diagnostics.append(Diagnostic(
                "missing_kind", f"timeline has no keyframes for kind {kind!r}",
                subject=kind))
    for kind, keyframes in scenario.timeline.items():
        if kind not in registry:
            diagnostics.append(Diagnostic(
                "unknown_kind", f"timeline kind {kind!r} is not registered",
                subject=kind))
        if not keyframes:
            diagnostics.append(Diagnostic(
                "missing_kind", f"kind {kind!r} has an empty keyframe list",
                subject=kind))
            continue
        times = [t for t, _ in keyframes]
        if times != sorted(times):
            diagnostics.append(Diagnostic(
                "unsorted_keyframes", f"keyframes for kind {kind!r} are not sorted",
                subject=kind))
        if times and times[-1] > scenario.duration_ms:
            diagnostics.append(Diagnostic(
                "bad_duration",
                f"duration_ms does not cover the last keyframe of {kind!r}",
                subject=kind))
        for _, value in keyframes:
            if not math.isfinite(value):
                diagnostics.append(Diagnostic(
                    "bad_keyframe", f"non-finite keyframe value for kind {kind!r}",
                    subject=kind))
                break
    for kind, sigma in scenario.noise_sigma.items():
        if sigma < 0 or not math.isfinite(sigma):
            diagnostics.append(Diagnostic(
                "bad_sigma", f"noise sigma for kind {kind!r} must be finite and >= 0",
                subject=kind))
    if not scenario.task.steps:
        diagnostics.append(Diagnostic("empty_task", "task must have at least one step"))
    for step in scenario.task.steps:
        if step.base_duration_ms <= 0:
            diagnostics.append(Diagnostic(
                "bad_step", f"step {step.step_id!r} must have a positive duration",
                subject=step.step_id))
        if not 0.0 <= step.base_error_prob < 1.0:
            diagnostics.append(Diagnostic(
                "bad_step", f"step {step.step_id!r} error probability must lie in [0, 1)",
                subject=step.step_id))
    return diagnostics


def interpolate_keyframes(keyframes: Sequence[tuple[int, float]], t_ms: int) -> float:
    """Piecewise-linear interpolation, clamped to the endpoint values."""
    times = [t for t, _ in keyframes]
    if t_ms <= times[0]:
        return keyframes[0][1]
    if t_ms >= times[-1]:
        return keyframes[-1][1]
    right = bisect.bisect_right(times, t_ms)
    t0, v0 = keyframes[right - 1]
    t1, v1 = keyframes[right]
    if t1 == t0:
        return v1
    fraction = (t_ms - t0) / (t1 - t0)
    return v0 + (v1 - v0) * fraction


def scenario_value(scenario: Scenario, kind: str, t_ms: int,
                   rng: random.Random | None = None) -> float:
    """The scripted value of one kind at one instant, plus seeded noise."""
    base = interpolate_keyframes(scenario.timeline[kind], t_ms)
    sigma = scenario.sigma(kind)
    if rng is not None and sigma > 0:
        return base + rng.gauss(0.0, sigma)
    return base


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": scenario.name,
        "seed": scenario.seed,
        "tick_ms": scenario.tick_ms,
        "duration_ms": scenario.duration_ms,
        "timeline": {
            kind: [[t, v] for t, v in keyframes]
            for kind, keyframes in scenario.timeline.items()
        },
        "noise_sigma": dict(scenario.noise_sigma),
        "task": {
            "steps": [
                {"step_id": s.step_id,
                 "base_duration_ms": s.base_duration_ms,
                 "base_error_prob": s.base_error_prob}
                for s in scenario.task.steps
            ],
        },
    }


def scenario_from_dict(data: Mapping, default_tick_ms: int = DEFAULT_TICK_MS) -> Scenario:
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise MigrationRequired(version, SCHEMA_VERSION)
    try:
        timeline = {
            str(kind): tuple((int(t), float(v)) for t, v in keyframes)
            for kind, keyframes in data["timeline"].items()
        }
        steps = tuple(
            TaskStep(step_id=str(s["step_id"]),
                     base_duration_ms=int(s["base_duration_ms"]),
                     base_error_prob=float(s.get("base_error_prob", 0.0)))
            for s in data["task"]["steps"]
        )
        return Scenario(
            name=str(data["name"]),
            seed=int(data.get("seed", 0)),
            tick_ms=int(data.get("tick_ms", default_tick_ms)),
            duration_ms=int(data["duration_ms"]),
            timeline=timeline,
            task=TaskSpec(steps=steps),
            noise_sigma={str(k): float(v)
                         for k, v in data.get("noise_sigma", {}).items()},
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ValidationFailed([Diagnostic("bad_scenario", str(exc))]) from exc


def load_scenario_file(path: str | Path,
                       default_tick_ms: int = DEFAULT_TICK_MS) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh), default_tick_ms=default_tick_ms)


def save_scenario_file(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(dump_document(scenario_to_dict(scenario)), encoding="utf-8")
