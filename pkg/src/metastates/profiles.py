"""Worker profiles: the digital identity minus the 3D mesh.

A profile holds, per state kind, the polarity and thresholds used for
classification, plus the worker's reaction rules and fallback animations.
Profiles serialize to JSON documents gated by a schema version.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .errors import Diagnostic, MigrationRequired, ValidationFailed
from .jsonio import dump_document
from .reactions import (DefaultAnimations, ReactionRule, rule_from_dict,
                        rule_to_dict, validate_rules)
from .states import (DEFAULT_REGISTRY, Polarity, StateRegistry, Thresholds)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class KindProfile:
    """Classification parameters for one kind."""

    polarity: Polarity
    thresholds: Thresholds


@dataclass(frozen=True)
class WorkerProfile:
    worker_id: str
    display_name: str
    kinds: Mapping[str, KindProfile]
    mrm_rules: tuple[ReactionRule, ...] = ()
    default_animations: DefaultAnimations = field(default_factory=DefaultAnimations)
    hysteresis: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def thresholds_for(self, kind: str) -> Thresholds:
        return self.kinds[kind].thresholds

    def with_thresholds(self, thresholds: Mapping[str, Thresholds]) -> "WorkerProfile":
        """Copy of this profile with some kinds' thresholds replaced."""
        kinds = dict(self.kinds)
        for kind, t in thresholds.items():
            kinds[kind] = KindProfile(polarity=kinds[kind].polarity, thresholds=t)
        return replace(self, kinds=kinds)


def validate_profile(profile: WorkerProfile,
                     registry: StateRegistry = DEFAULT_REGISTRY,
                     ) -> list[Diagnostic]:
    """Semantic checks beyond what the dataclasses enforce structurally."""
    diagnostics: list[Diagnostic] = []
    if not profile.worker_id:
        diagnostics.append(Diagnostic("empty_worker_id", "worker_id must be non-empty"))
    for kind in registry:
        if kind not in profile.kinds:
            diagnostics.append(Diagnostic(
                "missing_kind", f"profile has no entry for registered kind {kind!r}",
                subject=kind))
    for kind in profile.kinds:
        if kind not in registry:
            diagnostics.append(Diagnostic(
                "unknown_kind", f"profile entry for unregistered kind {kind!r}",
                subject=kind))
    if profile.hysteresis < 0:
        diagnostics.append(Diagnostic(
            "bad_hysteresis", "hysteresis band must be >= 0"))
    diagnostics.extend(validate_rules(profile.mrm_rules, registry))
    return diagnostics


def profile_to_dict(profile: WorkerProfile) -> dict:
    return {
        "schema_version": profile.schema_version,
        "worker_id": profile.worker_id,
        "display_name": profile.display_name,
        "hysteresis": profile.hysteresis,
        "kinds": {
            kind: {
                "polarity": kp.polarity.wire,
                "thresholds": {"t_low": kp.thresholds.t_low,
                               "t_high": kp.thresholds.t_high},
            }
            for kind, kp in profile.kinds.items()
        },
        "default_animations": {
            "facial": profile.default_animations.facial,
            "body": profile.default_animations.body,
        },
        "mrm_rules": [rule_to_dict(r) for r in profile.mrm_rules],
    }


def profile_from_dict(data: Mapping) -> WorkerProfile:
    """Structural parse of a profile document.

    Raises MigrationRequired on a schema version mismatch and
    ValidationFailed on malformed structure. Semantic problems (duplicate
    rule ids, registry coverage) are left to validate_profile so that
    stored-but-invalid profiles can still be loaded and diagnosed.
    """
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise MigrationRequired(version, SCHEMA_VERSION)
    try:
        kinds: dict[str, KindProfile] = {}
        for kind, entry in data["kinds"].items():
            thresholds = entry["thresholds"]
            kinds[kind] = KindProfile(
                polarity=Polarity.from_wire(entry["polarity"]),
                thresholds=Thresholds(t_low=float(thresholds["t_low"]),
                                      t_high=float(thresholds["t_high"])),
            )
        animations = data.get("default_animations", {})
        return WorkerProfile(
            worker_id=str(data["worker_id"]),
            display_name=str(data.get("display_name", data["worker_id"])),
            kinds=kinds,
            mrm_rules=tuple(rule_from_dict(r) for r in data.get("mrm_rules", [])),
            default_animations=DefaultAnimations(
                facial=str(animations.get("facial", "neutral_face")),
                body=str(animations.get("body", "idle")),
            ),
            hysteresis=float(data.get("hysteresis", 0.0)),
            schema_version=SCHEMA_VERSION,
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ValidationFailed([Diagnostic("bad_profile", str(exc))]) from exc


def load_profile_file(path: str | Path) -> WorkerProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))


def save_profile_file(profile: WorkerProfile, path: str | Path) -> None:
    Path(path).write_text(dump_document(profile_to_dict(profile)), encoding="utf-8")


def default_profile() -> WorkerProfile:
    """The bundled baseline profile.

    Thresholds sit at 0.4/0.7 on the normalized scale for every kind; the
    rule set raises the stress expression while stress threatens or worse,
    and the fatigued posture only once fatigue is suboptimal.
    """
    from .builtins import builtin_profile

    return builtin_profile("default")
