"""Bundled baseline profile, demo scenarios, and default performance model."""
from __future__ import annotations

import json
from importlib import resources

from .errors import NotFound
from .profiles import WorkerProfile, profile_from_dict
from .scenario import Scenario, scenario_from_dict
from .simulation import PerformanceModel, performance_model_from_dict

BUILTIN_PROFILES = ("default",)
BUILTIN_SCENARIOS = ("fig9", "flat_optimal")


def _load_data(filename: str) -> dict:
    path = resources.files("metastates").joinpath("data").joinpath(filename)
    return json.loads(path.read_text(encoding="utf-8"))


def builtin_profile(name: str = "default") -> WorkerProfile:
    if name not in BUILTIN_PROFILES:
        raise NotFound("builtin profile", name)
    return profile_from_dict(_load_data(f"profile_{name}.json"))


def builtin_scenario(name: str) -> Scenario:
    if name not in BUILTIN_SCENARIOS:
        raise NotFound("builtin scenario", name)
    return scenario_from_dict(_load_data(f"scenario_{name}.json"))


def builtin_performance_model() -> PerformanceModel:
    return performance_model_from_dict(_load_data("perf_default.json"))


def builtin_data_text(filename: str) -> str:
    """Raw text of a bundled data file (used for seeding data stores)."""
    path = resources.files("metastates").joinpath("data").joinpath(filename)
    return path.read_text(encoding="utf-8")
