"""Percentile calibration of per-worker thresholds from baseline recordings.

Every worker's raw value range is their own, so thresholds are fitted as
empirical quantiles of a calm-baseline recording rather than copied from
any fixed scale. As more data arrives, profiles are refined by convex
merging of old and new fits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateDistribution, InsufficientData, InvalidSample
from .ingest import RawSample
from .states import StateRegistry, Thresholds

DEFAULT_P_LOW = 0.60
DEFAULT_P_HIGH = 0.85
DEFAULT_MIN_SAMPLES = 30


@dataclass(frozen=True)
class CalibrationConfig:
    """Quantile fractions and sample floor; per-kind (p_low, p_high) overrides."""

    p_low: float = DEFAULT_P_LOW
    p_high: float = DEFAULT_P_HIGH
    min_samples: int = DEFAULT_MIN_SAMPLES
    overrides: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for lo, hi in [(self.p_low, self.p_high), *self.overrides.values()]:
            if not (0.0 < lo < 1.0 and 0.0 < hi < 1.0):
                raise ValueError("quantile fractions must lie in (0, 1)")
            if not lo < hi:
                raise ValueError("p_low must be strictly below p_high")
        if self.min_samples < 1:
            raise ValueError("min_samples must be positive")

    def quantile_pair(self, kind: str) -> tuple[float, float]:
        return self.overrides.get(kind, (self.p_low, self.p_high))


@dataclass(frozen=True)
class BaselineDataset:
    """Per-kind (timestamp_ms, value) samples, time-ordered within a kind."""

    samples: Mapping[str, tuple[tuple[int, float], ...]]

    def __post_init__(self) -> None:
        for kind, rows in self.samples.items():
            last = None
            for t, value in rows:
                if not math.isfinite(value):
                    raise InvalidSample(value, kind=kind, timestamp_ms=t)
                if last is not None and t < last:
                    raise ValueError(
                        f"timestamps for kind {kind!r} must be non-decreasing")
                last = t

    @classmethod
    def from_samples(cls, samples: Iterable[RawSample]) -> "BaselineDataset":
        grouped: dict[str, list[tuple[int, float]]] = {}
        for s in samples:
            grouped.setdefault(s.kind, []).append((s.timestamp_ms, s.value))
        for rows in grouped.values():
            rows.sort(key=lambda r: r[0])
        return cls(samples={k: tuple(v) for k, v in grouped.items()})

    def kinds(self) -> tuple[str, ...]:
        return tuple(self.samples)

    def values(self, kind: str) -> list[float]:
        return [v for _, v in self.samples.get(kind, ())]


def interpolated_quantile(values: Sequence[float], p: float) -> float:
    """Empirical quantile with linear interpolation between order statistics.

    The quantile position is p * (n - 1) over the ascending sort; fractional
    positions interpolate linearly between the two surrounding values.
    """
    if not values:
        raise ValueError("cannot take a quantile of an empty sequence")
    if not 0.0 <= p <= 1.0:
        raise ValueError("quantile fraction must lie in [0, 1]")
    ordered = sorted(values)
    position = p * (len(ordered) - 1)
    lower = math.floor(position)
    upper = min(lower + 1, len(ordered) - 1)
    fraction = position - lower
    return ordered[lower] + (ordered[upper] - ordered[lower]) * fraction


def calibrate(dataset: BaselineDataset, config: CalibrationConfig,
              registry: StateRegistry | None = None) -> dict[str, Thresholds]:
    """Fit per-kind thresholds as the configured quantiles of the baseline.

    Fits every kind present in the dataset; with a registry, every
    registered kind must be covered. Raises InsufficientData when a kind
    has fewer than min_samples samples and DegenerateDistribution when the
    two quantiles coincide (constant or near-constant data).
    """
    kinds = list(dataset.kinds())
    if registry is not None:
        for kind in registry:
            if kind not in dataset.samples:
                raise InsufficientData(kind, 0, config.min_samples)
    result: dict[str, Thresholds] = {}
    for kind in kinds:
        values = dataset.values(kind)
        if len(values) < config.min_samples:
            raise InsufficientData(kind, len(values), config.min_samples)
        p_low, p_high = config.quantile_pair(kind)
        t_low = interpolated_quantile(values, p_low)
        t_high = interpolated_quantile(values, p_high)
        if not t_low < t_high:
            raise DegenerateDistribution(kind)
        result[kind] = Thresholds(t_low=t_low, t_high=t_high)
    return result


def merge_calibration(old: Thresholds, new: Thresholds,
                      weight: float) -> Thresholds:
    """Convex blend of two threshold fits; weight 1 keeps only the new fit."""
    if not 0.0 <= weight <= 1.0:
        raise ValueError("merge weight must lie in [0, 1]")
    t_low = (1.0 - weight) * old.t_low + weight * new.t_low
    t_high = (1.0 - weight) * old.t_high + weight * new.t_high
    if not t_low < t_high:
        raise DegenerateDistribution()
    return Thresholds(t_low=t_low, t_high=t_high)
