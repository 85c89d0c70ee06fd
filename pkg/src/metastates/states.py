"""Core state vocabulary: kinds, polarity, range levels, statuses, thresholds.

Raw state values are unit-agnostic reals; a worker profile carries the
thresholds in the same unit it expects its samples in. The bundled simulator
and dashboard use a normalized [0, 1] convention but nothing here assumes it.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

from .errors import IncompleteVector, InvalidSample, UnknownKind

if TYPE_CHECKING:  # pragma: no cover
    from .profiles import WorkerProfile


class OrderedWireEnum(enum.IntEnum):
    """Integer-ordered enum whose wire form is the lowercase member name."""

    @property
    def wire(self) -> str:
        return self.name.lower()

    @classmethod
    def from_wire(cls, text: str) -> "OrderedWireEnum":
        try:
            return cls[text.upper()]
        except KeyError:
            raise ValueError(f"{text!r} is not a valid {cls.__name__}") from None


class Polarity(OrderedWireEnum):
    """Whether lower or higher raw values are the healthier direction."""

    LOWER_IS_BETTER = 0
    HIGHER_IS_BETTER = 1


class RangeLevel(OrderedWireEnum):
    """Discrete value range, totally ordered LOW < MID < HIGH."""

    LOW = 0
    MID = 1
    HIGH = 2


class StatusClass(OrderedWireEnum):
    """Per-state performance class, ordered by badness.

    THREAD is the middle class: the state threatens performance without
    being outright suboptimal.
    """

    OPTIMAL = 0
    THREAD = 1
    SUBOPTIMAL = 2


STRESS = "stress"
ATTENTION = "attention"
COGNITIVE_WORKLOAD = "cognitive_workload"
PHYSICAL_FATIGUE = "physical_fatigue"

#: The four core kinds and their default polarity. Attention is inverted:
#: more of it is better, more of everything else is worse.
CORE_POLARITIES: dict[str, Polarity] = {
    STRESS: Polarity.LOWER_IS_BETTER,
    ATTENTION: Polarity.HIGHER_IS_BETTER,
    COGNITIVE_WORKLOAD: Polarity.LOWER_IS_BETTER,
    PHYSICAL_FATIGUE: Polarity.LOWER_IS_BETTER,
}

_KIND_NAME = re.compile(r"^[a-z][a-z0-9_]*$")


class StateRegistry:
    """Registry of known state kinds.

    The four core kinds are always present and cannot be removed; additional
    kinds may be registered with a default polarity. Names are unique,
    non-empty, lowercase snake identifiers.
    """

    def __init__(self) -> None:
        self._kinds: dict[str, Polarity] = dict(CORE_POLARITIES)

    def register(self, name: str, default_polarity: Polarity) -> None:
        if not _KIND_NAME.match(name or ""):
            raise ValueError(f"invalid kind name {name!r}: must be lowercase snake")
        if name in self._kinds:
            raise ValueError(f"kind {name!r} is already registered")
        self._kinds[name] = Polarity(default_polarity)

    def names(self) -> tuple[str, ...]:
        return tuple(self._kinds)

    def default_polarity(self, name: str) -> Polarity:
        try:
            return self._kinds[name]
        except KeyError:
            raise UnknownKind(name) from None

    def __contains__(self, name: object) -> bool:
        return name in self._kinds

    def __iter__(self):
        return iter(self._kinds)

    def __len__(self) -> int:
        return len(self._kinds)


#: Shared default registry holding exactly the four core kinds.
DEFAULT_REGISTRY = StateRegistry()


@dataclass(frozen=True)
class Thresholds:
    """The two cut points splitting a kind's raw value range into LOW/MID/HIGH."""

    t_low: float
    t_high: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t_low) and math.isfinite(self.t_high)):
            raise ValueError("thresholds must be finite")
        if not self.t_low < self.t_high:
            raise ValueError(
                f"t_low ({self.t_low}) must be strictly below t_high ({self.t_high})")


@dataclass(frozen=True)
class StateReading:
    """One kind's value with its derived level and status."""

    value: float
    level: RangeLevel
    status: StatusClass


@dataclass(frozen=True)
class StateSnapshot:
    """All registered kinds' readings at one instant."""

    timestamp_ms: int
    readings: Mapping[str, StateReading]

    def statuses(self) -> dict[str, StatusClass]:
        return {kind: r.status for kind, r in self.readings.items()}

    def values(self) -> dict[str, float]:
        return {kind: r.value for kind, r in self.readings.items()}


def classify_level(value: float, thresholds: Thresholds) -> RangeLevel:
    """Map a raw value onto LOW / MID / HIGH.

    Intervals are half-open: LOW strictly below t_low, MID is
    [t_low, t_high), HIGH is everything at or above t_high.
    """
    if not math.isfinite(value):
        raise InvalidSample(value)
    if value < thresholds.t_low:
        return RangeLevel.LOW
    if value < thresholds.t_high:
        return RangeLevel.MID
    return RangeLevel.HIGH


def classify_level_hysteresis(value: float, thresholds: Thresholds,
                              previous: RangeLevel | None,
                              band: float) -> RangeLevel:
    """Classify with an optional anti-flicker band.

    With ``band`` > 0 and a known previous level, a level change only takes
    effect once the value clears the relevant cut point by more than the
    band. ``band`` = 0 (the default everywhere) reduces to classify_level.
    """
    if band < 0:
        raise ValueError("hysteresis band must be >= 0")
    candidate = classify_level(value, thresholds)
    if previous is None or band == 0 or candidate == previous:
        return candidate
    level = previous
    if candidate > previous:
        if previous == RangeLevel.LOW and value > thresholds.t_low + band:
            level = RangeLevel.MID
        if value > thresholds.t_high + band:
            level = RangeLevel.HIGH
    else:
        if previous == RangeLevel.HIGH and value < thresholds.t_high - band:
            level = RangeLevel.MID
        if value < thresholds.t_low - band:
            level = RangeLevel.LOW
    return level


def level_to_status(level: RangeLevel, polarity: Polarity) -> StatusClass:
    """Map a range level to its status class under the kind's polarity.

    Lower-is-better kinds: LOW is optimal, HIGH is suboptimal. Higher-is-better
    kinds mirror that. MID is always the threatening middle class.
    """
    if level == RangeLevel.MID:
        return StatusClass.THREAD
    if polarity == Polarity.LOWER_IS_BETTER:
        return StatusClass.OPTIMAL if level == RangeLevel.LOW else StatusClass.SUBOPTIMAL
    return StatusClass.OPTIMAL if level == RangeLevel.HIGH else StatusClass.SUBOPTIMAL


def snapshot(values: Mapping[str, float], profile: "WorkerProfile",
             timestamp_ms: int,
             previous_levels: Mapping[str, RangeLevel] | None = None,
             ) -> StateSnapshot:
    """Classify a full per-kind value map against a worker profile.

    ``values`` must cover every kind in the profile; unknown extra keys are
    ignored (the profile is the source of truth for which kinds matter).
    ``previous_levels`` enables the profile's hysteresis band when set.
    """
    missing = tuple(k for k in profile.kinds if k not in values)
    if missing:
        raise IncompleteVector(missing)
    readings: dict[str, StateReading] = {}
    band = profile.hysteresis
    for kind, kp in profile.kinds.items():
        value = values[kind]
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidSample(value, kind=kind, timestamp_ms=timestamp_ms)
        prev = previous_levels.get(kind) if previous_levels else None
        level = classify_level_hysteresis(value, kp.thresholds, prev, band)
        status = level_to_status(level, kp.polarity)
        readings[kind] = StateReading(value=float(value), level=level, status=status)
    return StateSnapshot(timestamp_ms=timestamp_ms, readings=readings)
