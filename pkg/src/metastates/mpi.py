"""Traffic-light performance index aggregated over all per-state statuses."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import EmptyStatuses
from .states import OrderedWireEnum, StateSnapshot, StatusClass


class MpiColor(OrderedWireEnum):
    """Overall fitness color, ordered by severity GREEN < AMBER < RED."""

    GREEN = 0
    AMBER = 1
    RED = 2


def aggregate_mpi(statuses: Mapping[str, StatusClass]) -> MpiColor:
    """Roll per-kind statuses up into one color.

    RED if any status is SUBOPTIMAL, else AMBER if any is THREAD, else GREEN.
    Suboptimal dominates when both are present.
    """
    if not statuses:
        raise EmptyStatuses()
    classes = statuses.values()
    if any(s == StatusClass.SUBOPTIMAL for s in classes):
        return MpiColor.RED
    if any(s == StatusClass.THREAD for s in classes):
        return MpiColor.AMBER
    return MpiColor.GREEN


@dataclass(frozen=True)
class MpiSnapshot:
    """The aggregated color plus its per-kind justification.

    The color is displayed on two redundant channels (a ring at the figure's
    base and a sphere above it) so one stays visible when scene geometry
    hides the other; both always carry the same color.
    """

    timestamp_ms: int
    color: MpiColor
    statuses: Mapping[str, StatusClass]

    @property
    def aura(self) -> MpiColor:
        return self.color

    @property
    def sphere(self) -> MpiColor:
        return self.color

    def to_dict(self) -> dict:
        return {
            "color": self.color.wire,
            "aura": self.aura.wire,
            "sphere": self.sphere.wire,
            "statuses": {k: s.wire for k, s in self.statuses.items()},
        }


def mpi_snapshot(state: StateSnapshot) -> MpiSnapshot:
    """Aggregate a state snapshot into its index snapshot."""
    statuses = state.statuses()
    return MpiSnapshot(
        timestamp_ms=state.timestamp_ms,
        color=aggregate_mpi(statuses),
        statuses=statuses,
    )
