"""Reaction rule evaluation: map state statuses to animation events per channel."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import Diagnostic
from .states import OrderedWireEnum, StateRegistry, StatusClass, DEFAULT_REGISTRY

#: source_rule_id carried by synthetic fallback events.
DEFAULT_RULE_ID = "default"


class ReactionChannel(OrderedWireEnum):
    FACIAL = 0
    BODY = 1


@dataclass(frozen=True)
class ReactionRule:
    """One trigger: when ``kind`` is in any of ``trigger_statuses``, play
    ``animation_id`` on ``channel``. Higher priority wins its channel; ties
    go to the lexicographically smallest rule_id."""

    rule_id: str
    kind: str
    trigger_statuses: frozenset[StatusClass]
    channel: ReactionChannel
    animation_id: str
    priority: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "trigger_statuses",
                           frozenset(self.trigger_statuses))


@dataclass(frozen=True)
class ReactionEvent:
    """An animation assignment on one channel for one tick.

    ``cause`` is the (kind, status) pair that satisfied the winning rule,
    or None for a synthetic fallback event.
    """

    timestamp_ms: int
    channel: ReactionChannel
    animation_id: str
    source_rule_id: str
    cause: tuple[str, StatusClass] | None = None

    def to_dict(self) -> dict:
        cause = None
        if self.cause is not None:
            cause = {"kind": self.cause[0], "status": self.cause[1].wire}
        return {
            "animation_id": self.animation_id,
            "source_rule_id": self.source_rule_id,
            "cause": cause,
        }


@dataclass(frozen=True)
class DefaultAnimations:
    """Fallback animation per channel for ticks where no rule fires."""

    facial: str = "neutral_face"
    body: str = "idle"

    def animation_for(self, channel: ReactionChannel) -> str:
        return self.facial if channel == ReactionChannel.FACIAL else self.body


def evaluate_mrm(statuses: Mapping[str, StatusClass],
                 rules: Sequence[ReactionRule],
                 defaults: DefaultAnimations,
                 timestamp_ms: int) -> dict[ReactionChannel, ReactionEvent]:
    """Evaluate the reaction rules against a status map.

    A rule fires iff the status of its kind is in its trigger set. Per
    channel, the firing rule with the highest priority wins (ties broken by
    smallest rule_id); channels with no firing rule get the fallback
    animation as a synthetic event. The result always holds exactly one
    event per channel.
    """
    winners: dict[ReactionChannel, ReactionRule] = {}
    for rule in rules:
        status = statuses.get(rule.kind)
        if status is None or status not in rule.trigger_statuses:
            continue
        current = winners.get(rule.channel)
        if (current is None
                or rule.priority > current.priority
                or (rule.priority == current.priority
                    and rule.rule_id < current.rule_id)):
            winners[rule.channel] = rule
    events: dict[ReactionChannel, ReactionEvent] = {}
    for channel in ReactionChannel:
        rule = winners.get(channel)
        if rule is not None:
            events[channel] = ReactionEvent(
                timestamp_ms=timestamp_ms,
                channel=channel,
                animation_id=rule.animation_id,
                source_rule_id=rule.rule_id,
                cause=(rule.kind, statuses[rule.kind]),
            )
        else:
            events[channel] = ReactionEvent(
                timestamp_ms=timestamp_ms,
                channel=channel,
                animation_id=defaults.animation_for(channel),
                source_rule_id=DEFAULT_RULE_ID,
                cause=None,
            )
    return events


def validate_rules(rules: Iterable[ReactionRule],
                   registry: StateRegistry = DEFAULT_REGISTRY,
                   ) -> list[Diagnostic]:
    """Check a rule set for authoring mistakes. Empty list means valid.

    Reported problems: duplicate rule ids, kinds missing from the registry,
    empty trigger sets, and shadowed rules (same channel and kind, trigger
    set covered by a strictly higher-priority rule, so they can never win).
    """
    rules = list(rules)
    diagnostics: list[Diagnostic] = []
    seen: set[str] = set()
    for rule in rules:
        if rule.rule_id in seen:
            diagnostics.append(Diagnostic(
                "duplicate_rule_id", f"rule_id {rule.rule_id!r} appears more than once",
                subject=rule.rule_id))
        seen.add(rule.rule_id)
        if rule.kind not in registry:
            diagnostics.append(Diagnostic(
                "unknown_kind", f"rule {rule.rule_id!r} references unregistered kind {rule.kind!r}",
                subject=rule.rule_id))
        if not rule.trigger_statuses:
            diagnostics.append(Diagnostic(
                "empty_trigger_set", f"rule {rule.rule_id!r} has no trigger statuses",
                subject=rule.rule_id))
        if not rule.animation_id:
            diagnostics.append(Diagnostic(
                "empty_animation_id", f"rule {rule.rule_id!r} has an empty animation_id",
                subject=rule.rule_id))
    for rule in rules:
        for other in rules:
            if (other is not rule
                    and other.channel == rule.channel
                    and other.kind == rule.kind
                    and rule.trigger_statuses
                    and rule.trigger_statuses <= other.trigger_statuses
                    and rule.priority < other.priority):
                diagnostics.append(Diagnostic(
                    "shadowed_rule",
                    f"rule {rule.rule_id!r} can never win: {other.rule_id!r} "
                    "covers its triggers at higher priority",
                    subject=rule.rule_id))
                break
    return diagnostics


def rule_to_dict(rule: ReactionRule) -> dict:
    return {
        "rule_id": rule.rule_id,
        "kind": rule.kind,
        "trigger_statuses": sorted(s.wire for s in rule.trigger_statuses),
        "channel": rule.channel.wire,
        "animation_id": rule.animation_id,
        "priority": rule.priority,
    }


def rule_from_dict(data: Mapping) -> ReactionRule:
    return ReactionRule(
        rule_id=str(data["rule_id"]),
        kind=str(data["kind"]),
        trigger_statuses=frozenset(
            StatusClass.from_wire(s) for s in data["trigger_statuses"]),
        channel=ReactionChannel.from_wire(data["channel"]),
        animation_id=str(data["animation_id"]),
        priority=int(data.get("priority", 0)),
    )
