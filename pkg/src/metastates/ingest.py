"""Sample stream loading, smoothing, and sample-and-hold vector assembly."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import InvalidSample, ParseError, UnknownKind
from .states import DEFAULT_REGISTRY, StateRegistry

CSV_HEADER = "timestamp_ms,kind,value"


@dataclass(frozen=True)
class RawSample:
    timestamp_ms: int
    kind: str
    value: float


class StreamSmoother:
    """Per-kind exponentially weighted moving average.

    alpha = 1.0 (the default) is a pass-through; the first sample of a kind
    always passes through unchanged and seeds the average.
    """

    def __init__(self, alpha: float = 1.0):
        if not 0.0 < alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        self.alpha = alpha
        self._last: dict[str, float] = {}

    def update(self, kind: str, value: float) -> float:
        if not math.isfinite(value):
            raise InvalidSample(value, kind=kind)
        last = self._last.get(kind)
        if last is None:
            out = float(value)
        else:
            out = self.alpha * value + (1.0 - self.alpha) * last
        self._last[kind] = out
        return out

    def last(self, kind: str) -> float | None:
        return self._last.get(kind)

    def reset(self) -> None:
        self._last.clear()


class SampleHold:
    """Holds the latest value per kind until every registered kind is warm.

    Real streams are asynchronous, so between updates each kind keeps its
    last known value. latest() stays None until full coverage.
    """

    def __init__(self, registry: StateRegistry = DEFAULT_REGISTRY):
        self._registry = registry
        self._held: dict[str, float] = {}

    def update(self, kind: str, value: float) -> None:
        if kind not in self._registry:
            raise UnknownKind(kind)
        if not math.isfinite(value):
            raise InvalidSample(value, kind=kind)
        self._held[kind] = float(value)

    def missing_kinds(self) -> tuple[str, ...]:
        return tuple(k for k in self._registry if k not in self._held)

    def latest(self) -> dict[str, float] | None:
        if self.missing_kinds():
            return None
        return {k: self._held[k] for k in self._registry}


def _parse_csv_line(line: str, number: int, path: str) -> RawSample:
    parts = line.split(",")
    if len(parts) != 3:
        raise ParseError(f"expected 3 comma-separated fields, got {len(parts)}",
                         line=number, path=path)
    raw_ts, kind, raw_value = (p.strip() for p in parts)
    try:
        timestamp_ms = int(raw_ts)
    except ValueError:
        raise ParseError(f"bad timestamp {raw_ts!r}", line=number, path=path) from None
    try:
        value = float(raw_value)
    except ValueError:
        raise ParseError(f"bad value {raw_value!r}", line=number, path=path) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {raw_value!r}", line=number, path=path)
    return RawSample(timestamp_ms=timestamp_ms, kind=kind, value=value)


def _parse_jsonl_line(line: str, number: int, path: str) -> RawSample:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc.msg}", line=number, path=path) from None
    if not isinstance(obj, dict) or not {"t", "kind", "value"} <= set(obj):
        raise ParseError("expected object with t, kind, value keys",
                         line=number, path=path)
    try:
        timestamp_ms = int(obj["t"])
        value = float(obj["value"])
    except (TypeError, ValueError):
        raise ParseError("t must be an integer and value a number",
                         line=number, path=path) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {obj['value']!r}", line=number, path=path)
    return RawSample(timestamp_ms=timestamp_ms, kind=str(obj["kind"]), value=value)


def load_stream(path: str | Path, fmt: str | None = None,
                registry: StateRegistry = DEFAULT_REGISTRY) -> list[RawSample]:
    """Parse a CSV or JSONL sample file into time-sorted samples.

    Format is inferred from the suffix unless given. Sorting is stable:
    equal timestamps keep file order. Malformed rows raise ParseError with
    their 1-based line number; unknown kinds raise UnknownKind likewise.
    A leading CSV row equal to the canonical header is skipped.
    """
    path = Path(path)
    if fmt is None:
        fmt = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"unsupported stream format {fmt!r}")
    samples: list[RawSample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for number, raw_line in enumerate(fh, start=1):
            line = raw_line.strip()
            if not line:
                continue
            if fmt == "csv" and number == 1 and line == CSV_HEADER:
                continue
            if fmt == "csv":
                sample = _parse_csv_line(line, number, str(path))
            else:
                sample = _parse_jsonl_line(line, number, str(path))
            if sample.kind not in registry:
                raise UnknownKind(sample.kind, line=number)
            samples.append(sample)
    samples.sort(key=lambda s: s.timestamp_ms)
    return samples


def write_stream_csv(samples: Iterable[RawSample], path: str | Path) -> None:
    """Inverse of load_stream for the CSV format (no header)."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(f"{s.timestamp_ms},{s.kind},{s.value!r}\n")
