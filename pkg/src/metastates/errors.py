"""Exception types and validation diagnostics shared across the engine."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding. ``code`` is a stable machine-readable slug."""

    code: str
    message: str
    subject: str | None = None

    def __str__(self) -> str:
        if self.subject is not None:
            return f"{self.code}({self.subject}): {self.message}"
        return f"{self.code}: {self.message}"


class MetaStatesError(Exception):
    """Base class for all engine errors."""


class InvalidSample(MetaStatesError):
    """A sample value is not a finite number."""

    def __init__(self, value: object, kind: str | None = None,
                 timestamp_ms: int | None = None):
        self.value = value
        self.kind = kind
        self.timestamp_ms = timestamp_ms
        where = ""
        if kind is not None:
            where += f" kind={kind}"
        if timestamp_ms is not None:
            where += f" t={timestamp_ms}ms"
        super().__init__(f"non-finite sample value {value!r}{where}")


class IncompleteVector(MetaStatesError):
    """A per-kind value map does not cover every required kind."""

    def __init__(self, missing: tuple[str, ...]):
        self.missing = tuple(missing)
        super().__init__(f"missing kinds: {', '.join(self.missing)}")


class EmptyStatuses(MetaStatesError):
    """Index aggregation was asked to aggregate an empty status map."""

    def __init__(self) -> None:
        super().__init__("cannot aggregate an empty status map")


class UnknownKind(MetaStatesError):
    """A state kind name is not present in the registry."""

    def __init__(self, kind: str, line: int | None = None):
        self.kind = kind
        self.line = line
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown state kind {kind!r}{at}")


class ParseError(MetaStatesError):
    """A stream or document could not be parsed."""

    def __init__(self, message: str, line: int | None = None,
                 path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f" in {path}"
        if line is not None:
            where += f" at line {line}"
        super().__init__(f"{message}{where}")


class InsufficientData(MetaStatesError):
    """Calibration was asked to fit a kind with too few samples."""

    def __init__(self, kind: str, have: int, need: int):
        self.kind = kind
        self.have = have
        self.need = need
        super().__init__(f"kind {kind!r} has {have} samples, needs {need}")


class DegenerateDistribution(MetaStatesError):
    """Calibration produced thresholds that do not separate (t_low >= t_high)."""

    def __init__(self, kind: str | None = None):
        self.kind = kind
        what = f"kind {kind!r}" if kind is not None else "input"
        super().__init__(f"{what} yields equal or inverted thresholds")


class NotFound(MetaStatesError):
    """A referenced stored resource does not exist."""

    def __init__(self, resource: str, ref: str):
        self.resource = resource
        self.ref = ref
        super().__init__(f"{resource} {ref!r} not found")


class InvalidState(MetaStatesError):
    """A session operation was attempted in a state that forbids it."""

    def __init__(self, message: str, state: str | None = None):
        self.state = state
        super().__init__(message)


class MigrationRequired(MetaStatesError):
    """A stored document carries an unsupported schema version."""

    def __init__(self, found: object, supported: int):
        self.found = found
        self.supported = supported
        super().__init__(
            f"schema_version {found!r} is not supported (expected {supported})")


class ValidationFailed(MetaStatesError):
    """A document or configuration failed validation; carries diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic] | tuple[Diagnostic, ...]):
        self.diagnostics = tuple(diagnostics)
        summary = "; ".join(str(d) for d in self.diagnostics) or "validation failed"
        super().__init__(summary)
