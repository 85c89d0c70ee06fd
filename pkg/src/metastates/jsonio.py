"""Stable JSON encoding shared by golden files, recordings, and telemetry."""
from __future__ import annotations

import json
from typing import Any


def dump_line(obj: Any) -> str:
    """Compact single-line JSON with stable (insertion) key order."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def dump_document(obj: Any) -> str:
    """Pretty JSON for human-edited files (profiles, scenarios, reports)."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
