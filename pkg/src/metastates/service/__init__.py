"""Session service: persistence, live session lifecycle, telemetry broadcast."""
from __future__ import annotations

from .sessions import SessionManager
from .store import DataStore

__all__ = ["DataStore", "SessionManager"]
