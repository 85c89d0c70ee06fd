"""File-backed persistence: JSON documents in a data directory, no database.

Writes are atomic (temp file + rename) and serialized through one lock, so
concurrent savers can never expose a torn document.
"""
from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path

from ..builtins import BUILTIN_PROFILES, BUILTIN_SCENARIOS, builtin_data_text
from ..errors import NotFound
from ..jsonio import dump_document
from ..profiles import WorkerProfile, profile_from_dict, profile_to_dict
from ..scenario import Scenario, scenario_from_dict, scenario_to_dict


class DataStore:
    def __init__(self, root: str | Path, default_tick_ms: int = 100):
        self.root = Path(root)
        self.default_tick_ms = default_tick_ms
        self._lock = threading.RLock()
        for sub in ("profiles", "scenarios", "recordings"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    def _atomic_write(self, path: Path, text: str) -> None:
        with self._lock:
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(text)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise

    def seed_builtins(self) -> None:
        """Write the bundled profile and scenarios unless already present."""
        for name in BUILTIN_PROFILES:
            path = self.root / "profiles" / f"{name}.json"
            if not path.exists():
                self._atomic_write(path, builtin_data_text(f"profile_{name}.json"))
        for name in BUILTIN_SCENARIOS:
            path = self.root / "scenarios" / f"{name}.json"
            if not path.exists():
                self._atomic_write(path, builtin_data_text(f"scenario_{name}.json"))

    # profiles

    def save_profile(self, profile: WorkerProfile) -> Path:
        path = self.root / "profiles" / f"{profile.worker_id}.json"
        self._atomic_write(path, dump_document(profile_to_dict(profile)))
        return path

    def load_profile(self, worker_id: str) -> WorkerProfile:
        path = self.root / "profiles" / f"{worker_id}.json"
        if not path.exists():
            raise NotFound("profile", worker_id)
        with self._lock:
            data = json.loads(path.read_text(encoding="utf-8"))
        return profile_from_dict(data)

    def list_profiles(self) -> list[dict]:
        entries = []
        for path in sorted((self.root / "profiles").glob("*.json")):
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
                entries.append({"worker_id": data.get("worker_id", path.stem),
                                "display_name": data.get("display_name", path.stem)})
            except (OSError, json.JSONDecodeError):
                continue
        return entries

    # scenarios

    def save_scenario(self, scenario: Scenario) -> Path:
        path = self.root / "scenarios" / f"{scenario.name}.json"
        self._atomic_write(path, dump_document(scenario_to_dict(scenario)))
        return path

    def load_scenario(self, name: str) -> Scenario:
        path = self.root / "scenarios" / f"{name}.json"
        if not path.exists():
            raise NotFound("scenario", name)
        with self._lock:
            data = json.loads(path.read_text(encoding="utf-8"))
        return scenario_from_dict(data, default_tick_ms=self.default_tick_ms)

    def list_scenarios(self) -> list[dict]:
        entries = []
        for path in sorted((self.root / "scenarios").glob("*.json")):
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
                entries.append({"name": data.get("name", path.stem),
                                "duration_ms": data.get("duration_ms"),
                                "tick_ms": data.get("tick_ms", self.default_tick_ms)})
            except (OSError, json.JSONDecodeError):
                continue
        return entries

    # recordings

    def recording_path(self, session_id: str) -> Path:
        return self.root / "recordings" / f"{session_id}.jsonl"

    def read_recording(self, session_id: str) -> tuple[list[str], bool]:
        """All recorded lines plus whether the recording was closed properly.

        A complete recording ends with a session_event line whose event is
        ``finished``; anything else flags the recording as truncated.
        """
        path = self.recording_path(session_id)
        if not path.exists():
            raise NotFound("recording", session_id)
        lines = path.read_text(encoding="utf-8").splitlines()
        complete = False
        if lines:
            try:
                last = json.loads(lines[-1])
                complete = (last.get("type") == "session_event"
                            and last.get("event") == "finished")
            except json.JSONDecodeError:
                complete = False
        return lines, complete
