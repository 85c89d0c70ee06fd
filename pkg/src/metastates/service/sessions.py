"""Live session lifecycle and ordered telemetry broadcast.

One tick-loop thread per running session owns the engine; subscribers get
every published line in order through bounded buffers. A subscriber that
stops draining is disconnected with an error envelope instead of ever
stalling the tick loop. Every published line is also appended to the
session's recording file, so a replay is byte-identical to what live
subscribers saw.
"""
from __future__ import annotations

import collections
import json
import threading
import time
import uuid
from typing import Iterator

from ..errors import InvalidState, NotFound
from ..jsonio import dump_line
from ..report import build_run_report
from ..simulation import (DEFAULT_PERFORMANCE_MODEL, PerformanceModel,
                          SimulationEngine)
from .store import DataStore

DEFAULT_SUBSCRIBER_BUFFER = 512
DEFAULT_ACCELERATED_SPEED = 10.0


def _event_line(event: str, tick: int) -> str:
    return dump_line({"type": "session_event", "event": event, "tick": tick})


def _error_line(code: str, message: str) -> str:
    return dump_line({"type": "error", "code": code, "message": message})


class _Subscriber:
    """Bounded ordered queue bridging the tick loop to one consumer."""

    def __init__(self, replay: list[str], max_buffer: int):
        self._replay = collections.deque(replay)
        self._pending: collections.deque[str] = collections.deque()
        self._max_buffer = max_buffer
        self._cond = threading.Condition()
        self._ended = False
        self._error: str | None = None
        self._error_sent = False

    def push(self, line: str) -> None:
        with self._cond:
            if self._ended or self._error is not None:
                return
            if len(self._pending) >= self._max_buffer:
                self._pending.clear()
                self._error = _error_line(
                    "backpressure", "subscriber too slow; disconnected")
            else:
                self._pending.append(line)
            self._cond.notify()

    def end(self) -> None:
        with self._cond:
            self._ended = True
            self._cond.notify()

    def __iter__(self) -> Iterator[str]:
        return self

    def __next__(self) -> str:
        if self._replay:
            return self._replay.popleft()
        with self._cond:
            while True:
                if self._pending:
                    return self._pending.popleft()
                if self._error is not None:
                    if self._error_sent:
                        raise StopIteration
                    self._error_sent = True
                    return self._error
                if self._ended:
                    raise StopIteration
                self._cond.wait()


class TelemetryHub:
    """Per-session fan-out point; the recording file is written here too."""

    def __init__(self, recording_path, max_buffer: int = DEFAULT_SUBSCRIBER_BUFFER):
        self._lock = threading.Lock()
        self._lines: list[tuple[int, str]] = []
        self._subscribers: list[_Subscriber] = []
        self._max_buffer = max_buffer
        self._file = open(recording_path, "a", encoding="utf-8")
        self._closed = False

    def publish(self, tick: int, line: str) -> None:
        with self._lock:
            if self._closed:
                return
            self._lines.append((tick, line))
            self._file.write(line + "\n")
            self._file.flush()
            for sub in self._subscribers:
                sub.push(line)

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._closed = True
            self._file.close()
            for sub in self._subscribers:
                sub.end()
            self._subscribers.clear()

    def subscribe(self, from_tick: int | None) -> _Subscriber:
        """Attach a subscriber atomically: replayed recorded lines and the
        live feed cannot miss or duplicate a line at the splice point."""
        with self._lock:
            if from_tick is None:
                replay: list[str] = []
            else:
                replay = [line for tick, line in self._lines if tick >= from_tick]
            sub = _Subscriber(replay, self._max_buffer)
            if self._closed:
                sub.end()
            else:
                self._subscribers.append(sub)
            return sub


class LiveSession:
    """State machine created -> running <-> paused -> finished plus the
    tick-loop thread that owns the engine while running."""

    def __init__(self, session_id: str, profile_id: str, scenario_id: str,
                 mode: str, speed: float, engine: SimulationEngine,
                 hub: TelemetryHub):
        self.session_id = session_id
        self.profile_id = profile_id
        self.scenario_id = scenario_id
        self.mode = mode
        self.speed = speed
        self.engine = engine
        self.hub = hub
        self._state = "created"
        self._lock = threading.RLock()
        self._running = threading.Event()
        self._stop = False
        self._thread: threading.Thread | None = None

    @property
    def state(self) -> str:
        with self._lock:
            return self._state

    def info(self) -> dict:
        with self._lock:
            return {
                "session_id": self.session_id,
                "profile_id": self.profile_id,
                "scenario_id": self.scenario_id,
                "mode": self.mode,
                "state": self._state,
                "next_tick": self.engine.next_tick,
                "total_ticks": self.engine.total_ticks,
            }

    def start(self) -> None:
        with self._lock:
            if self._state not in ("created", "paused"):
                raise InvalidState(
                    f"cannot start a session in state {self._state!r}",
                    state=self._state)
            starting = self._state == "created"
            self._state = "running"
            self.hub.publish(self.engine.next_tick,
                             _event_line("running", self.engine.next_tick))
            self._running.set()
            if starting:
                self._thread = threading.Thread(
                    target=self._loop, name=f"session-{self.session_id}",
                    daemon=True)
                self._thread.start()

    def pause(self) -> None:
        with self._lock:
            if self._state != "running":
                raise InvalidState(
                    f"cannot pause a session in state {self._state!r}",
                    state=self._state)
            self._state = "paused"
            self._running.clear()
            self.hub.publish(self.engine.next_tick,
                             _event_line("paused", self.engine.next_tick))

    def finish(self) -> None:
        with self._lock:
            if self._state == "finished":
                return
            if self._state not in ("running", "paused"):
                raise InvalidState(
                    f"cannot finish a session in state {self._state!r}",
                    state=self._state)
            self._state = "finished"
            self._stop = True
            self._running.set()
            self.hub.publish(self.engine.next_tick,
                             _event_line("finished", self.engine.next_tick))
            self.hub.close()

    def apply_override(self, kind: str, value: float) -> int:
        with self._lock:
            if self._state != "running":
                raise InvalidState(
                    f"overrides need a running session, not {self._state!r}",
                    state=self._state)
            return self.engine.set_override(kind, value)

    def clear_override(self, kind: str) -> int:
        with self._lock:
            if self._state != "running":
                raise InvalidState(
                    f"overrides need a running session, not {self._state!r}",
                    state=self._state)
            return self.engine.clear_override(kind)

    def join(self, timeout: float | None = None) -> None:
        thread = self._thread
        if thread is not None:
            thread.join(timeout)

    def _loop(self) -> None:
        interval = 0.0
        if self.speed > 0:
            interval = self.engine.scenario.tick_ms / 1000.0 / self.speed
        while True:
            self._running.wait()
            if self._stop:
                return
            if self.engine.done:
                self.finish()
                return
            frame = self.engine.tick()
            self.hub.publish(frame.tick, frame.to_json_line())
            if interval > 0:
                time.sleep(interval)


class SessionManager:
    """Owns the data store plus every in-memory session."""

    def __init__(self, store: DataStore,
                 subscriber_buffer: int = DEFAULT_SUBSCRIBER_BUFFER,
                 seed_builtins: bool = True):
        self.store = store
        self._subscriber_buffer = subscriber_buffer
        self._sessions: dict[str, LiveSession] = {}
        self._lock = threading.Lock()
        if seed_builtins:
            store.seed_builtins()

    def create_session(self, profile_id: str, scenario_id: str,
                       mode: str = "realtime", speed: float | None = None,
                       performance_model: PerformanceModel | None = None,
                       ) -> dict:
        profile = self.store.load_profile(profile_id)
        scenario = self.store.load_scenario(scenario_id)
        if mode not in ("realtime", "accelerated"):
            raise ValueError(f"unsupported session mode {mode!r}")
        if speed is None:
            speed = 1.0 if mode == "realtime" else DEFAULT_ACCELERATED_SPEED
        if speed <= 0:
            raise ValueError("speed must be positive")
        perf = performance_model or DEFAULT_PERFORMANCE_MODEL
        engine = SimulationEngine(scenario, profile, perf)
        session_id = f"s-{uuid.uuid4().hex[:12]}"
        hub = TelemetryHub(self.store.recording_path(session_id),
                           max_buffer=self._subscriber_buffer)
        session = LiveSession(session_id, profile_id, scenario_id, mode,
                              speed, engine, hub)
        with self._lock:
            self._sessions[session_id] = session
        return session.info()

    def _get(self, session_id: str) -> LiveSession:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise NotFound("session", session_id)
        return session

    def session_info(self, session_id: str) -> dict:
        return self._get(session_id).info()

    def list_sessions(self) -> list[dict]:
        with self._lock:
            sessions = list(self._sessions.values())
        return [s.info() for s in sessions]

    def start(self, session_id: str) -> dict:
        session = self._get(session_id)
        session.start()
        return session.info()

    def pause(self, session_id: str) -> dict:
        session = self._get(session_id)
        session.pause()
        return session.info()

    def finish(self, session_id: str) -> dict:
        session = self._get(session_id)
        session.finish()
        return session.info()

    def apply_override(self, session_id: str, kind: str, value: float) -> dict:
        session = self._get(session_id)
        tick = session.apply_override(kind, value)
        return {"session_id": session_id, "kind": kind, "value": value,
                "effective_tick": tick}

    def clear_override(self, session_id: str, kind: str) -> dict:
        session = self._get(session_id)
        tick = session.clear_override(kind)
        return {"session_id": session_id, "kind": kind, "cleared": True,
                "effective_tick": tick}

    def subscribe(self, session_id: str,
                  from_tick: int | None = None) -> Iterator[str]:
        return self._get(session_id).hub.subscribe(from_tick)

    def get_report(self, session_id: str) -> dict:
        session = self._get(session_id)
        if session.state != "finished":
            raise InvalidState("report is only available for finished sessions",
                               state=session.state)
        lines, _complete = self.store.read_recording(session_id)
        frames = [obj for obj in (json.loads(line) for line in lines)
                  if obj.get("type") == "frame"]
        return build_run_report(frames, session.engine.scenario.tick_ms)

    def wait_until_finished(self, session_id: str,
                            timeout: float = 30.0) -> dict:
        """Block until the session leaves the running/paused states."""
        session = self._get(session_id)
        deadline = time.monotonic() + timeout
        while session.state != "finished":
            if time.monotonic() > deadline:
                raise TimeoutError(f"session {session_id} did not finish")
            time.sleep(0.005)
        session.join(timeout=5.0)
        return session.info()

    def shutdown(self) -> None:
        with self._lock:
            sessions = list(self._sessions.values())
        for session in sessions:
            if session.state in ("running", "paused"):
                session.finish()
            session.join(timeout=5.0)
