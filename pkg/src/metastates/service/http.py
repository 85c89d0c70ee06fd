"""HTTP front-end: JSON request/response API plus NDJSON telemetry streams.

Built on the standard library server; each request runs in its own thread
and stream responses are close-delimited NDJSON, one envelope per line.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..errors import (InvalidSample, InvalidState, MetaStatesError,
                      MigrationRequired, NotFound, ParseError, UnknownKind,
                      ValidationFailed)
from ..jsonio import dump_line
from ..profiles import profile_from_dict, profile_to_dict
from ..scenario import scenario_from_dict, scenario_to_dict
from ..simulation import performance_model_from_dict
from .sessions import SessionManager

_STATUS_FOR = [
    (NotFound, 404, "not_found"),
    (InvalidState, 409, "invalid_state"),
    (MigrationRequired, 409, "migration_required"),
    (ValidationFailed, 400, "validation_failed"),
    (InvalidSample, 400, "invalid_sample"),
    (UnknownKind, 400, "unknown_kind"),
    (ParseError, 400, "parse_error"),
]


def _error_body(exc: Exception) -> tuple[int, dict]:
    for exc_type, status, code in _STATUS_FOR:
        if isinstance(exc, exc_type):
            body = {"error": {"code": code, "message": str(exc)}}
            if isinstance(exc, ValidationFailed):
                body["error"]["diagnostics"] = [
                    {"code": d.code, "message": d.message, "subject": d.subject}
                    for d in exc.diagnostics]
            return status, body
    if isinstance(exc, (ValueError, KeyError, TypeError)):
        return 400, {"error": {"code": "bad_request", "message": str(exc)}}
    return 500, {"error": {"code": "internal", "message": str(exc)}}


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "metastates"

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    @property
    def manager(self) -> SessionManager:
        return self.server.manager  # type: ignore[attr-defined]

    # plumbing

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b"{}"
        try:
            body = json.loads(raw.decode("utf-8") or "{}")
        except json.JSONDecodeError as exc:
            raise ParseError(f"request body is not valid JSON: {exc.msg}") from None
        if not isinstance(body, dict):
            raise ParseError("request body must be a JSON object")
        return body

    def _send_json(self, payload: dict, status: int = 200) -> None:
        data = (dump_line(payload) + "\n").encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _dispatch(self, method: str) -> None:
        parsed = urlparse(self.path)
        segments = [s for s in parsed.path.split("/") if s]
        query = parse_qs(parsed.query)
        try:
            handled = self._route(method, segments, query)
        except MetaStatesError as exc:
            status, body = _error_body(exc)
            self._send_json(body, status)
            return
        except (ValueError, KeyError, TypeError) as exc:
            status, body = _error_body(exc)
            self._send_json(body, status)
            return
        if not handled:
            self._send_json({"error": {"code": "not_found",
                                       "message": f"no route for {self.path}"}}, 404)

    # routing

    def _route(self, method: str, seg: list[str], query: dict) -> bool:
        manager = self.manager
        if method == "GET" and seg == ["health"]:
            self._send_json({"ok": True})
            return True

        if seg and seg[0] == "profiles":
            if method == "GET" and len(seg) == 1:
                self._send_json({"profiles": manager.store.list_profiles()})
                return True
            if method == "GET" and len(seg) == 2:
                profile = manager.store.load_profile(seg[1])
                self._send_json(profile_to_dict(profile))
                return True
            if method == "POST" and len(seg) == 1:
                profile = profile_from_dict(self._read_json())
                manager.store.save_profile(profile)
                self._send_json({"worker_id": profile.worker_id}, 201)
                return True

        if seg and seg[0] == "scenarios":
            if method == "GET" and len(seg) == 1:
                self._send_json({"scenarios": manager.store.list_scenarios()})
                return True
            if method == "GET" and len(seg) == 2:
                scenario = manager.store.load_scenario(seg[1])
                self._send_json(scenario_to_dict(scenario))
                return True
            if method == "POST" and len(seg) == 1:
                scenario = scenario_from_dict(
                    self._read_json(),
                    default_tick_ms=manager.store.default_tick_ms)
                manager.store.save_scenario(scenario)
                self._send_json({"name": scenario.name}, 201)
                return True

        if seg and seg[0] == "sessions":
            return self._route_sessions(method, seg, query)
        return False

    def _route_sessions(self, method: str, seg: list[str], query: dict) -> bool:
        manager = self.manager
        if method == "GET" and len(seg) == 1:
            self._send_json({"sessions": manager.list_sessions()})
            return True
        if method == "POST" and len(seg) == 1:
            body = self._read_json()
            perf = None
            if body.get("performance_model") is not None:
                perf = performance_model_from_dict(body["performance_model"])
            info = manager.create_session(
                profile_id=body["profile_id"],
                scenario_id=body["scenario_id"],
                mode=body.get("mode", "realtime"),
                speed=body.get("speed"),
                performance_model=perf,
            )
            self._send_json(info, 201)
            return True
        if len(seg) < 2:
            return False
        session_id = seg[1]
        if method == "GET" and len(seg) == 2:
            self._send_json(manager.session_info(session_id))
            return True
        if method == "POST" and len(seg) == 3 and seg[2] in ("start", "pause", "finish"):
            info = getattr(manager, seg[2])(session_id)
            self._send_json(info)
            return True
        if method == "POST" and len(seg) == 3 and seg[2] == "override":
            body = self._read_json()
            value = body["value"]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InvalidSample(value, kind=body.get("kind"))
            ack = manager.apply_override(session_id, body["kind"], float(value))
            self._send_json(ack)
            return True
        if method == "DELETE" and len(seg) == 4 and seg[2] == "override":
            self._send_json(manager.clear_override(session_id, seg[3]))
            return True
        if method == "GET" and len(seg) == 3 and seg[2] == "report":
            self._send_json(manager.get_report(session_id))
            return True
        if method == "GET" and len(seg) == 3 and seg[2] == "stream":
            from_tick = None
            if "from_tick" in query:
                from_tick = int(query["from_tick"][0])
            self._stream(session_id, from_tick)
            return True
        return False

    def _stream(self, session_id: str, from_tick: int | None) -> None:
        subscriber = self.manager.subscribe(session_id, from_tick)
        self.send_response(200)
        self.send_header("Content-Type", "application/x-ndjson")
        self.send_header("Cache-Control", "no-store")
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        try:
            for line in subscriber:
                self.wfile.write(line.encode("utf-8") + b"\n")
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError):
            subscriber.end()

    # HTTP verbs

    def do_GET(self) -> None:  # noqa: N802 - stdlib naming
        self._dispatch("GET")

    def do_POST(self) -> None:  # noqa: N802
        self._dispatch("POST")

    def do_DELETE(self) -> None:  # noqa: N802
        self._dispatch("DELETE")

    def do_OPTIONS(self) -> None:  # noqa: N802
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()


class ServiceServer:
    """Threaded HTTP server bound to a manager; port 0 picks a free port."""

    def __init__(self, manager: SessionManager, host: str = "127.0.0.1",
                 port: int = 0):
        self._httpd = ThreadingHTTPServer((host, port), ApiHandler)
        self._httpd.daemon_threads = True
        self._httpd.manager = manager  # type: ignore[attr-defined]
        self.manager = manager
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        host, port = self._httpd.server_address[:2]
        return str(host), int(port)

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def start_background(self) -> "ServiceServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        name="metastates-http", daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
        self.manager.shutdown()
