"""HTTP API tests over real sockets: routes, streaming, error mapping."""
from __future__ import annotations

import json
import re
import subprocess
import sys
import time

import pytest
import requests

from metastates.builtins import builtin_scenario
from metastates.scenario import scenario_to_dict
from metastates.service import DataStore, SessionManager
from metastates.service.http import ServiceServer


@pytest.fixture
def server(tmp_path):
    manager = SessionManager(DataStore(tmp_path / "data"))
    srv = ServiceServer(manager, port=0).start_background()
    yield srv
    srv.shutdown()


def create_fast_session(server, scenario="flat_optimal", speed=2000.0):
    response = requests.post(f"{server.url}/sessions", json={
        "profile_id": "default", "scenario_id": scenario,
        "mode": "accelerated", "speed": speed})
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


class TestRoutes:
    def test_health(self, server):
        assert requests.get(f"{server.url}/health").json() == {"ok": True}

    def test_profiles_listing_and_get(self, server):
        listing = requests.get(f"{server.url}/profiles").json()["profiles"]
        assert any(p["worker_id"] == "default" for p in listing)
        doc = requests.get(f"{server.url}/profiles/default").json()
        assert doc["schema_version"] == 1
        assert set(doc["kinds"]) == {"stress", "attention",
                                     "cognitive_workload", "physical_fatigue"}

    def test_scenarios_listing_and_get(self, server):
        listing = requests.get(f"{server.url}/scenarios").json()["scenarios"]
        assert {"fig9", "flat_optimal"} <= {s["name"] for s in listing}
        doc = requests.get(f"{server.url}/scenarios/fig9").json()
        assert doc["duration_ms"] == 8000
        assert doc["timeline"]["stress"][0] == [0, 0.2]

    def test_post_scenario_round_trips(self, server):
        doc = scenario_to_dict(builtin_scenario("flat_optimal"))
        doc["name"] = "copy"
        response = requests.post(f"{server.url}/scenarios", json=doc)
        assert response.status_code == 201
        fetched = requests.get(f"{server.url}/scenarios/copy").json()
        assert fetched == doc

    def test_unknown_resource_is_404(self, server):
        response = requests.get(f"{server.url}/profiles/nobody")
        assert response.status_code == 404
        assert response.json()["error"]["code"] == "not_found"

    def test_unknown_route_is_404(self, server):
        assert requests.get(f"{server.url}/nope").status_code == 404

    def test_bad_json_body_is_400(self, server):
        response = requests.post(f"{server.url}/sessions", data="{not json",
                                 headers={"Content-Type": "application/json"})
        assert response.status_code == 400


class TestSessionApi:
    def test_session_lifecycle(self, server):
        sid = create_fast_session(server)
        info = requests.get(f"{server.url}/sessions/{sid}").json()
        assert info["state"] == "created"
        started = requests.post(f"{server.url}/sessions/{sid}/start").json()
        assert started["state"] == "running"
        deadline = time.time() + 10
        while time.time() < deadline:
            info = requests.get(f"{server.url}/sessions/{sid}").json()
            if info["state"] == "finished":
                break
            time.sleep(0.02)
        assert info["state"] == "finished"
        report = requests.get(f"{server.url}/sessions/{sid}/report").json()
        assert report["ticks"] == 30
        assert report["task"]["completed"] is True
        assert report["task"]["completion_ms"] == 1000

    def test_override_validation(self, server):
        sid = create_fast_session(server, scenario="fig9", speed=50.0)
        url = f"{server.url}/sessions/{sid}/override"
        # Session not running yet.
        response = requests.post(url, json={"kind": "stress", "value": 0.9})
        assert response.status_code == 409
        requests.post(f"{server.url}/sessions/{sid}/start")
        response = requests.post(url, json={"kind": "heart_rate", "value": 0.9})
        assert response.status_code == 400
        response = requests.post(url, json={"kind": "stress", "value": "high"})
        assert response.status_code == 400
        response = requests.post(url, json={"kind": "stress", "value": 0.9})
        assert response.status_code == 200
        assert "effective_tick" in response.json()
        requests.post(f"{server.url}/sessions/{sid}/finish")

    def test_stream_replays_finished_session(self, server):
        sid = create_fast_session(server)
        requests.post(f"{server.url}/sessions/{sid}/start")
        deadline = time.time() + 10
        while time.time() < deadline:
            if requests.get(f"{server.url}/sessions/{sid}").json()["state"] == "finished":
                break
            time.sleep(0.02)
        with requests.get(f"{server.url}/sessions/{sid}/stream",
                          params={"from_tick": 0}, stream=True) as response:
            assert response.status_code == 200
            assert response.headers["Content-Type"] == "application/x-ndjson"
            lines = [json.loads(l) for l in response.iter_lines()]
        frames = [l for l in lines if l["type"] == "frame"]
        assert [f["tick"] for f in frames] == list(range(30))
        assert lines[-1]["event"] == "finished"

    def test_live_stream_sees_override_effect(self, server):
        sid = create_fast_session(server, scenario="fig9", speed=100.0)
        with requests.get(f"{server.url}/sessions/{sid}/stream",
                          params={"from_tick": 0}, stream=True,
                          timeout=30) as response:
            line_iter = response.iter_lines()
            requests.post(f"{server.url}/sessions/{sid}/start")
            saw_red = None
            ack = None
            for raw in line_iter:
                msg = json.loads(raw)
                if msg["type"] != "frame":
                    continue
                if msg["tick"] == 3 and ack is None:
                    ack = requests.post(
                        f"{server.url}/sessions/{sid}/override",
                        json={"kind": "physical_fatigue", "value": 0.99}).json()
                if (ack is not None and msg["tick"] >= ack["effective_tick"]
                        and msg["mpi"]["color"] == "red"):
                    saw_red = msg
                    break
            assert saw_red is not None
            assert saw_red["states"]["physical_fatigue"]["value"] == 0.99
            assert saw_red["reactions"]["body"]["animation_id"] == "fatigue_posture"
        requests.post(f"{server.url}/sessions/{sid}/finish")

    def test_report_before_finish_is_409(self, server):
        sid = create_fast_session(server)
        response = requests.get(f"{server.url}/sessions/{sid}/report")
        assert response.status_code == 409


class TestServeCommand:
    def _spawn(self, tmp_path, *argv, env_extra=None):
        import os

        env = dict(os.environ)
        if env_extra:
            env.update(env_extra)
        return subprocess.Popen(
            [sys.executable, "-m", "metastates.cli", "serve",
             "--data-dir", str(tmp_path / "data"), *argv],
            stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
            env=env)

    def _banner(self, proc):
        line = proc.stdout.readline()
        match = re.search(r"listening on (http://[\d.]+:(\d+))", line)
        assert match, f"unexpected banner: {line!r}"
        return match.group(1), int(match.group(2))

    def test_port_zero_prints_bound_address(self, tmp_path):
        proc = self._spawn(tmp_path, "--port", "0")
        try:
            url, port = self._banner(proc)
            assert port > 0
            assert requests.get(f"{url}/health", timeout=5).json() == {"ok": True}
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_env_port_used_when_flag_absent(self, tmp_path):
        proc = self._spawn(tmp_path, env_extra={"METASTATES_PORT": "0"})
        try:
            url, port = self._banner(proc)
            assert port > 0
            assert requests.get(f"{url}/health", timeout=5).json() == {"ok": True}
        finally:
            proc.terminate()
            proc.wait(timeout=10)
