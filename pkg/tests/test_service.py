import json
import time

import pytest
from websockets.sync.client import connect

from intentsim.parser import parse_program
from intentsim.runtime import Simulation
from intentsim.service import SimServer, _Subscriber
from intentsim.session import SimulationSession

from conftest import cat_with_scenario

TRAPPED = cat_with_scenario(
    "scenario {\n  world 10 x 10\n  seed 42\n  spawn cat cat1 at (4, 4)\n"
    "  thing dog at (4, 4)\n}\n"
)


@pytest.fixture
def server():
    sim = Simulation.load(parse_program(TRAPPED))
    srv = SimServer(SimulationSession(sim), port=0).start()
    yield srv
    srv.stop()


class Client:
    def __init__(self, server):
        self.ws = connect(f"ws://127.0.0.1:{server.port}", close_timeout=1)
        self.events = []
        self._id = 0
        hello = self.recv_event("hello")
        assert hello["version"] == 1

    def close(self):
        self.ws.close()

    def recv(self, timeout=5):
        return json.loads(self.ws.recv(timeout=timeout))

    def recv_event(self, kind, timeout=5):
        for i, msg in enumerate(self.events):
            if msg.get("event") == kind:
                return self.events.pop(i)
        while True:
            msg = self.recv(timeout)
            if msg.get("event") == kind:
                return msg
            self.events.append(msg)

    def call(self, verb, payload=None, timeout=5):
        self._id += 1
        self.ws.send(json.dumps({"id": self._id, "verb": verb, "payload": payload or {}}))
        while True:
            msg = self.recv(timeout)
            if "id" in msg and msg["id"] == self._id:
                return msg
            self.events.append(msg)

    def ok(self, verb, payload=None):
        msg = self.call(verb, payload)
        assert msg["ok"], msg
        return msg["payload"]

    def err(self, verb, payload=None):
        msg = self.call(verb, payload)
        assert not msg["ok"], msg
        return msg["error"]


@pytest.fixture
def client(server):
    c = Client(server)
    yield c
    c.close()


def _tick_reports(client):
    return [m for m in client.events if m.get("event") == "tick_report"]


def test_hello_and_snapshot(client):
    snap = client.ok("snapshot")
    assert snap["tick"] == 0
    assert snap["paused"] is True
    assert "cat1" in snap["agents"]
    assert snap["world"]["width"] == 10


def test_step_pushes_reports_in_order(client):
    for expected in range(1, 6):
        got = client.ok("step", {"n": 1})
        assert got["tick"] == expected
        report = client.recv_event("tick_report")
        assert report["tick"] == expected
        assert report["dropped"] == 0


def test_step_rejects_zero(client):
    error = client.err("step", {"n": 0})
    assert error["code"] == "bad-payload"


def test_bad_verb(client):
    assert client.err("fly")["code"] == "bad-verb"


def test_mew_edit_round_trip(client):
    client.ok("step", {"n": 1})
    got = client.ok("add_effect",
                    {"agent": "cat1", "action": "mew", "tendency": "reduce",
                     "property": "danger"})
    assert got["queued"] >= 1
    client.ok("step", {"n": 1})
    applied = client.recv_event("edit_applied")
    assert applied["tick"] == 2
    assert applied["payload"]["edit"]["kind"] == "add_effect"
    report = client.recv_event("tick_report")
    while report["tick"] != 2:
        report = client.recv_event("tick_report")
    assert report["payload"]["agents"]["cat1"]["solved"] == ["mew", "run"]


def test_assert_clause_bad_payload_has_span(client):
    error = client.err("assert_clause", {"agent": "cat1", "text": "eat :- not(danger"})
    assert error["code"] == "bad-payload"
    assert error["line"] == 1
    assert error["col"] >= 17


def test_explain_over_the_wire(client):
    client.ok("step", {"n": 1})
    exp = client.ok("explain", {"agent": "cat1"})
    assert "danger" in exp["text"] and "run" in exp["text"] and "reduce" in exp["text"]
    error = client.err("explain", {"agent": "nobody"})
    assert error["code"] == "target-not-found"


def test_explain_before_cycle(client):
    assert client.err("explain", {"agent": "cat1"})["code"] == "no-cycle-yet"


def test_get_source_reparses(client):
    src = client.ok("get_source", {"class": "cat"})["source"]
    prog = parse_program(src)
    assert prog.classes[0].name == "cat"


def test_spawn_and_list(client):
    got = client.ok("spawn", {"class": "cat", "at": [1, 1]})
    assert got["name"] == "cat2"
    agents = client.ok("list_agents")["agents"]
    assert [a["name"] for a in agents] == ["cat1", "cat2"]


def test_set_property_validation(client):
    error = client.err("set_property", {"agent": "cat1", "name": "danger", "value": 3})
    assert error["code"] == "validation"


def test_paused_simulation_no_pushes(client):
    time.sleep(0.3)
    client.ok("hello")  # drain anything pending via a round trip
    assert _tick_reports(client) == []


def test_resume_then_pause_ticks_flow(client):
    client.ok("set_speed", {"tps": 50})
    client.ok("resume")
    report = client.recv_event("tick_report", timeout=5)
    assert report["tick"] >= 1
    client.ok("pause")


def test_concurrent_clients_serialized(server):
    # both edits pass queue-time validation; receipt order decides which one
    # lands and which fails its duplicate check at the safe point
    a, b = Client(server), Client(server)
    try:
        a.ok("add_effect", {"agent": "cat1", "action": "mew", "tendency": "reduce",
                            "property": "danger"})
        b.ok("add_effect", {"agent": "cat1", "action": "mew",
                            "tendency": "increase", "property": "danger"})
        a.ok("step", {"n": 1})
        first = a.recv_event("edit_applied")
        second = a.recv_event("edit_applied")
        assert first["payload"]["ok"] is True
        assert first["payload"]["edit"]["tendency"] == "reduce"
        assert second["payload"]["ok"] is False
        assert "already declares" in second["payload"]["error"]
    finally:
        a.close()
        b.close()


# --- coalescing contract (unit level: deterministic) -------------------------------


def test_subscriber_coalesces_to_latest():
    sub = _Subscriber()
    for i in range(1, 101):
        sub.put_tick({"tick": i})
    frame = json.loads(sub.next())
    assert frame["event"] == "tick_report"
    assert frame["tick"] == 100
    assert frame["dropped"] == 99


def test_subscriber_keeps_responses_and_order():
    sub = _Subscriber()
    sub.put('{"id": 1}')
    sub.put_tick({"tick": 1})
    sub.put('{"id": 2}')
    first = sub.next()
    second = sub.next()
    third = json.loads(sub.next())
    assert json.loads(first) == {"id": 1}
    assert json.loads(second) == {"id": 2}
    assert third["tick"] == 1
