"""Network control plane: JSON text frames over a WebSocket.

Requests:  {"id": n, "verb": "...", "payload": {...}}
Responses: {"id": n, "ok": true, "payload": {...}}
           {"id": n, "ok": false, "error": {"code", "message", "line"?, "col"?}}
Pushes:    {"event": "hello"|"tick_report"|"edit_applied"|"log", ...}

Every request gets exactly one response. All verbs are executed by the
simulation thread, one at a time, in server receipt order; edits reach
their target at its next safe point. Tick reports are pushed to every
connected client; a slow consumer sees reports coalesced to the latest
with an explicit dropped count (responses and edit events are never
dropped).

The protocol document lives in docs/protocol.md.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from collections import deque
from concurrent.futures import Future

from websockets.sync.server import serve

from . import runtime
from .parser import ParseError, parse_clause
from .session import SimulationSession

PROTOCOL_VERSION = 1

VERBS = (
    "hello",
    "snapshot",
    "step",
    "pause",
    "resume",
    "set_speed",
    "spawn",
    "set_property",
    "assert_clause",
    "retract_clause",
    "add_effect",
    "remove_effect",
    "explain",
    "list_agents",
    "get_source",
)

BAD_VERB = "bad-verb"
BAD_PAYLOAD = "bad-payload"
TARGET_NOT_FOUND = "target-not-found"
VALIDATION = "validation"
NO_CYCLE_YET = "no-cycle-yet"


class ProtocolError(Exception):
    def __init__(self, code, message, line=None, col=None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.line = line
        self.col = col

    def to_json(self):
        err = {"code": self.code, "message": self.message}
        if self.line is not None:
            err["line"] = self.line
            err["col"] = self.col
        return err


class _Subscriber:
    """Per-connection outbox with tick-report coalescing."""

    def __init__(self):
        self._lock = threading.Lock()
        self._cond = threading.Condition(self._lock)
        self._items = deque()
        self._pending_tick = None
        self._dropped = 0
        self._closed = False

    def put(self, text):
        with self._cond:
            self._items.append(text)
            self._cond.notify()

    def put_tick(self, report):
        with self._cond:
            if self._pending_tick is not None:
                self._dropped += 1
            self._pending_tick = report
            self._cond.notify()

    def close(self):
        with self._cond:
            self._closed = True
            self._cond.notify()

    def next(self):
        """Next frame to send, or None once closed and drained."""
        with self._cond:
            while True:
                if self._items:
                    return self._items.popleft()
                if self._pending_tick is not None:
                    report = self._pending_tick
                    dropped = self._dropped
                    self._pending_tick = None
                    self._dropped = 0
                    msg = {
                        "event": "tick_report",
                        "tick": report["tick"],
                        "dropped": dropped,
                        "payload": report,
                    }
                    return json.dumps(msg, separators=(",", ":"))
                if self._closed:
                    return None
                self._cond.wait()


class SimServer:
    """Runs the simulation loop and the WebSocket endpoint."""

    def __init__(self, session: SimulationSession, host="127.0.0.1", port=8765,
                 tick_rate=10.0):
        self.session = session
        self.host = host
        self.port = port
        self.tick_rate = tick_rate
        self.paused = True
        self._commands = queue.Queue()
        self._subscribers = set()
        self._sub_lock = threading.Lock()
        self._stop = threading.Event()
        self._server = None
        self._threads = []

    # -- lifecycle ---------------------------------------------------------

    def start(self):
        self._server = serve(self._handle_connection, self.host, self.port)
        self.port = self._server.socket.getsockname()[1]
        t_ws = threading.Thread(target=self._server.serve_forever, daemon=True,
                                name="intentsim-ws")
        t_sim = threading.Thread(target=self._sim_loop, daemon=True,
                                 name="intentsim-sim")
        self._threads = [t_ws, t_sim]
        t_ws.start()
        t_sim.start()
        return self

    def stop(self):
        self._stop.set()
        self._commands.put(None)
        if self._server is not None:
            self._server.shutdown()
        with self._sub_lock:
            subs = list(self._subscribers)
        for s in subs:
            s.close()

    def wait(self):
        try:
            while not self._stop.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    # -- connection side -------------------------------------------------------

    def _handle_connection(self, ws):
        sub = _Subscriber()
        with self._sub_lock:
            self._subscribers.add(sub)
        sender = threading.Thread(target=self._sender, args=(ws, sub), daemon=True)
        sender.start()
        sub.put(json.dumps(
            {"event": "hello", "version": PROTOCOL_VERSION, "verbs": list(VERBS)},
            separators=(",", ":"),
        ))
        try:
            for message in ws:
                response = self._submit(message)
                sub.put(json.dumps(response, separators=(",", ":")))
        except Exception:
            pass
        finally:
            with self._sub_lock:
                self._subscribers.discard(sub)
            sub.close()

    def _sender(self, ws, sub: _Subscriber):
        while True:
            frame = sub.next()
            if frame is None:
                return
            try:
                ws.send(frame)
            except Exception:
                sub.close()
                return

    def _submit(self, message):
        try:
            request = json.loads(message)
        except json.JSONDecodeError as e:
            return {"id": None, "ok": False,
                    "error": {"code": BAD_PAYLOAD, "message": f"not JSON: {e}"}}
        rid = request.get("id")
        fut = Future()
        self._commands.put((request, fut))
        try:
            payload = fut.result()
            return {"id": rid, "ok": True, "payload": payload}
        except ProtocolError as e:
            return {"id": rid, "ok": False, "error": e.to_json()}
        except Exception as e:  # defensive: never leave a request unanswered
            return {"id": rid, "ok": False,
                    "error": {"code": "internal", "message": str(e)}}

    # -- broadcast ----------------------------------------------------------------

    def _broadcast_report(self, report):
        with self._sub_lock:
            subs = list(self._subscribers)
        for s in subs:
            s.put_tick(report)
        for edit in report.get("edits", ()):
            frame = json.dumps(
                {"event": "edit_applied", "tick": report["tick"], "payload": edit},
                separators=(",", ":"),
            )
            for s in subs:
                s.put(frame)

    # -- simulation side -----------------------------------------------------------

    def _sim_loop(self):
        next_tick = time.monotonic()
        while not self._stop.is_set():
            timeout = 0.05
            if not self.paused:
                timeout = max(0.0, next_tick - time.monotonic())
            try:
                cmd = self._commands.get(timeout=timeout)
            except queue.Empty:
                cmd = None
            if cmd is not None:
                request, fut = cmd
                try:
                    fut.set_result(self._dispatch(request))
                except Exception as e:
                    fut.set_exception(e)
                continue
            if not self.paused and time.monotonic() >= next_tick:
                self._tick_once()
                next_tick = time.monotonic() + 1.0 / self.tick_rate

    def _tick_once(self):
        report = self.session.tick()
        self._broadcast_report(report)
        return report

    # -- verbs ------------------------------------------------------------------------

    def _dispatch(self, request):
        verb = request.get("verb")
        payload = request.get("payload") or {}
        if not isinstance(payload, dict):
            raise ProtocolError(BAD_PAYLOAD, "payload must be an object")
        handler = getattr(self, f"_verb_{verb}", None)
        if verb not in VERBS or handler is None:
            raise ProtocolError(BAD_VERB, f"unknown verb {verb!r}")
        try:
            return handler(payload)
        except runtime.UnknownTarget as e:
            raise ProtocolError(TARGET_NOT_FOUND, f"no such agent or class: {e}")
        except runtime.UnknownClass as e:
            raise ProtocolError(TARGET_NOT_FOUND, f"no such class: {e}")
        except (runtime.ValidationError, runtime.UnknownProperty) as e:
            raise ProtocolError(VALIDATION, str(e))
        except runtime.NoCycleYet as e:
            raise ProtocolError(NO_CYCLE_YET, f"agent {e} has not completed a cycle")
        except ParseError as e:
            raise ProtocolError(BAD_PAYLOAD, e.message, e.line, e.col)

    def _verb_hello(self, payload):
        return {"version": PROTOCOL_VERSION, "verbs": list(VERBS)}

    def _verb_snapshot(self, payload):
        snap = self.session.sim.snapshot()
        snap["paused"] = self.paused
        snap["tick_rate"] = self.tick_rate
        return snap

    def _verb_step(self, payload):
        n = payload.get("n", 1)
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ProtocolError(BAD_PAYLOAD, "step needs an integer n >= 1")
        report = None
        for _ in range(n):
            report = self._tick_once()
        return {"tick": report["tick"]}

    def _verb_pause(self, payload):
        self.paused = True
        return {"paused": True}

    def _verb_resume(self, payload):
        self.paused = False
        return {"paused": False}

    def _verb_set_speed(self, payload):
        tps = payload.get("tps")
        if not isinstance(tps, (int, float)) or isinstance(tps, bool) or tps <= 0:
            raise ProtocolError(BAD_PAYLOAD, "set_speed needs tps > 0")
        self.tick_rate = float(tps)
        return {"tps": self.tick_rate}

    def _verb_spawn(self, payload):
        class_name = payload.get("class")
        if not isinstance(class_name, str):
            raise ProtocolError(BAD_PAYLOAD, "spawn needs a class name")
        pos = payload.get("at")
        if pos is not None:
            pos = tuple(pos)
        name = self.session.spawn(class_name, payload.get("name"),
                                  payload.get("overrides") or {}, pos)
        return {"name": name}

    def _target_of(self, payload):
        target = payload.get("agent") or payload.get("class") or payload.get("target")
        if not isinstance(target, str):
            raise ProtocolError(BAD_PAYLOAD, "missing 'agent' or 'class' target")
        return target

    def _queue(self, payload, edit):
        seq = self.session.queue_edit(self._target_of(payload), edit)
        return {"queued": seq}

    def _verb_set_property(self, payload):
        name = payload.get("name")
        if not isinstance(name, str) or "value" not in payload:
            raise ProtocolError(BAD_PAYLOAD, "set_property needs name and value")
        return self._queue(payload, runtime.SetProperty(name, payload["value"]))

    def _verb_assert_clause(self, payload):
        text = payload.get("text")
        if not isinstance(text, str):
            raise ProtocolError(BAD_PAYLOAD, "assert_clause needs clause text")
        return self._queue(payload, runtime.AssertClause(parse_clause(text)))

    def _verb_retract_clause(self, payload):
        text = payload.get("text")
        if not isinstance(text, str):
            raise ProtocolError(BAD_PAYLOAD, "retract_clause needs clause text")
        return self._queue(payload, runtime.RetractClause(parse_clause(text)))

    def _verb_add_effect(self, payload):
        for key in ("action", "tendency", "property"):
            if not isinstance(payload.get(key), str):
                raise ProtocolError(BAD_PAYLOAD, f"add_effect needs {key}")
        return self._queue(
            payload,
            runtime.AddEffect(payload["action"], payload["tendency"], payload["property"]),
        )

    def _verb_remove_effect(self, payload):
        for key in ("action", "property"):
            if not isinstance(payload.get(key), str):
                raise ProtocolError(BAD_PAYLOAD, f"remove_effect needs {key}")
        return self._queue(
            payload, runtime.RemoveEffect(payload["action"], payload["property"])
        )

    def _verb_explain(self, payload):
        agent = payload.get("agent")
        if not isinstance(agent, str):
            raise ProtocolError(BAD_PAYLOAD, "explain needs an agent name")
        return self.session.sim.explain(agent).to_json()

    def _verb_list_agents(self, payload):
        sim = self.session.sim
        out = []
        for name, agent in sim.agents.items():
            entity = sim.world.entity(agent.entity_id)
            out.append({
                "name": name,
                "class": agent.cls.name,
                "alive": bool(entity and entity.alive),
            })
        return {"agents": out}

    def _verb_get_source(self, payload):
        class_name = payload.get("class")
        if not isinstance(class_name, str):
            raise ProtocolError(BAD_PAYLOAD, "get_source needs a class name")
        return {"class": class_name, "source": self.session.sim.agent_source(class_name)}
