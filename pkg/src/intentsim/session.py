"""Run orchestration shared by the CLI, the REPL and the service.

A session owns one Simulation plus the side files: the JSON-lines trace
(one line per tick report, stable field order, byte-reproducible) and the
applied-command schedule used for record/replay. Replaying a schedule
against the same scenario and seed reproduces the original trace exactly.

Schedule line shapes:
  {"tick": T, "scope": "agent"|"class", "target": name, "edit": {...}}
  {"tick": T, "scope": "spawn", "class": c, "name": n|null,
   "at": [x, y]|null, "overrides": {...}}

An entry with tick T takes effect before the tick that will be numbered T
(edits reach their target's safe point inside tick T).
"""

from __future__ import annotations

import json
from typing import Callable, Dict, List

from .runtime import Simulation, edit_from_json


def report_line(report: dict) -> str:
    return json.dumps(report, separators=(",", ":"))


class SimulationSession:
    def __init__(self, sim: Simulation, trace_path=None, record_path=None):
        self.sim = sim
        self._trace = open(trace_path, "w", encoding="utf-8") if trace_path else None
        self._record = open(record_path, "w", encoding="utf-8") if record_path else None
        self._replay: Dict[int, List[dict]] = {}
        self._listeners: List[Callable[[dict], None]] = []
        self._recorded = 0  # applied_edits already written

    def add_listener(self, fn):
        self._listeners.append(fn)

    # -- commands ------------------------------------------------------------

    def spawn(self, class_name, name=None, overrides=None, pos=None) -> str:
        got = self.sim.spawn_agent(class_name, name, overrides, pos)
        self._write_record(
            {
                "tick": self.sim.tick_index + 1,
                "scope": "spawn",
                "class": class_name,
                "name": got,
                "at": None if pos is None else list(pos),
                "overrides": dict(overrides or {}),
            }
        )
        return got

    def queue_edit(self, target, edit) -> int:
        return self.sim.queue_edit(target, edit)

    # -- replay ---------------------------------------------------------------

    def load_replay(self, path):
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self._replay.setdefault(int(entry["tick"]), []).append(entry)

    def _inject_replay(self, tick):
        for entry in self._replay.pop(tick, ()):  # file order preserved
            if entry.get("scope") == "spawn":
                pos = entry.get("at")
                self.sim.spawn_agent(
                    entry["class"],
                    entry.get("name"),
                    entry.get("overrides") or {},
                    None if pos is None else tuple(pos),
                )
            else:
                # re-queue even entries that failed at apply time: they fail
                # identically on replay and keep the applied log byte-equal
                self.sim.queue_edit(entry["target"], edit_from_json(entry["edit"]))

    # -- stepping ----------------------------------------------------------------

    def tick(self) -> dict:
        self._inject_replay(self.sim.tick_index + 1)
        report = self.sim.tick()
        if self._trace is not None:
            self._trace.write(report_line(report) + "\n")
            self._trace.flush()
        applied = self.sim.applied_edits
        while self._recorded < len(applied):
            self._write_record(applied[self._recorded])
            self._recorded += 1
        for fn in self._listeners:
            fn(report)
        return report

    def run(self, ticks: int):
        last = None
        for _ in range(ticks):
            last = self.tick()
        return last

    def _write_record(self, entry):
        if self._record is not None:
            self._record.write(json.dumps(entry, separators=(",", ":")) + "\n")
            self._record.flush()

    def close(self):
        if self._trace is not None:
            self._trace.close()
            self._trace = None
        if self._record is not None:
            self._record.close()
            self._record = None
