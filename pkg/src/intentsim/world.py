"""Bounded grid environment and the builtin catalog bodies call into.

Distances are Chebyshev; movement is one cell per call among the eight
neighbours, clamped to the grid. All randomness flows through the world's
seeded generator, consumed only by builtins (and initial placement), in
call order, so runs replay exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .body import BodyRuntimeError

INF = float("inf")


class UnknownBuiltin(BodyRuntimeError):
    pass


class ArityError(BodyRuntimeError):
    pass


@dataclass
class Entity:
    eid: int
    kind: str
    x: int
    y: int
    alive: bool = True


class WorldState:
    def __init__(self, width, height, seed=0):
        if width < 1 or height < 1:
            raise ValueError("world must be at least 1x1")
        self.width = width
        self.height = height
        self.rng = random.Random(seed)
        self.entities = {}
        self._next_eid = 1

    def add_entity(self, kind, pos=None):
        if pos is None:
            pos = (self.rng.randrange(self.width), self.rng.randrange(self.height))
        x, y = pos
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise ValueError(f"position {pos} outside {self.width}x{self.height} world")
        eid = self._next_eid
        self._next_eid += 1
        self.entities[eid] = Entity(eid, kind, x, y)
        return eid

    def entity(self, eid):
        return self.entities.get(eid)

    def distance(self, a: Entity, b: Entity):
        return max(abs(a.x - b.x), abs(a.y - b.y))

    def nearest_entity(self, caller_eid, kind):
        """Nearest living entity of `kind`, excluding the caller; ties to
        the smaller id. None when there is none."""
        me = self.entities[caller_eid]
        best = None
        best_d = None
        for eid in sorted(self.entities):
            if eid == caller_eid:
                continue
            e = self.entities[eid]
            if not e.alive or e.kind != kind:
                continue
            d = self.distance(me, e)
            if best is None or d < best_d:
                best, best_d = e, d
        return best

    def _clamp(self, x, y):
        return (min(max(x, 0), self.width - 1), min(max(y, 0), self.height - 1))

    @staticmethod
    def _sign(v):
        return (v > 0) - (v < 0)

    def _step_relative(self, me: Entity, target: Entity, away: bool):
        dx = self._sign(target.x - me.x)
        dy = self._sign(target.y - me.y)
        if away:
            dx, dy = -dx, -dy
        me.x, me.y = self._clamp(me.x + dx, me.y + dy)

    def eval_builtin(self, name, args, caller_eid):
        def arity(n):
            if len(args) != n:
                raise ArityError(f"{name} takes {n} argument(s), got {len(args)}")

        def kind_arg():
            if not isinstance(args[0], str):
                raise BodyRuntimeError(f"{name} needs an entity kind, got {args[0]!r}")
            return args[0]

        if name == "nearest":
            arity(1)
            e = self.nearest_entity(caller_eid, kind_arg())
            return INF if e is None else self.distance(self.entities[caller_eid], e)
        if name in ("move_toward", "move_away"):
            arity(1)
            me = self.entities[caller_eid]
            target = self.nearest_entity(caller_eid, kind_arg())
            if target is not None:
                self._step_relative(me, target, away=(name == "move_away"))
            return True
        if name == "random":
            arity(0)
            return self.rng.random()
        if name == "consume":
            arity(1)
            target = self.nearest_entity(caller_eid, kind_arg())
            if target is None:
                return False
            if self.distance(self.entities[caller_eid], target) <= 1:
                target.alive = False
                return True
            return False
        if name == "distance_to":
            arity(1)
            eid = args[0]
            if not isinstance(eid, (int, float)) or isinstance(eid, bool):
                raise BodyRuntimeError(f"distance_to needs an entity id, got {eid!r}")
            other = self.entities.get(int(eid))
            if other is None or not other.alive:
                return INF
            return self.distance(self.entities[caller_eid], other)
        raise UnknownBuiltin(f"unknown builtin {name!r}")

    def snapshot(self):
        return [
            [e.eid, e.kind, e.x, e.y, e.alive]
            for e in (self.entities[k] for k in sorted(self.entities))
        ]
