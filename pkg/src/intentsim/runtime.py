"""Deterministic multi-agent scheduler with live editing at safe points.

Each tick advances agents in spawn order. Per agent slice: queued edits
addressed to it are applied (class-level edits drain at the tick-start
safe point), scheduled perceptions due this tick run, then the decision
cycle advances by the configured step budget. A cycle proves `main`
(collecting directly proven action atoms and blocked property literals),
then enumerates intend(T, P); on completion intentions are derived, the
action set selected, and every chosen body executed once. At most one
cycle completes per agent per tick; leftover budget is discarded.

The decision layer never writes: the store tracks a write context, and
any write attempted while the context is 'decision' raises
ReadOnlyViolation. Perception bodies triggered mid-resolution write under
their own context, which is the paper's perception-on-demand semantics.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Dict, List, Optional

from . import ast
from .body import BodyContext, BodyRuntimeError, run_body
from .inference import (
    FAILED,
    SUCCEEDED,
    ClauseDb,
    ClauseNotFound,
    Resolver,
    StaleDb,
    solve_start,
)
from .parser import RESERVED_PREDICATES, parse_clause, parse_query
from .pretty import class_text
from .solver import (
    InvalidTendency,
    derive_intentions,
    intend_solution,
    intention_origin_text,
    select_action_set,
    with_direct,
)
from .terms import Atom, Clause, clause_text
from .world import WorldState

DEFAULT_BUDGET = 200
DEFAULT_INTEND_CAP = 64

_MAIN_GOAL = parse_query("main")
_INTEND_GOAL = parse_query("intend(T, P)")


class UnknownClass(Exception):
    pass


class UnknownTarget(Exception):
    pass


class UnknownProperty(Exception):
    pass


class NoCycleYet(Exception):
    pass


class ReadOnlyViolation(Exception):
    """The decision layer attempted a property write."""


class ValidationError(Exception):
    """An edit or spawn request is semantically invalid."""


# --- property store ---------------------------------------------------------------

def _type_tag(value):
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "symbol"
    raise ValidationError(f"not a property value: {value!r}")


class PropertyStore:
    """name -> (value, last_write_tick); version bumps on every write.

    Only perception bodies, action bodies and external set commands may
    write; the initial value's type is fixed for the run.
    """

    def __init__(self, decls, overrides=None, tick=0):
        self._values = {}
        self._ticks = {}
        self._types = {}
        self.version = 0
        self._context = "external"
        overrides = dict(overrides or {})
        for d in decls:
            value = overrides.pop(d.name, d.initial)
            self._types[d.name] = _type_tag(d.initial)
            if _type_tag(value) != self._types[d.name]:
                raise ValidationError(
                    f"property {d.name!r} is {self._types[d.name]}, got {value!r}"
                )
            self._values[d.name] = value
            self._ticks[d.name] = tick
        if overrides:
            raise UnknownProperty(", ".join(sorted(overrides)))

    def names(self):
        return list(self._values)

    def has(self, name):
        return name in self._values

    def read(self, name):
        if name not in self._values:
            raise UnknownProperty(name)
        return self._values[name]

    def last_write_tick(self, name):
        if name not in self._ticks:
            raise UnknownProperty(name)
        return self._ticks[name]

    def type_of(self, name):
        return self._types[name]

    def write(self, name, value, tick):
        if self._context == "decision":
            raise ReadOnlyViolation(f"decision layer tried to write {name!r}")
        if name not in self._values:
            raise UnknownProperty(name)
        if _type_tag(value) != self._types[name]:
            raise BodyRuntimeError(
                f"property {name!r} is {self._types[name]}, cannot store {value!r}"
            )
        self._values[name] = value
        self._ticks[name] = tick
        self.version += 1

    @contextmanager
    def context(self, ctx):
        prev = self._context
        self._context = ctx
        try:
            yield
        finally:
            self._context = prev

    def snapshot(self):
        return dict(self._values)


# --- edits -----------------------------------------------------------------------

@dataclass(frozen=True)
class AssertClause:
    clause: Clause


@dataclass(frozen=True)
class RetractClause:
    pattern: Clause


@dataclass(frozen=True)
class AddEffect:
    action: str
    tendency: str
    property: str


@dataclass(frozen=True)
class RemoveEffect:
    action: str
    property: str


@dataclass(frozen=True)
class SetProperty:
    name: str
    value: object


def edit_to_json(edit):
    if isinstance(edit, AssertClause):
        return {"kind": "assert_clause", "text": clause_text(edit.clause)}
    if isinstance(edit, RetractClause):
        return {"kind": "retract_clause", "text": clause_text(edit.pattern)}
    if isinstance(edit, AddEffect):
        return {
            "kind": "add_effect",
            "action": edit.action,
            "tendency": edit.tendency,
            "property": edit.property,
        }
    if isinstance(edit, RemoveEffect):
        return {"kind": "remove_effect", "action": edit.action, "property": edit.property}
    if isinstance(edit, SetProperty):
        return {"kind": "set_property", "name": edit.name, "value": edit.value}
    raise TypeError(f"not an edit: {edit!r}")


def edit_from_json(d):
    kind = d.get("kind")
    if kind == "assert_clause":
        return AssertClause(parse_clause(d["text"]))
    if kind == "retract_clause":
        return RetractClause(parse_clause(d["text"]))
    if kind == "add_effect":
        return AddEffect(d["action"], d["tendency"], d["property"])
    if kind == "remove_effect":
        return RemoveEffect(d["action"], d["property"])
    if kind == "set_property":
        return SetProperty(d["name"], d["value"])
    raise ValidationError(f"unknown edit kind {kind!r}")


@dataclass
class _QueuedEdit:
    seq: int
    scope: str  # 'agent' | 'class'
    target: str
    edit: object


# --- agents ------------------------------------------------------------------------

class AgentInstance:
    def __init__(self, name, cls: ast.AgentClass, store, db, entity_id):
        self.name = name
        self.cls = cls
        self.store = store
        self.db = db
        self.entity_id = entity_id
        self.annotations: Dict[str, list] = {a.name: list(a.effects) for a in cls.actions}
        self.cycle: Optional[_Cycle] = None
        self.restart = False
        self.diverged_predicates = set()
        self.diverged_actions = set()
        self.diverged_props = set()
        self.perception_last_tick: Dict[str, int] = {}
        self.perception_counts: Dict[str, int] = {p.name: 0 for p in cls.perceptions}
        self.last_explanation: Optional[Explanation] = None
        # per-tick accumulators
        self._tick_perceptions: List[str] = []
        self._tick_errors: List[str] = []

    def live_actions(self):
        return [replace(a, effects=tuple(self.annotations[a.name])) for a in self.cls.actions]

    def action_names(self):
        return {a.name for a in self.cls.actions}


class _Cycle:
    def __init__(self, resolver, started_tick):
        self.phase = "main"
        self.resolver: Resolver = resolver
        self.started_tick = started_tick
        self.main_status = None
        self.main_proof = None
        self.main_blocked = []
        self.direct = set()
        self.intend_pairs = []  # (tendency, property, origin clause text)
        self.intend_truncated = False
        self.errors: List[str] = []


@dataclass
class Explanation:
    agent: str
    tick: int
    main_status: str
    proof: Optional[dict]
    blocked: list  # BlockedLiteral
    intentions: list  # Intention
    selection: object  # ActionSelection
    errors: list

    def to_json(self):
        sel = self.selection
        return {
            "agent": self.agent,
            "tick": self.tick,
            "main_status": self.main_status,
            "proof": self.proof,
            "blocked": [
                {
                    "property": b.property,
                    "polarity": b.polarity,
                    "rule": None if b.rule is None else clause_text(b.rule),
                }
                for b in self.blocked
            ],
            "intentions": [
                {
                    "tendency": i.tendency,
                    "property": i.property,
                    "origin": intention_origin_text(i),
                }
                for i in self.intentions
            ],
            "selection": {
                "direct": list(sel.direct),
                "solved": list(sel.solved),
                "scores": dict(sel.scores),
                "served": {
                    name: [
                        {
                            "tendency": i.tendency,
                            "property": i.property,
                            "origin": intention_origin_text(i),
                        }
                        for i in served
                    ]
                    for name, served in sel.served.items()
                },
                "exact": sel.exact,
            },
            "errors": list(self.errors),
            "text": self.to_text(),
        }

    def to_text(self):
        lines = [f"agent {self.agent} — decision cycle completed at tick {self.tick}"]
        lines.append(f"goal main: {'proven' if self.main_status == SUCCEEDED else 'unprovable'}")
        if self.proof is not None:
            _proof_lines(self.proof, 1, lines)
        for b in self.blocked:
            want = "false" if b.polarity == "required-false" else "true"
            where = f" (in rule: {clause_text(b.rule)})" if b.rule is not None else ""
            lines.append(f"blocked: {b.property} must be {want}{where}")
        if self.intentions:
            lines.append("intentions:")
            for i in self.intentions:
                lines.append(f"  {i.tendency} {i.property} [{intention_origin_text(i)}]")
        else:
            lines.append("intentions: none")
        sel = self.selection
        lines.append(f"direct actions: {', '.join(sel.direct) if sel.direct else 'none'}")
        if sel.solved:
            for name in sel.solved:
                served = sel.served.get(name, ())
                if served:
                    why = "; ".join(
                        f"intention {i.tendency} {i.property} ({intention_origin_text(i)})"
                        for i in served
                    )
                    lines.append(
                        f"{name} selected because {why} [score {sel.scores.get(name)}]"
                    )
                else:
                    lines.append(f"{name} selected [score {sel.scores.get(name)}]")
        else:
            lines.append("solver selected: none")
        for err in self.errors:
            lines.append(f"error: {err}")
        return "\n".join(lines)


def _proof_lines(node, depth, lines):
    pad = "  " * depth
    label = node.get("literal")
    via = node.get("via")
    if label is not None:
        note = ""
        if via == "clause":
            note = f"  [rule: {node['clause']}]"
        elif via == "naf":
            note = "  [negation as failure]"
        elif via == "property":
            note = f"  [property = {node['value']!r}]"
        elif via == "builtin":
            note = f"  [builtin {node['builtin']}]"
        lines.append(f"{pad}{label}{note}")
    for c in node.get("children", ()):
        _proof_lines(c, depth + (0 if label is None else 1), lines)


# --- body context -----------------------------------------------------------------

class _AgentBodyContext(BodyContext):
    def __init__(self, sim, agent, tick):
        self.sim = sim
        self.agent = agent
        self.tick = tick

    def read_prop(self, name):
        return self.agent.store.read(name)

    def write_prop(self, name, value):
        self.agent.store.write(name, value, self.tick)

    def call_builtin(self, name, args):
        return self.sim.world.eval_builtin(name, args, self.agent.entity_id)


class _LivePropertyView:
    """Read-only view used by the resolver: live values, perception on demand."""

    def __init__(self, sim, agent):
        self.sim = sim
        self.agent = agent

    def has(self, name):
        return self.agent.store.has(name)

    def read(self, name):
        return self.sim.read_property(self.agent.name, name)


# --- the simulation ------------------------------------------------------------------

class Simulation:
    def __init__(self, classes, world: WorldState, budget=DEFAULT_BUDGET,
                 intend_cap=DEFAULT_INTEND_CAP):
        self.classes: Dict[str, ast.AgentClass] = dict(classes)
        self.world = world
        self.budget = budget
        self.intend_cap = intend_cap
        self.agents: Dict[str, AgentInstance] = {}
        self.tick_index = 0
        self.schedules: List[ast.ScheduleDecl] = []
        self._edit_queue: List[_QueuedEdit] = []
        self._seq = 0
        self.applied_edits: List[dict] = []
        self._class_counters: Dict[str, int] = {}

    # -- construction ----------------------------------------------------

    @classmethod
    def load(cls, program: ast.Program, seed=None, budget=DEFAULT_BUDGET,
             intend_cap=DEFAULT_INTEND_CAP):
        classes = {c.name: c for c in program.classes}
        scenario = program.scenario or ast.Scenario()
        world = WorldState(scenario.width, scenario.height,
                           scenario.seed if seed is None else seed)
        sim = cls(classes, world, budget=budget, intend_cap=intend_cap)
        for inst in scenario.instances:
            if inst.class_name not in classes:
                raise ValidationError(f"scenario spawns unknown class {inst.class_name!r}")
            sim.spawn_agent(inst.class_name, inst.name, dict(inst.overrides), inst.pos)
        for th in scenario.things:
            for _ in range(th.count):
                world.add_entity(th.kind, th.pos)
        for sch in scenario.schedules:
            klass = classes.get(sch.class_name)
            if klass is None:
                raise ValidationError(f"schedule for unknown class {sch.class_name!r}")
            if klass.perception(sch.perception) is None:
                raise ValidationError(
                    f"schedule for unknown perception {sch.class_name}.{sch.perception}"
                )
            sim.schedules.append(sch)
        return sim

    def spawn_agent(self, class_name, name=None, overrides=None, pos=None) -> str:
        klass = self.classes.get(class_name)
        if klass is None:
            raise UnknownClass(class_name)
        if name is None:
            n = self._class_counters.get(class_name, 0) + 1
            while f"{class_name}{n}" in self.agents or f"{class_name}{n}" in self.classes:
                n += 1
            self._class_counters[class_name] = n
            name = f"{class_name}{n}"
        if name in self.agents:
            raise ValidationError(f"agent name {name!r} already in use")
        if name in self.classes:
            raise ValidationError(f"agent name {name!r} collides with a class name")
        store = PropertyStore(klass.properties, overrides, tick=self.tick_index)
        entity_id = self.world.add_entity(class_name, pos)
        agent = AgentInstance(name, klass, store, ClauseDb(klass.rules), entity_id)
        self.agents[name] = agent
        return name

    # -- property consultation (the getProperty builtin) --------------------

    def read_property(self, agent_name, name, current_tick=None):
        agent = self.agents.get(agent_name)
        if agent is None:
            raise UnknownTarget(agent_name)
        tick = self.tick_index if current_tick is None else current_tick
        store = agent.store
        if not store.has(name):
            raise UnknownProperty(name)
        if store.last_write_tick(name) < tick:
            for pc in agent.cls.perceptions:
                if name in pc.provides and agent.perception_last_tick.get(pc.name, -1) < tick:
                    self._run_perception(agent, pc, tick)
        return store.read(name)

    def _run_perception(self, agent, pc: ast.PerceptionDecl, tick):
        agent.perception_last_tick[pc.name] = tick
        agent.perception_counts[pc.name] += 1
        agent._tick_perceptions.append(pc.name)
        ctx = _AgentBodyContext(self, agent, tick)
        with agent.store.context("perception"):
            try:
                run_body(pc.body, ctx)
            except BodyRuntimeError as e:
                agent._tick_errors.append(f"perception {pc.name}: {e}")

    # -- edits ---------------------------------------------------------------

    def queue_edit(self, target, edit) -> int:
        scope = self._resolve_target(target)
        self._validate_edit(scope, target, edit)
        self._seq += 1
        self._edit_queue.append(_QueuedEdit(self._seq, scope, target, edit))
        return self._seq

    def _resolve_target(self, target):
        if target in self.agents:
            return "agent"
        if target in self.classes:
            return "class"
        raise UnknownTarget(target)

    def _validate_edit(self, scope, target, edit):
        klass = self.agents[target].cls if scope == "agent" else self.classes[target]
        prop_names = set(klass.property_names())
        if isinstance(edit, (AssertClause, RetractClause)):
            clause = edit.clause if isinstance(edit, AssertClause) else edit.pattern
            name, _ = clause.indicator
            if name in prop_names:
                raise ValidationError(
                    f"clause head {name!r} names a property (properties are read-only facts)"
                )
            if name in RESERVED_PREDICATES:
                raise ValidationError(f"clause head {name!r} is a reserved predicate")
            return
        if isinstance(edit, (AddEffect, RemoveEffect)):
            if klass.action(edit.action) is None:
                raise ValidationError(f"no action {edit.action!r} on {klass.name!r}")
            if edit.property not in prop_names:
                raise ValidationError(f"effect on undeclared property {edit.property!r}")
            if isinstance(edit, AddEffect):
                if edit.tendency not in ast.TENDENCIES:
                    raise ValidationError(f"unknown tendency {edit.tendency!r}")
                effects = (
                    self.agents[target].annotations[edit.action]
                    if scope == "agent"
                    else klass.action(edit.action).effects
                )
                if any(e.property == edit.property for e in effects):
                    raise ValidationError(
                        f"action {edit.action!r} already declares an effect on "
                        f"{edit.property!r} (remove it first)"
                    )
            return
        if isinstance(edit, SetProperty):
            if edit.name not in prop_names:
                raise ValidationError(f"unknown property {edit.name!r}")
            decl = klass.property_decl(edit.name)
            if _type_tag(edit.value) != _type_tag(decl.initial):
                raise ValidationError(
                    f"property {edit.name!r} is {_type_tag(decl.initial)}, "
                    f"got {edit.value!r}"
                )
            return
        raise ValidationError(f"unknown edit {edit!r}")

    def _drain_edits(self, scope, agent=None):
        applied, remaining = [], []
        for q in self._edit_queue:
            if q.scope == scope and (scope == "class" or q.target == agent.name):
                applied.append(self._apply_edit(q))
            else:
                remaining.append(q)
        self._edit_queue = remaining
        return applied

    def _apply_edit(self, q: _QueuedEdit):
        record = {
            "tick": self.tick_index,
            "seq": q.seq,
            "target": q.target,
            "scope": q.scope,
            "edit": edit_to_json(q.edit),
            "ok": True,
            "error": None,
        }
        try:
            if q.scope == "agent":
                self._apply_agent_edit(self.agents[q.target], q.edit)
            else:
                self._apply_class_edit(q.target, q.edit)
        except (ValidationError, ClauseNotFound, BodyRuntimeError) as e:
            record["ok"] = False
            record["error"] = str(e)
        self.applied_edits.append(record)
        return record

    def _apply_agent_edit(self, agent: AgentInstance, edit):
        agent.restart = True
        if isinstance(edit, AssertClause):
            agent.db.assert_clause(edit.clause)
            agent.diverged_predicates.add(edit.clause.indicator)
        elif isinstance(edit, RetractClause):
            agent.diverged_predicates.add(edit.pattern.indicator)
            agent.db.retract_clause(edit.pattern)
        elif isinstance(edit, AddEffect):
            effects = agent.annotations[edit.action]
            if any(e.property == edit.property for e in effects):
                raise ValidationError(
                    f"action {edit.action!r} already declares an effect on {edit.property!r}"
                )
            effects.append(ast.EffectAnnotation(edit.tendency, edit.property))
            agent.diverged_actions.add(edit.action)
        elif isinstance(edit, RemoveEffect):
            effects = agent.annotations[edit.action]
            kept = [e for e in effects if e.property != edit.property]
            if len(kept) == len(effects):
                raise ValidationError(
                    f"action {edit.action!r} has no effect on {edit.property!r}"
                )
            agent.annotations[edit.action] = kept
            agent.diverged_actions.add(edit.action)
        elif isinstance(edit, SetProperty):
            agent.store.write(edit.name, edit.value, self.tick_index)
            agent.diverged_props.add(edit.name)
        else:
            raise ValidationError(f"unknown edit {edit!r}")

    def _instances_of(self, class_name):
        return [a for a in self.agents.values() if a.cls.name == class_name]

    def _apply_class_edit(self, class_name, edit):
        klass = self.classes[class_name]
        if isinstance(edit, AssertClause):
            self.classes[class_name] = replace(klass, rules=klass.rules + (edit.clause,))
            for agent in self._instances_of(class_name):
                if edit.clause.indicator not in agent.diverged_predicates:
                    agent.db.assert_clause(edit.clause)
                    agent.restart = True
                agent.cls = self.classes[class_name]
        elif isinstance(edit, RetractClause):
            idx = None
            for i, c in enumerate(klass.rules):
                if ClauseDb._matches(c, edit.pattern):
                    idx = i
                    break
            if idx is None:
                raise ClauseNotFound(clause_text(edit.pattern))
            rules = klass.rules[:idx] + klass.rules[idx + 1 :]
            self.classes[class_name] = replace(klass, rules=rules)
            for agent in self._instances_of(class_name):
                if edit.pattern.indicator not in agent.diverged_predicates:
                    try:
                        agent.db.retract_clause(edit.pattern)
                        agent.restart = True
                    except ClauseNotFound:
                        pass
                agent.cls = self.classes[class_name]
        elif isinstance(edit, (AddEffect, RemoveEffect)):
            action = klass.action(edit.action)
            if isinstance(edit, AddEffect):
                if any(e.property == edit.property for e in action.effects):
                    raise ValidationError(
                        f"action {edit.action!r} already declares an effect on {edit.property!r}"
                    )
                new_effects = action.effects + (
                    ast.EffectAnnotation(edit.tendency, edit.property),
                )
            else:
                new_effects = tuple(e for e in action.effects if e.property != edit.property)
                if len(new_effects) == len(action.effects):
                    raise ValidationError(
                        f"action {edit.action!r} has no effect on {edit.property!r}"
                    )
            actions = tuple(
                replace(a, effects=new_effects) if a.name == edit.action else a
                for a in klass.actions
            )
            self.classes[class_name] = replace(klass, actions=actions)
            for agent in self._instances_of(class_name):
                if edit.action not in agent.diverged_actions:
                    agent.annotations[edit.action] = list(new_effects)
                    agent.restart = True
                agent.cls = self.classes[class_name]
        elif isinstance(edit, SetProperty):
            props = tuple(
                replace(p, initial=edit.value) if p.name == edit.name else p
                for p in klass.properties
            )
            self.classes[class_name] = replace(klass, properties=props)
            for agent in self._instances_of(class_name):
                if edit.name not in agent.diverged_props:
                    agent.store.write(edit.name, edit.value, self.tick_index)
                    agent.restart = True
                agent.cls = self.classes[class_name]
        else:
            raise ValidationError(f"unknown edit {edit!r}")

    # -- decision cycle --------------------------------------------------------

    def _new_cycle(self, agent):
        view = _LivePropertyView(self, agent)
        return _Cycle(solve_start(agent.db, _MAIN_GOAL, view), self.tick_index)

    def _advance_decision(self, agent: AgentInstance, arep):
        budget_left = self.budget
        if agent.restart or agent.cycle is None:
            agent.cycle = self._new_cycle(agent)
            agent.restart = False
        cycle = agent.cycle
        store = agent.store
        completed = False

        while budget_left > 0:
            r = cycle.resolver
            if r.status in (SUCCEEDED, FAILED):
                pass  # phase transition below
            else:
                before = r.steps_used
                try:
                    with store.context("decision"):
                        r.solve_step(budget_left)
                except StaleDb:
                    agent.cycle = self._new_cycle(agent)
                    cycle = agent.cycle
                    continue
                budget_left -= r.steps_used - before

            if cycle.phase == "main":
                if r.status == SUCCEEDED:
                    cycle.main_status = SUCCEEDED
                    cycle.main_proof = r.proof
                    cycle.main_blocked = list(r.blocked)
                    cycle.direct = _direct_actions(r.proof, agent.action_names())
                elif r.status == FAILED:
                    cycle.main_status = FAILED
                    cycle.main_blocked = list(r.blocked)
                else:
                    break  # budget exhausted mid-main
                cycle.phase = "intend"
                view = _LivePropertyView(self, agent)
                cycle.resolver = solve_start(agent.db, _INTEND_GOAL, view)
                continue

            # intend phase
            if r.status == SUCCEEDED:
                try:
                    tendency, prop = intend_solution(r.solution)
                    # a second proof of the same intention is not a new one
                    if all((t, p) != (tendency, prop) for t, p, _ in cycle.intend_pairs):
                        detail = _solution_rule_text(r.proof)
                        cycle.intend_pairs.append((tendency, prop, detail))
                except InvalidTendency as e:
                    cycle.errors.append(str(e))
                if len(cycle.intend_pairs) >= self.intend_cap:
                    cycle.intend_truncated = True
                    completed = True
                    break
                r.continue_search()
                continue
            if r.status == FAILED:
                completed = True
                break
            break  # budget exhausted mid-intend

        arep["steps"] = self.budget - budget_left
        return completed

    def _complete_cycle(self, agent: AgentInstance, arep):
        cycle = agent.cycle
        try:
            intentions = derive_intentions(cycle.intend_pairs, cycle.main_blocked)
        except InvalidTendency as e:  # defensive; pairs are pre-validated
            cycle.errors.append(str(e))
            intentions = derive_intentions((), cycle.main_blocked)
        live = agent.live_actions()
        selection = select_action_set(live, intentions)
        selection = with_direct(selection, sorted(cycle.direct), live, intentions)

        chosen = set(selection.direct) | set(selection.solved)
        ran = []
        ctx = _AgentBodyContext(self, agent, self.tick_index)
        for action in live:
            if action.name not in chosen:
                continue
            ran.append(action.name)
            with agent.store.context("action"):
                try:
                    run_body(action.body, ctx)
                except BodyRuntimeError as e:
                    agent._tick_errors.append(f"action {action.name}: {e}")

        agent.last_explanation = Explanation(
            agent=agent.name,
            tick=self.tick_index,
            main_status=cycle.main_status,
            proof=None if cycle.main_proof is None else cycle.main_proof.to_dict(),
            blocked=list(cycle.main_blocked),
            intentions=list(intentions),
            selection=selection,
            errors=list(cycle.errors),
        )
        agent.cycle = None

        arep["cycle_completed"] = True
        arep["main_status"] = cycle.main_status
        arep["direct"] = list(selection.direct)
        arep["intentions"] = [[i.tendency, i.property] for i in intentions]
        arep["blocked"] = [[b.property, b.polarity] for b in cycle.main_blocked]
        arep["solved"] = list(selection.solved)
        arep["scores"] = {a.name: selection.scores[a.name] for a in live}
        arep["exact"] = selection.exact
        arep["intend_truncated"] = cycle.intend_truncated
        arep["actions_run"] = ran
        if cycle.errors:
            agent._tick_errors.extend(cycle.errors)

    # -- tick --------------------------------------------------------------------

    def tick(self) -> dict:
        self.tick_index += 1
        before = {name: a.store.snapshot() for name, a in self.agents.items()}
        edits = self._drain_edits("class")
        agents_report = {}

        for agent in list(self.agents.values()):
            agent._tick_perceptions = []
            agent._tick_errors = []
            arep = {
                "alive": True,
                "cycle_completed": False,
                "steps": 0,
                "main_status": None,
                "direct": [],
                "intentions": [],
                "blocked": [],
                "solved": [],
                "scores": {},
                "exact": True,
                "intend_truncated": False,
                "actions_run": [],
                "perceptions_run": [],
                "deltas": {},
                "errors": [],
            }
            agents_report[agent.name] = arep
            entity = self.world.entity(agent.entity_id)
            if entity is None or not entity.alive:
                arep["alive"] = False
                continue

            edits.extend(self._drain_edits("agent", agent))
            for sch in self.schedules:
                if sch.class_name == agent.cls.name and self.tick_index % sch.every == 0:
                    pc = agent.cls.perception(sch.perception)
                    if pc is not None and agent.perception_last_tick.get(pc.name, -1) < self.tick_index:
                        self._run_perception(agent, pc, self.tick_index)

            completed = self._advance_decision(agent, arep)
            if not completed:
                cycle = agent.cycle
                if cycle is not None:
                    arep["main_status"] = cycle.main_status or cycle.resolver.status
            else:
                self._complete_cycle(agent, arep)

            base = before.get(agent.name, {})
            now = agent.store.snapshot()
            deltas = {}
            for key in now:
                if key not in base or base[key] != now[key]:
                    deltas[key] = [base.get(key), now[key]]
            arep["deltas"] = deltas
            arep["perceptions_run"] = list(agent._tick_perceptions)
            arep["errors"] = list(agent._tick_errors)

        return {
            "tick": self.tick_index,
            "agents": agents_report,
            "edits": edits,
            "entities": self.world.snapshot(),
        }

    # -- inspection -----------------------------------------------------------------

    def explain(self, agent_name) -> Explanation:
        agent = self.agents.get(agent_name)
        if agent is None:
            raise UnknownTarget(agent_name)
        if agent.last_explanation is None:
            raise NoCycleYet(agent_name)
        return agent.last_explanation

    def agent_source(self, class_name) -> str:
        klass = self.classes.get(class_name)
        if klass is None:
            raise UnknownTarget(class_name)
        return class_text(klass)

    def snapshot(self) -> dict:
        agents = {}
        for name, a in self.agents.items():
            entity = self.world.entity(a.entity_id)
            sel = None
            if a.last_explanation is not None:
                s = a.last_explanation.selection
                sel = {"direct": list(s.direct), "solved": list(s.solved)}
            agents[name] = {
                "class": a.cls.name,
                "alive": bool(entity and entity.alive),
                "pos": None if entity is None else [entity.x, entity.y],
                "props": a.store.snapshot(),
                "last_selection": sel,
                "cycle_status": a.cycle.resolver.status if a.cycle else None,
                "clauses": [clause_text(c) for c in a.db.clauses()],
                "annotations": {
                    name_: [[e.tendency, e.property] for e in effs]
                    for name_, effs in a.annotations.items()
                },
            }
        return {
            "tick": self.tick_index,
            "world": {
                "width": self.world.width,
                "height": self.world.height,
                "entities": self.world.snapshot(),
            },
            "agents": agents,
        }


def _direct_actions(proof_root, action_names):
    out = set()

    def walk(node):
        lit = node.literal
        if (
            lit is not None
            and not lit.negated
            and isinstance(lit.term, Atom)
            and lit.term.name in action_names
            and node.via[0] == "clause"
        ):
            out.add(lit.term.name)
        for c in node.children:
            walk(c)

    if proof_root is not None:
        walk(proof_root)
    return out


def _solution_rule_text(proof):
    if proof is None or not proof.children:
        return None
    via = proof.children[0].via
    if via[0] == "clause":
        return clause_text(via[1])
    return None
