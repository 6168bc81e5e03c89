"""Syntax tree for the .iag behaviour language.

Three layers per agent class: declarative rules (Horn clauses), the
intentional link (provide/ensure annotations), and imperative bodies in a
small statement language. Spans only serve diagnostics and are excluded
from structural equality so pretty-print round-trips compare clean.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .terms import Clause

TENDENCIES = ("increase", "reduce", "maintain", "independent")
DIRECTIONAL = ("increase", "reduce")

OPPOSITE = {"increase": "reduce", "reduce": "increase"}


@dataclass(frozen=True)
class Span:
    line: int
    col: int


_NO_SPAN = Span(0, 0)


# --- imperative mini-language -------------------------------------------------

@dataclass(frozen=True)
class NumLit:
    value: Union[int, float]


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class SymLit:
    value: str


@dataclass(frozen=True)
class PropRead:
    name: str  # self.<name>


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Unary:
    op: str  # '-' | 'not'
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / == != < <= > >= and or
    left: "Expr"
    right: "Expr"


Expr = Union[NumLit, BoolLit, SymLit, PropRead, Call, Unary, Binary]


@dataclass(frozen=True)
class Assign:
    prop: str
    value: Expr
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple = ()
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class CallStmt:
    call: Call
    span: Span = field(default=_NO_SPAN, compare=False)


Stmt = Union[Assign, If, CallStmt]


# --- declarations -------------------------------------------------------------

Value = Union[bool, int, float, str]  # str = symbol


@dataclass(frozen=True)
class PropertyDecl:
    name: str
    initial: Value
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class EffectAnnotation:
    tendency: str  # one of TENDENCIES
    property: str


@dataclass(frozen=True)
class PerceptionDecl:
    name: str
    provides: Tuple[str, ...]
    body: tuple = ()
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class ActionDecl:
    name: str
    effects: Tuple[EffectAnnotation, ...] = ()
    body: tuple = ()
    span: Span = field(default=_NO_SPAN, compare=False)

    def effect_on(self, prop):
        for e in self.effects:
            if e.property == prop:
                return e
        return None


@dataclass(frozen=True)
class AgentClass:
    name: str
    properties: Tuple[PropertyDecl, ...] = ()
    perceptions: Tuple[PerceptionDecl, ...] = ()
    actions: Tuple[ActionDecl, ...] = ()
    rules: Tuple[Clause, ...] = ()
    # 0-arity atoms used in rule bodies that name a declared property,
    # enumerated statically at parse time.
    property_atoms: frozenset = frozenset()
    span: Span = field(default=_NO_SPAN, compare=False)

    def property_names(self):
        return tuple(p.name for p in self.properties)

    def property_decl(self, name):
        for p in self.properties:
            if p.name == name:
                return p
        return None

    def perception(self, name):
        for p in self.perceptions:
            if p.name == name:
                return p
        return None

    def action(self, name):
        for a in self.actions:
            if a.name == name:
                return a
        return None


# --- scenario -----------------------------------------------------------------

@dataclass(frozen=True)
class InstanceDecl:
    class_name: str
    name: Optional[str] = None
    pos: Optional[Tuple[int, int]] = None
    overrides: Tuple[Tuple[str, Value], ...] = ()
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class ThingDecl:
    kind: str
    count: int = 1
    pos: Optional[Tuple[int, int]] = None
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class ScheduleDecl:
    class_name: str
    perception: str
    every: int
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Scenario:
    width: int = 16
    height: int = 16
    seed: int = 0
    instances: Tuple[InstanceDecl, ...] = ()
    things: Tuple[ThingDecl, ...] = ()
    schedules: Tuple[ScheduleDecl, ...] = ()
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Program:
    classes: Tuple[AgentClass, ...] = ()
    scenario: Optional[Scenario] = None

    def agent_class(self, name):
        for c in self.classes:
            if c.name == name:
                return c
        return None
