"""intentsim: intentional agents with live in-line prototyping.

Behaviour is declared in three layers: Horn-clause rules decide, tendency
annotations (ensure:/provide:) give actions and perceptions their meaning,
and small imperative bodies do the side effects. A resumable inference
engine proves each agent's goal under a step budget, blocked property
literals and explicit intend/2 solutions become intentions, and a
qualitative solver picks the best non-conflicting action set. Rules,
annotations and properties are all editable while the simulation runs.
"""

from .ast import (
    ActionDecl,
    AgentClass,
    EffectAnnotation,
    PerceptionDecl,
    Program,
    PropertyDecl,
    Scenario,
    TENDENCIES,
)
from .inference import (
    BlockedLiteral,
    ClauseDb,
    ClauseNotFound,
    Resolver,
    SolveResult,
    StaleDb,
    StaticProps,
    solve_all,
    solve_start,
    solve_step,
    unify,
)
from .parser import ParseError, ValidationError, parse_clause, parse_program, parse_query
from .pretty import class_text, program_text
from .runtime import (
    AddEffect,
    AssertClause,
    Explanation,
    NoCycleYet,
    PropertyStore,
    ReadOnlyViolation,
    RemoveEffect,
    RetractClause,
    SetProperty,
    Simulation,
    UnknownClass,
    UnknownProperty,
    UnknownTarget,
)
from .session import SimulationSession
from .solver import (
    ActionSelection,
    Intention,
    InvalidTendency,
    derive_intentions,
    score_action,
    select_action_set,
)
from .terms import Atom, Clause, Literal, Num, Struct, Var
from .world import WorldState

__version__ = "0.1.0"

__all__ = [
    "ActionDecl", "ActionSelection", "AddEffect", "AgentClass", "AssertClause",
    "Atom", "BlockedLiteral", "Clause", "ClauseDb", "ClauseNotFound",
    "EffectAnnotation", "Explanation", "Intention", "InvalidTendency", "Literal",
    "NoCycleYet", "Num", "ParseError", "PerceptionDecl", "Program", "PropertyDecl",
    "PropertyStore", "ReadOnlyViolation", "RemoveEffect", "Resolver",
    "RetractClause", "Scenario", "SetProperty", "SimulationSession", "Simulation",
    "SolveResult", "StaleDb", "StaticProps", "Struct", "TENDENCIES",
    "UnknownClass", "UnknownProperty", "UnknownTarget", "ValidationError", "Var",
    "WorldState", "class_text", "derive_intentions", "parse_clause",
    "parse_program", "parse_query", "program_text", "score_action",
    "select_action_set", "solve_all", "solve_start", "solve_step", "unify",
]
