"""First-order terms, literals and clauses shared by the parser and the engine.

Terms are immutable; a clause never changes after construction. Variable
renaming (standardizing apart) therefore builds fresh term trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Atom:
    """A symbol: predicate name, property name, or symbolic value."""

    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True)
class Num:
    value: Union[int, float]

    def __repr__(self):
        return f"Num({self.value!r})"


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class Struct:
    name: str
    args: tuple

    def __repr__(self):
        return f"Struct({self.name!r}, {self.args!r})"


Term = Union[Atom, Num, Var, Struct]


@dataclass(frozen=True)
class Literal:
    """A body/goal literal: a term, possibly under negation as failure."""

    term: Term
    negated: bool = False


@dataclass(frozen=True)
class Clause:
    head: Term  # Atom or Struct, never negated
    body: tuple = ()  # tuple[Literal, ...]

    @property
    def indicator(self):
        return indicator(self.head)


def indicator(term):
    """(name, arity) of an Atom or Struct."""
    if isinstance(term, Atom):
        return (term.name, 0)
    if isinstance(term, Struct):
        return (term.name, len(term.args))
    raise TypeError(f"no predicate indicator for {term!r}")


def term_vars(term, acc=None):
    """All variables in a term, in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(term, Var):
        if term not in acc:
            acc.append(term)
    elif isinstance(term, Struct):
        for a in term.args:
            term_vars(a, acc)
    return acc


def literal_vars(lit):
    return term_vars(lit.term)


def clause_vars(clause):
    acc = term_vars(clause.head)
    for lit in clause.body:
        term_vars(lit.term, acc)
    return acc


def rename_term(term, mapping):
    if isinstance(term, Var):
        return mapping[term.name]
    if isinstance(term, Struct):
        return Struct(term.name, tuple(rename_term(a, mapping) for a in term.args))
    return term


def rename_clause(clause, fresh):
    """Standardize a clause apart using `fresh(name) -> Var`."""
    mapping = {v.name: fresh(v.name) for v in clause_vars(clause)}
    head = rename_term(clause.head, mapping)
    body = tuple(Literal(rename_term(l.term, mapping), l.negated) for l in clause.body)
    return Clause(head, body)


def literal_match_term(lit):
    """Term form used when unifying literals (retract patterns).

    Negation is reified as a not/1 struct so a variable literal in a
    pattern can match a negated literal in a stored clause.
    """
    if lit.negated:
        return Struct("not", (lit.term,))
    return lit.term


_IDENT_OK = set("abcdefghijklmnopqrstuvwxyz0123456789_ABCDEFGHIJKLMNOPQRSTUVWXYZ")


def _atom_text(name):
    if name and name[0].islower() and all(c in _IDENT_OK for c in name):
        return name
    return '"' + name.replace('"', '\\"') + '"'


def term_text(term):
    if isinstance(term, Atom):
        return _atom_text(term.name)
    if isinstance(term, Num):
        return repr(term.value)
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Struct):
        return f"{term.name}({', '.join(term_text(a) for a in term.args)})"
    raise TypeError(f"not a term: {term!r}")


def literal_text(lit):
    if lit.negated:
        return f"not({term_text(lit.term)})"
    return term_text(lit.term)


def clause_text(clause):
    if not clause.body:
        return f"{term_text(clause.head)}."
    body = ", ".join(literal_text(l) for l in clause.body)
    return f"{term_text(clause.head)} :- {body}."


def value_to_term(value):
    """Property value (bool | number | symbol string) -> term."""
    if isinstance(value, bool):
        return Atom("true") if value else Atom("false")
    if isinstance(value, (int, float)):
        return Num(value)
    if isinstance(value, str):
        return Atom(value)
    raise TypeError(f"not a property value: {value!r}")


def term_to_value(term):
    """Inverse of value_to_term; returns None for non-value terms."""
    if isinstance(term, Atom):
        if term.name == "true":
            return True
        if term.name == "false":
            return False
        return term.name
    if isinstance(term, Num):
        return term.value
    return None
