"""Per-agent clause database and resumable SLD resolution.

The resolver is an explicit machine (goal stack, binding trail, choice
points) rather than recursive generators, so a proof can be suspended
after any step, inspected, and resumed later without holding a Python
stack. One step is exactly one of:

  * trying one clause against the selected literal (head unification,
    whether it succeeds or fails),
  * evaluating one builtin, property read, or negation dispatch,
  * one backtrack transition (retrying or popping the top choice point),
  * one step of a negation-as-failure sub-proof (delegated).

Negation as failure runs a nested resolver over the same database and
property view; its bindings and blocked-literal log are private and are
discarded, because a property failing *inside* a not(...) makes the
negation succeed and is no evidence against the outer goal.

Property reads happen at the instant of the step that needs them, through
the caller-supplied view, so values may legitimately differ between steps.
A 0-arity atom naming a declared property is resolved against the store
only (sugar for getProperty(name, true)); when such a literal fails, the
required polarity is appended to the blocked log.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from .terms import (
    Atom,
    Clause,
    Literal,
    Num,
    Struct,
    Var,
    clause_text,
    indicator,
    literal_match_term,
    rename_clause,
    term_text,
    term_vars,
    value_to_term,
)

RUNNING = "running"
SUSPENDED = "suspended"
SUCCEEDED = "succeeded"
FAILED = "failed"

REQUIRED_TRUE = "required-true"
REQUIRED_FALSE = "required-false"

COMPARISONS = {"lt", "gt", "eq"}


class StaleDb(Exception):
    """The clause database changed under a suspended proof; restart the cycle."""


class ClauseNotFound(Exception):
    """retract found no clause unifiable with the pattern."""


class StaticProps:
    """Fixed property view for tests and offline queries."""

    def __init__(self, values: Optional[dict] = None):
        self.values = dict(values or {})

    def has(self, name):
        return name in self.values

    def read(self, name):
        return self.values[name]


# --- clause database -------------------------------------------------------------

class ClauseDb:
    """Ordered Horn clauses grouped by predicate; every edit bumps generation."""

    def __init__(self, clauses=()):
        self._groups: Dict[tuple, List[Clause]] = {}
        self._order: List[tuple] = []  # indicators in first-assertion order
        self.generation = 0
        for c in clauses:
            self._append(c)

    def _append(self, clause):
        key = clause.indicator
        if key not in self._groups:
            self._groups[key] = []
            self._order.append(key)
        self._groups[key].append(clause)

    def assert_clause(self, clause):
        self._append(clause)
        self.generation += 1

    def retract_clause(self, pattern: Clause) -> Clause:
        key = pattern.indicator
        group = self._groups.get(key, [])
        for i, clause in enumerate(group):
            if self._matches(clause, pattern):
                removed = group.pop(i)
                self.generation += 1
                return removed
        raise ClauseNotFound(clause_text(pattern))

    @staticmethod
    def _matches(clause, pattern):
        if len(clause.body) != len(pattern.body):
            return False
        counter = [0]

        def fresh(name):
            counter[0] += 1
            return Var(f"_R{counter[0]}")

        stored = rename_clause(clause, fresh)
        bindings = unify(stored.head, pattern.head)
        if bindings is None:
            return False
        for sl, pl in zip(stored.body, pattern.body):
            bindings = unify(literal_match_term(sl), literal_match_term(pl), bindings)
            if bindings is None:
                return False
        return True

    def matching(self, key):
        return self._groups.get(key, [])

    def clauses(self):
        out = []
        for key in self._order:
            out.extend(self._groups[key])
        return out

    def copy(self):
        db = ClauseDb(self.clauses())
        db.generation = self.generation
        return db

    def __len__(self):
        return sum(len(g) for g in self._groups.values())


# --- unification -------------------------------------------------------------------

def _walk(term, bindings):
    while isinstance(term, Var):
        nxt = bindings.get(term.name)
        if nxt is None:
            return term
        term = nxt
    return term


def _occurs(name, term, bindings):
    term = _walk(term, bindings)
    if isinstance(term, Var):
        return term.name == name
    if isinstance(term, Struct):
        return any(_occurs(name, a, bindings) for a in term.args)
    return False


def _unify_into(a, b, bindings, trail):
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = _walk(x, bindings)
        y = _walk(y, bindings)
        if x == y:
            continue
        if isinstance(x, Var):
            if _occurs(x.name, y, bindings):
                return False
            bindings[x.name] = y
            trail.append(x.name)
        elif isinstance(y, Var):
            if _occurs(y.name, x, bindings):
                return False
            bindings[y.name] = x
            trail.append(y.name)
        elif isinstance(x, Struct) and isinstance(y, Struct):
            if x.name != y.name or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
        else:
            return False  # constant clash or kind mismatch
    return True


def unify(t1, t2, bindings=None):
    """Most general unifier extending `bindings`, or None. Occurs check on."""
    out = dict(bindings) if bindings else {}
    if _unify_into(t1, t2, out, []):
        return out
    return None


def resolve_term(term, bindings):
    """Substitute bindings all the way down."""
    term = _walk(term, bindings)
    if isinstance(term, Struct):
        return Struct(term.name, tuple(resolve_term(a, bindings) for a in term.args))
    return term


# --- proof trees ---------------------------------------------------------------------

class ProofNode:
    """One proven literal. via is ('goal', None) for the synthetic root,
    ('clause', Clause), ('builtin', name), ('property', value) or ('naf', None)."""

    __slots__ = ("literal", "via", "children")

    def __init__(self, literal, via, children=None):
        self.literal = literal
        self.via = via
        self.children = children if children is not None else []

    def copy(self):
        return ProofNode(self.literal, self.via, [c.copy() for c in self.children])

    def to_dict(self, bindings=None):
        lit = self.literal
        if lit is not None and bindings is not None:
            lit = Literal(resolve_term(lit.term, bindings), lit.negated)
        kind, detail = self.via
        d = {"literal": None if lit is None else _literal_text(lit), "via": kind}
        if kind == "clause":
            d["clause"] = clause_text(detail)
        elif kind == "builtin":
            d["builtin"] = detail
        elif kind == "property":
            d["value"] = detail
        d["children"] = [c.to_dict(bindings) for c in self.children]
        return d


def _literal_text(lit):
    if lit.negated:
        return f"not({term_text(lit.term)})"
    return term_text(lit.term)


@dataclass(frozen=True)
class BlockedLiteral:
    """A property-atom whose current value failed a proof branch."""

    property: str
    polarity: str  # REQUIRED_TRUE | REQUIRED_FALSE
    rule: Optional[Clause] = None  # clause whose body contained the literal

    def key(self):
        return (self.property, self.polarity)


# --- the machine ----------------------------------------------------------------------

class _Frame:
    __slots__ = ("lit", "rule", "parent", "next")

    def __init__(self, lit, rule, parent, nxt):
        self.lit = lit
        self.rule = rule  # clause providing generator context (for blocked log)
        self.parent = parent  # ProofNode to attach children to
        self.next = nxt


class _CP:
    __slots__ = ("frame", "trail_mark", "proof_mark", "alts", "idx")

    def __init__(self, frame, trail_mark, proof_mark, alts):
        self.frame = frame
        self.trail_mark = trail_mark
        self.proof_mark = proof_mark
        self.alts = alts
        self.idx = 0


_RUN = "run"
_BACKTRACK = "backtrack"


class Resolver:
    """Suspended, resumable proof state for a goal over one ClauseDb."""

    def __init__(self, db: ClauseDb, goal, props):
        self.db = db
        self.props = props
        self._generation = db.generation
        self.goal = list(goal)
        self.goal_vars = []
        for lit in self.goal:
            for v in term_vars(lit.term):
                if v not in self.goal_vars:
                    self.goal_vars.append(v)

        self._root = ProofNode(None, ("goal", None))
        goals = None
        for lit in reversed(self.goal):
            goals = _Frame(lit, None, self._root, goals)
        self._goals = goals
        self._bindings: Dict[str, object] = {}
        self._trail: List[str] = []
        self._cps: List[_CP] = []
        self._proof_log: List[tuple] = []
        self._mode = _RUN
        self._naf: Optional[Resolver] = None
        self._naf_frame: Optional[_Frame] = None
        self._fresh_n = 0

        self.status = RUNNING
        self.steps_used = 0
        self.blocked: List[BlockedLiteral] = []
        self._blocked_keys = set()
        self.trace_log: List[str] = []
        self.solution: Optional[Dict[str, object]] = None
        self.proof: Optional[ProofNode] = None

        self._check_terminal()

    # -- public surface ----------------------------------------------------

    def solve_step(self, budget: int) -> "Resolver":
        """Advance by at most `budget` steps; property reads are live."""
        if budget < 1:
            raise ValueError("budget must be >= 1")
        if self.status not in (RUNNING, SUSPENDED):
            raise ValueError(f"cannot step a {self.status} resolver")
        if self.db.generation != self._generation:
            raise StaleDb(
                f"database generation {self.db.generation} != {self._generation} at start"
            )
        self.status = RUNNING
        used = 0
        while used < budget and self.status == RUNNING:
            if self._check_terminal():
                break
            self._step()
            used += 1
            self._check_terminal()
        self.steps_used += used
        if self.status == RUNNING:
            self.status = SUSPENDED
        return self

    def continue_search(self):
        """After a solution, backtrack to look for the next one."""
        if self.status != SUCCEEDED:
            raise ValueError("continue_search requires a succeeded resolver")
        if not self._cps:
            self.status = FAILED
            return
        self._mode = _BACKTRACK
        self.status = RUNNING

    # -- internals -----------------------------------------------------------

    def _fresh(self, name):
        self._fresh_n += 1
        return Var(f"_G{self._fresh_n}")

    def _bind_ok(self, a, b):
        return _unify_into(a, b, self._bindings, self._trail)

    def _undo(self, mark):
        while len(self._trail) > mark:
            del self._bindings[self._trail.pop()]

    def _attach(self, parent, node):
        parent.children.append(node)
        self._proof_log.append((parent, node))

    def _truncate_proof(self, mark):
        while len(self._proof_log) > mark:
            parent, node = self._proof_log.pop()
            if parent.children and parent.children[-1] is node:
                parent.children.pop()

    def _fail(self):
        self._mode = _BACKTRACK

    def _block(self, prop, polarity, rule):
        key = (prop, polarity)
        if key not in self._blocked_keys:
            self._blocked_keys.add(key)
            self.blocked.append(BlockedLiteral(prop, polarity, rule))

    def _check_terminal(self):
        if self.status in (SUCCEEDED, FAILED):
            return True
        if self._naf is not None:
            return False
        if self._mode == _RUN and self._goals is None:
            self.solution = {
                v.name: resolve_term(v, self._bindings) for v in self.goal_vars
            }
            self.proof = self._root.copy()
            self.status = SUCCEEDED
            return True
        if self._mode == _BACKTRACK and not self._cps:
            self.status = FAILED
            return True
        return False

    def _step(self):
        if self._naf is not None:
            self._step_naf()
        elif self._mode == _BACKTRACK:
            self._step_backtrack()
        else:
            self._step_expand()

    def _step_naf(self):
        inner = self._naf
        if not inner._check_terminal():
            inner._step()
            inner._check_terminal()
        if inner.status == SUCCEEDED:
            self._naf = None
            self._naf_frame = None
            self._fail()
        elif inner.status == FAILED:
            frame = self._naf_frame
            self._naf = None
            self._naf_frame = None
            self._attach(frame.parent, ProofNode(frame.lit, ("naf", None)))
            self._goals = frame.next

    def _step_backtrack(self):
        cp = self._cps[-1]
        self._goals = cp.frame
        self._undo(cp.trail_mark)
        self._truncate_proof(cp.proof_mark)
        if cp.idx < len(cp.alts):
            self._try_clause(cp)
        else:
            self._cps.pop()

    def _try_clause(self, cp):
        clause = cp.alts[cp.idx]
        cp.idx += 1
        renamed = rename_clause(clause, self._fresh)
        if self._bind_ok(cp.frame.lit.term, renamed.head):
            node = ProofNode(cp.frame.lit, ("clause", clause))
            self._attach(cp.frame.parent, node)
            goals = cp.frame.next
            for blit in reversed(renamed.body):
                goals = _Frame(blit, clause, node, goals)
            self._goals = goals
            self._mode = _RUN
        else:
            self._undo(cp.trail_mark)
            self._mode = _BACKTRACK

    def _step_expand(self):
        frame = self._goals
        lit = frame.lit
        term = _walk(lit.term, self._bindings)

        # normalize a positive not/1 struct into a negated literal
        negated = lit.negated
        if (
            not negated
            and isinstance(term, Struct)
            and term.name == "not"
            and len(term.args) == 1
        ):
            negated = True
            term = _walk(term.args[0], self._bindings)

        if isinstance(term, Var):
            self.trace_log.append(f"uncallable unbound goal {term.name}")
            if negated:
                self._satisfy_naf(frame)
            else:
                self._fail()
            return
        if isinstance(term, Num):
            self.trace_log.append(f"uncallable number goal {term.value!r}")
            self._fail()
            return

        if negated:
            self._expand_negation(frame, term)
        else:
            self._expand_positive(frame, term)

    def _satisfy_naf(self, frame):
        # a floundered not(Var) has no proof of its argument; treat as success
        self._attach(frame.parent, ProofNode(frame.lit, ("naf", None)))
        self._goals = frame.next

    def _expand_negation(self, frame, term):
        if isinstance(term, Atom) and self.props.has(term.name):
            value = self.props.read(term.name)
            if value is True:
                self._block(term.name, REQUIRED_FALSE, frame.rule)
                self._fail()
            else:
                self._attach(frame.parent, ProofNode(frame.lit, ("naf", None)))
                self._goals = frame.next
            return
        goal_term = resolve_term(term, self._bindings)
        if term_vars(goal_term):
            self.trace_log.append(
                f"floundering: not({term_text(goal_term)}) with unbound variables"
            )
        self._naf = Resolver(self.db, [Literal(goal_term)], self.props)
        self._naf_frame = frame

    def _expand_positive(self, frame, term):
        if isinstance(term, Atom) and self.props.has(term.name):
            value = self.props.read(term.name)
            if value is True:
                self._attach(frame.parent, ProofNode(frame.lit, ("property", value)))
                self._goals = frame.next
            else:
                self._block(term.name, REQUIRED_TRUE, frame.rule)
                self._fail()
            return

        key = indicator(term)
        if key == ("getProperty", 2):
            self._builtin_get_property(frame, term)
            return
        if key[1] == 2 and key[0] in COMPARISONS:
            self._builtin_compare(frame, term)
            return

        alts = self.db.matching(key)
        if not alts:
            self.trace_log.append(f"unknown predicate {key[0]}/{key[1]}")
            self._fail()
            return
        cp = _CP(frame, len(self._trail), len(self._proof_log), alts)
        self._cps.append(cp)
        self._try_clause(cp)

    def _builtin_get_property(self, frame, term):
        name_t = _walk(term.args[0], self._bindings)
        if not isinstance(name_t, Atom):
            self.trace_log.append("getProperty/2 requires a bound property name")
            self._fail()
            return
        if not self.props.has(name_t.name):
            self.trace_log.append(f"getProperty: unknown property {name_t.name!r}")
            self._fail()
            return
        value = self.props.read(name_t.name)
        mark = len(self._trail)
        if self._bind_ok(term.args[1], value_to_term(value)):
            self._attach(frame.parent, ProofNode(frame.lit, ("builtin", "getProperty")))
            self._goals = frame.next
        else:
            self._undo(mark)
            self._fail()

    def _builtin_compare(self, frame, term):
        op = term.name
        a = _walk(term.args[0], self._bindings)
        b = _walk(term.args[1], self._bindings)
        if not isinstance(a, Num) or not isinstance(b, Num):
            self.trace_log.append(f"{op}/2 requires numbers, got {term_text(a)}, {term_text(b)}")
            self._fail()
            return
        ok = (
            a.value < b.value
            if op == "lt"
            else a.value > b.value
            if op == "gt"
            else a.value == b.value
        )
        if ok:
            self._attach(frame.parent, ProofNode(frame.lit, ("builtin", op)))
            self._goals = frame.next
        else:
            self._fail()


# --- module-level operations ------------------------------------------------------------

def solve_start(db: ClauseDb, goal, props) -> Resolver:
    """Begin a proof. No property is read until the first solve_step."""
    return Resolver(db, goal, props)


def solve_step(resolver: Resolver, budget: int) -> Resolver:
    return resolver.solve_step(budget)


@dataclass
class SolveResult:
    solutions: list  # list[dict[var name, Term]]
    truncated: bool
    truncated_by: Optional[str]  # 'solutions' | 'steps' | None
    steps_used: int


def solve_all(db, goal, props, max_solutions=64, max_steps=200000) -> SolveResult:
    """Enumerate solutions by backtracking, bounded by both caps."""
    if max_solutions < 1 or max_steps < 1:
        raise ValueError("caps must be >= 1")
    r = solve_start(db, goal, props)
    solutions = []
    while True:
        if r.status == SUCCEEDED:
            solutions.append(r.solution)
            if len(solutions) >= max_solutions:
                return SolveResult(solutions, True, "solutions", r.steps_used)
            r.continue_search()
            continue
        if r.status == FAILED:
            return SolveResult(solutions, False, None, r.steps_used)
        remaining = max_steps - r.steps_used
        if remaining <= 0:
            return SolveResult(solutions, True, "steps", r.steps_used)
        r.solve_step(remaining)
