"""Recursive-descent parser for the .iag behaviour language.

The grammar is documented in docs/grammar.md; it is the compatibility
contract for every front end (CLI, REPL, service, UI editor). The parser
is pure: no global state, same input, same tree.
"""

from __future__ import annotations

from typing import List

from . import ast
from .terms import Atom, Clause, Literal, Num, Struct, Var

RESERVED_PREDICATES = ("not", "getProperty", "lt", "gt", "eq")


class ParseError(Exception):
    """Syntax error with a source position."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ValidationError(ParseError):
    """The program is well-formed but violates a static rule."""


# --- lexer ---------------------------------------------------------------------

_PUNCT2 = (":-", "==", "!=", "<=", ">=")
_PUNCT1 = "{}(),.:=<>+-*/;"


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind  # ident | var | num | str | punct | eof
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.col})"


def _lex(source: str) -> List[Token]:
    toks = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(msg):
        raise ParseError(msg, line, col)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "var" if (word[0].isupper() or word[0] == "_") else "ident"
            toks.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
                value = float(source[i:j])
            else:
                value = int(source[i:j])
            toks.append(Token("num", value, start_line, start_col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    err("unterminated string")
                if source[j] == "\\" and j + 1 < n:
                    buf.append(source[j + 1])
                    j += 2
                else:
                    buf.append(source[j])
                    j += 1
            if j >= n:
                err("unterminated string")
            toks.append(Token("str", "".join(buf), start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        two = source[i : i + 2]
        if two in _PUNCT2:
            toks.append(Token("punct", two, start_line, start_col))
            i += 2
            col += 2
            continue
        if c in _PUNCT1:
            toks.append(Token("punct", c, start_line, start_col))
            i += 1
            col += 1
            continue
        err(f"unexpected character {c!r}")
    toks.append(Token("eof", None, line, col))
    return toks


# --- parser --------------------------------------------------------------------

class _Parser:
    def __init__(self, source):
        self.toks = _lex(source)
        self.pos = 0

    @property
    def cur(self):
        return self.toks[self.pos]

    def err(self, msg, tok=None):
        tok = tok or self.cur
        raise ParseError(msg, tok.line, tok.col)

    def at(self, kind, value=None):
        t = self.cur
        return t.kind == kind and (value is None or t.value == value)

    def at_word(self, word):
        return self.at("ident", word)

    def advance(self):
        t = self.cur
        if t.kind != "eof":
            self.pos += 1
        return t

    def expect(self, kind, value=None, what=None):
        if not self.at(kind, value):
            want = what or (value if value is not None else kind)
            self.err(f"expected {want!r}, found {self._describe()}")
        return self.advance()

    def expect_word(self, word):
        return self.expect("ident", word)

    def _describe(self):
        t = self.cur
        if t.kind == "eof":
            return "end of input"
        return repr(t.value)

    def span(self, tok=None):
        t = tok or self.cur
        return ast.Span(t.line, t.col)

    # -- program ----------------------------------------------------------

    def program(self):
        classes = []
        scenario = None
        while not self.at("eof"):
            if self.at_word("agent"):
                tok = self.cur
                cls = self.agent_class()
                if any(c.name == cls.name for c in classes):
                    raise ValidationError(
                        f"duplicate agent class {cls.name!r}", tok.line, tok.col
                    )
                classes.append(cls)
            elif self.at_word("scenario"):
                if scenario is not None:
                    self.err("only one scenario block per file")
                scenario = self.scenario()
            else:
                self.err(f"expected 'agent' or 'scenario', found {self._describe()}")
        return ast.Program(tuple(classes), scenario)

    def agent_class(self):
        span = self.span()
        self.expect_word("agent")
        name = self.ident("agent class name")
        self.expect("punct", "{")
        properties, perceptions, actions, rules = [], [], [], []
        while not self.at("punct", "}"):
            if self.at_word("property"):
                properties.append(self.property_decl())
            elif self.at_word("rules"):
                rules.extend(self.rules_block())
            elif self.at_word("perception"):
                perceptions.append(self.perception_decl())
            elif self.at_word("action"):
                actions.append(self.action_decl())
            else:
                self.err(
                    "expected 'property', 'rules', 'perception' or 'action', "
                    f"found {self._describe()}"
                )
        self.expect("punct", "}")
        cls = ast.AgentClass(
            name,
            tuple(properties),
            tuple(perceptions),
            tuple(actions),
            tuple(rules),
            span=span,
        )
        return validate_class(cls)

    def ident(self, what):
        if not self.at("ident"):
            self.err(f"expected {what}, found {self._describe()}")
        return self.advance().value

    def property_decl(self):
        span = self.span()
        self.expect_word("property")
        name = self.ident("property name")
        self.expect("punct", "=")
        value = self.value()
        return ast.PropertyDecl(name, value, span)

    def value(self):
        t = self.cur
        if t.kind == "num":
            return self.advance().value
        if t.kind == "punct" and t.value == "-":
            self.advance()
            if not self.at("num"):
                self.err("expected a number after '-'")
            return -self.advance().value
        if t.kind == "str":
            return self.advance().value
        if t.kind == "ident":
            word = self.advance().value
            if word == "true":
                return True
            if word == "false":
                return False
            return word  # bare symbol
        self.err(f"expected a value, found {self._describe()}")

    # -- rules ------------------------------------------------------------

    def rules_block(self):
        self.expect_word("rules")
        self.expect("punct", "{")
        clauses = []
        while not self.at("punct", "}"):
            clauses.append(self.clause())
        self.expect("punct", "}")
        return clauses

    def clause(self):
        head_tok = self.cur
        head = self.term()
        if not isinstance(head, (Atom, Struct)):
            self.err("clause head must be an atom or a compound term", head_tok)
        if isinstance(head, Struct) and head.name == "not":
            self.err("clause head may not be negated", head_tok)
        body = []
        if self.at("punct", ":-"):
            self.advance()
            body.append(self.literal())
            while self.at("punct", ","):
                self.advance()
                body.append(self.literal())
        self.expect("punct", ".", what="'.' at end of clause")
        return Clause(head, tuple(body))

    def literal(self):
        if self.at_word("not"):
            tok = self.advance()
            self.expect("punct", "(")
            inner = self.term()
            if self.at("punct", ","):
                self.err("not/1 takes a single goal", tok)
            self.expect("punct", ")")
            return Literal(inner, negated=True)
        return Literal(self.term())

    def term(self):
        t = self.cur
        if t.kind == "var":
            self.advance()
            return Var(t.value)
        if t.kind == "num":
            self.advance()
            return Num(t.value)
        if t.kind == "punct" and t.value == "-":
            self.advance()
            if not self.at("num"):
                self.err("expected a number after '-'")
            return Num(-self.advance().value)
        if t.kind == "str":
            self.advance()
            return Atom(t.value)
        if t.kind == "ident":
            self.advance()
            if self.at("punct", "("):
                self.advance()
                args = [self.term()]
                while self.at("punct", ","):
                    self.advance()
                    args.append(self.term())
                self.expect("punct", ")")
                return Struct(t.value, tuple(args))
            return Atom(t.value)
        self.err(f"expected a term, found {self._describe()}")

    # -- methods ----------------------------------------------------------

    def perception_decl(self):
        span = self.span()
        self.expect_word("perception")
        name = self.ident("perception name")
        self.expect_word("provide")
        self.expect("punct", ":")
        provides = [self.ident("property name")]
        while self.at("punct", ","):
            self.advance()
            provides.append(self.ident("property name"))
        body = self.block()
        return ast.PerceptionDecl(name, tuple(provides), body, span)

    def action_decl(self):
        span = self.span()
        self.expect_word("action")
        name = self.ident("action name")
        effects = []
        if self.at_word("ensure"):
            self.advance()
            self.expect("punct", ":")
            effects.append(self.effect())
            while self.at("punct", ","):
                self.advance()
                effects.append(self.effect())
        body = self.block()
        return ast.ActionDecl(name, tuple(effects), body, span)

    def effect(self):
        tok = self.cur
        tendency = self.ident("tendency")
        if tendency not in ast.TENDENCIES:
            raise ValidationError(
                f"unknown tendency {tendency!r} (expected one of {', '.join(ast.TENDENCIES)})",
                tok.line,
                tok.col,
            )
        prop = self.ident("property name")
        return ast.EffectAnnotation(tendency, prop)

    # -- imperative bodies --------------------------------------------------

    def block(self):
        self.expect("punct", "{")
        stmts = []
        while not self.at("punct", "}"):
            stmts.append(self.stmt())
        self.expect("punct", "}")
        return tuple(stmts)

    def stmt(self):
        if self.at("punct", ";"):
            self.advance()
            return self.stmt()
        span = self.span()
        if self.at_word("self"):
            self.advance()
            self.expect("punct", ".")
            prop = self.ident("property name")
            self.expect("punct", "=")
            value = self.expr()
            if self.at("punct", ";"):
                self.advance()
            return ast.Assign(prop, value, span)
        if self.at_word("if"):
            self.advance()
            cond = self.expr()
            then = self.block()
            orelse = ()
            if self.at_word("else"):
                self.advance()
                orelse = self.block()
            return ast.If(cond, then, orelse, span)
        if self.at("ident"):
            name_tok = self.advance()
            if not self.at("punct", "("):
                self.err("expected '(' (a statement is an assignment, an if, or a call)")
            call = self.call_args(name_tok.value)
            if self.at("punct", ";"):
                self.advance()
            return ast.CallStmt(call, span)
        self.err(f"expected a statement, found {self._describe()}")

    def call_args(self, name):
        self.expect("punct", "(")
        args = []
        if not self.at("punct", ")"):
            args.append(self.expr())
            while self.at("punct", ","):
                self.advance()
                args.append(self.expr())
        self.expect("punct", ")")
        return ast.Call(name, tuple(args))

    def expr(self):
        return self.or_expr()

    def or_expr(self):
        left = self.and_expr()
        while self.at_word("or"):
            self.advance()
            left = ast.Binary("or", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at_word("and"):
            self.advance()
            left = ast.Binary("and", left, self.not_expr())
        return left

    def not_expr(self):
        if self.at_word("not"):
            self.advance()
            return ast.Unary("not", self.not_expr())
        return self.comparison()

    def comparison(self):
        left = self.additive()
        for op in ("==", "!=", "<=", ">=", "<", ">"):
            if self.at("punct", op):
                self.advance()
                return ast.Binary(op, left, self.additive())
        return left

    def additive(self):
        left = self.multiplicative()
        while self.at("punct", "+") or self.at("punct", "-"):
            op = self.advance().value
            left = ast.Binary(op, left, self.multiplicative())
        return left

    def multiplicative(self):
        left = self.unary()
        while self.at("punct", "*") or self.at("punct", "/"):
            op = self.advance().value
            left = ast.Binary(op, left, self.unary())
        return left

    def unary(self):
        if self.at("punct", "-"):
            self.advance()
            if self.at("num"):  # a negative literal, not an operator application
                return ast.NumLit(-self.advance().value)
            return ast.Unary("-", self.unary())
        return self.primary()

    def primary(self):
        t = self.cur
        if t.kind == "num":
            self.advance()
            return ast.NumLit(t.value)
        if t.kind == "str":
            self.advance()
            return ast.SymLit(t.value)
        if self.at("punct", "("):
            self.advance()
            inner = self.expr()
            self.expect("punct", ")")
            return inner
        if t.kind == "ident":
            if t.value == "true":
                self.advance()
                return ast.BoolLit(True)
            if t.value == "false":
                self.advance()
                return ast.BoolLit(False)
            if t.value == "self":
                self.advance()
                self.expect("punct", ".")
                return ast.PropRead(self.ident("property name"))
            self.advance()
            if self.at("punct", "("):
                return self.call_args(t.value)
            return ast.SymLit(t.value)
        self.err(f"expected an expression, found {self._describe()}")

    # -- scenario -----------------------------------------------------------

    def scenario(self):
        span = self.span()
        self.expect_word("scenario")
        self.expect("punct", "{")
        width = height = 16
        seed = 0
        instances, things, schedules = [], [], []
        names = set()
        while not self.at("punct", "}"):
            if self.at_word("world"):
                self.advance()
                width = self.expect("num").value
                self.expect_word("x")
                height = self.expect("num").value
            elif self.at_word("seed"):
                self.advance()
                seed = self.expect("num").value
            elif self.at_word("spawn"):
                inst = self.instance_decl()
                if inst.name is not None:
                    if inst.name in names:
                        self.err(f"duplicate instance name {inst.name!r}")
                    names.add(inst.name)
                instances.append(inst)
            elif self.at_word("thing"):
                things.append(self.thing_decl())
            elif self.at_word("every"):
                schedules.append(self.schedule_decl())
            else:
                self.err(
                    "expected 'world', 'seed', 'spawn', 'thing' or 'every', "
                    f"found {self._describe()}"
                )
        self.expect("punct", "}")
        return ast.Scenario(
            width, height, seed, tuple(instances), tuple(things), tuple(schedules), span
        )

    def instance_decl(self):
        span = self.span()
        self.expect_word("spawn")
        class_name = self.ident("agent class name")
        name = None
        if self.at("ident") and self.cur.value not in ("at",):
            name = self.advance().value
        pos = self.opt_pos()
        overrides = []
        if self.at("punct", "{"):
            self.advance()
            while not self.at("punct", "}"):
                prop = self.ident("property name")
                self.expect("punct", ":")
                overrides.append((prop, self.value()))
                if self.at("punct", ","):
                    self.advance()
            self.expect("punct", "}")
        return ast.InstanceDecl(class_name, name, pos, tuple(overrides), span)

    def thing_decl(self):
        span = self.span()
        self.expect_word("thing")
        kind = self.ident("entity kind")
        count = 1
        if self.at("punct", "*"):
            self.advance()
            count = self.expect("num").value
        pos = self.opt_pos()
        return ast.ThingDecl(kind, count, pos, span)

    def opt_pos(self):
        if not self.at_word("at"):
            return None
        self.advance()
        self.expect("punct", "(")
        x = self.signed_int()
        self.expect("punct", ",")
        y = self.signed_int()
        self.expect("punct", ")")
        return (x, y)

    def signed_int(self):
        neg = False
        if self.at("punct", "-"):
            self.advance()
            neg = True
        v = self.expect("num").value
        return -v if neg else v

    def schedule_decl(self):
        span = self.span()
        self.expect_word("every")
        tok = self.cur
        n = self.expect("num").value
        if not isinstance(n, int) or n < 1:
            self.err("schedule period must be a positive integer", tok)
        class_name = self.ident("agent class name")
        self.expect("punct", ".")
        perception = self.ident("perception name")
        return ast.ScheduleDecl(class_name, perception, n, span)


# --- validation ------------------------------------------------------------------

def _body_writes(stmts, acc):
    for s in stmts:
        if isinstance(s, ast.Assign):
            acc.append((s.prop, s.span))
        elif isinstance(s, ast.If):
            _body_writes(s.then, acc)
            _body_writes(s.orelse, acc)
    return acc


def validate_class(cls: ast.AgentClass) -> ast.AgentClass:
    """Check AgentClass invariants; returns the class with property_atoms filled."""

    def fail(msg, span):
        raise ValidationError(msg, span.line, span.col)

    props = {}
    for p in cls.properties:
        if p.name in props:
            fail(f"duplicate property {p.name!r}", p.span)
        props[p.name] = p

    methods = {}
    for m in list(cls.perceptions) + list(cls.actions):
        if m.name in methods:
            fail(f"duplicate method name {m.name!r}", m.span)
        if m.name in props:
            fail(f"method {m.name!r} collides with a property name", m.span)
        methods[m.name] = m

    for pc in cls.perceptions:
        for sym in pc.provides:
            if sym not in props:
                fail(f"perception {pc.name!r} provides undeclared property {sym!r}", pc.span)
        for prop, span in _body_writes(pc.body, []):
            if prop not in props:
                fail(f"assignment to undeclared property {prop!r}", span)
            if prop not in pc.provides:
                fail(
                    f"perception {pc.name!r} writes {prop!r} which is not in its provide list",
                    span,
                )

    for a in cls.actions:
        seen = set()
        for e in a.effects:
            if e.property not in props:
                fail(f"effect on undeclared property {e.property!r} in action {a.name!r}", a.span)
            if e.property in seen:
                fail(f"action {a.name!r} declares two effects on {e.property!r}", a.span)
            seen.add(e.property)
        for prop, span in _body_writes(a.body, []):
            if prop not in props:
                fail(f"assignment to undeclared property {prop!r}", span)

    property_atoms = set()
    for clause in cls.rules:
        name, _arity = clause.indicator
        if name in props:
            fail(f"rule head {name!r} names a property (properties are read-only facts)", cls.span)
        if name in RESERVED_PREDICATES:
            fail(f"rule head {name!r} is a reserved predicate", cls.span)
        for lit in clause.body:
            if isinstance(lit.term, Atom) and lit.term.name in props:
                property_atoms.add(lit.term.name)

    return ast.AgentClass(
        cls.name,
        cls.properties,
        cls.perceptions,
        cls.actions,
        cls.rules,
        frozenset(property_atoms),
        cls.span,
    )


# --- public entry points ----------------------------------------------------------

def parse_program(source: str) -> ast.Program:
    """Parse a full .iag file: agent classes plus an optional scenario block."""
    return _Parser(source).program()


def parse_query(source: str):
    """Parse a goal: a comma-separated literal list, optional trailing '.'."""
    p = _Parser(source)
    if p.at("eof"):
        return []
    lits = [p.literal()]
    while p.at("punct", ","):
        p.advance()
        lits.append(p.literal())
    if p.at("punct", "."):
        p.advance()
    p.expect("eof", what="end of query")
    return lits


def parse_clause(source: str) -> Clause:
    """Parse a single clause, as carried by assert/retract payloads."""
    p = _Parser(source)
    head_tok = p.cur
    head = p.term()
    if not isinstance(head, (Atom, Struct)):
        p.err("clause head must be an atom or a compound term", head_tok)
    if isinstance(head, Struct) and head.name == "not":
        p.err("clause head may not be negated", head_tok)
    body = []
    if p.at("punct", ":-"):
        p.advance()
        body.append(p.literal())
        while p.at("punct", ","):
            p.advance()
            body.append(p.literal())
    if p.at("punct", "."):
        p.advance()
    p.expect("eof", what="end of clause")
    return Clause(head, tuple(body))
