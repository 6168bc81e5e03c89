"""Canonical text form of parsed programs.

pretty(parse(source)) must reparse to a structurally identical tree; the
service's get_source verb and the UI editor rely on this.
"""

from __future__ import annotations

from . import ast
from .terms import clause_text

_PRECEDENCE = {
    "or": 1,
    "and": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5,
}

_IDENT_OK = set("abcdefghijklmnopqrstuvwxyz0123456789_")


def value_text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if value and value[0] in _IDENT_OK and all(c in _IDENT_OK for c in value):
        return value
    return '"' + value.replace('"', '\\"') + '"'


def expr_text(e, parent_prec=0):
    if isinstance(e, ast.NumLit):
        return repr(e.value)
    if isinstance(e, ast.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ast.SymLit):
        return value_text(e.value)
    if isinstance(e, ast.PropRead):
        return f"self.{e.name}"
    if isinstance(e, ast.Call):
        return f"{e.name}({', '.join(expr_text(a) for a in e.args)})"
    if isinstance(e, ast.Unary):
        # operand parenthesized unconditionally: 'not' binds looser than
        # '-', and a bare -NUM would reparse as a literal
        inner = expr_text(e.operand)
        if e.op == "-":
            return f"-({inner})"
        # 'not' itself sits between 'and' and the comparisons
        text = f"not ({inner})"
        return f"({text})" if parent_prec >= 3 else text
    if isinstance(e, ast.Binary):
        prec = _PRECEDENCE[e.op]
        comparison = e.op in ("==", "!=", "<", "<=", ">", ">=")
        left = expr_text(e.left, prec + 1 if comparison else prec)
        text = f"{left} {e.op} {expr_text(e.right, prec + 1)}"
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"not an expression: {e!r}")


def _stmts(stmts, indent, out):
    pad = "  " * indent
    for s in stmts:
        if isinstance(s, ast.Assign):
            out.append(f"{pad}self.{s.prop} = {expr_text(s.value)}")
        elif isinstance(s, ast.If):
            out.append(f"{pad}if {expr_text(s.cond)} {{")
            _stmts(s.then, indent + 1, out)
            if s.orelse:
                out.append(f"{pad}}} else {{")
                _stmts(s.orelse, indent + 1, out)
            out.append(f"{pad}}}")
        elif isinstance(s, ast.CallStmt):
            out.append(f"{pad}{expr_text(s.call)}")
        else:
            raise TypeError(f"not a statement: {s!r}")


def _block(stmts, indent, out, header):
    pad = "  " * indent
    if not stmts:
        out.append(f"{pad}{header} {{ }}")
        return
    out.append(f"{pad}{header} {{")
    _stmts(stmts, indent + 1, out)
    out.append(f"{pad}}}")


def class_text(cls: ast.AgentClass) -> str:
    out = [f"agent {cls.name} {{"]
    for p in cls.properties:
        out.append(f"  property {p.name} = {value_text(p.initial)}")
    if cls.rules:
        out.append("")
        out.append("  rules {")
        for c in cls.rules:
            out.append(f"    {clause_text(c)}")
        out.append("  }")
    for pc in cls.perceptions:
        out.append("")
        _block(pc.body, 1, out, f"perception {pc.name} provide: {', '.join(pc.provides)}")
    for a in cls.actions:
        out.append("")
        header = f"action {a.name}"
        if a.effects:
            header += " ensure: " + ", ".join(f"{e.tendency} {e.property}" for e in a.effects)
        _block(a.body, 1, out, header)
    out.append("}")
    return "\n".join(out)


def scenario_text(sc: ast.Scenario) -> str:
    out = ["scenario {"]
    out.append(f"  world {sc.width} x {sc.height}")
    out.append(f"  seed {sc.seed}")
    for inst in sc.instances:
        line = f"  spawn {inst.class_name}"
        if inst.name:
            line += f" {inst.name}"
        if inst.pos:
            line += f" at ({inst.pos[0]}, {inst.pos[1]})"
        if inst.overrides:
            inner = ", ".join(f"{k}: {value_text(v)}" for k, v in inst.overrides)
            line += f" {{ {inner} }}"
        out.append(line)
    for th in sc.things:
        line = f"  thing {th.kind}"
        if th.count != 1:
            line += f" * {th.count}"
        if th.pos:
            line += f" at ({th.pos[0]}, {th.pos[1]})"
        out.append(line)
    for sch in sc.schedules:
        out.append(f"  every {sch.every} {sch.class_name}.{sch.perception}")
    out.append("}")
    return "\n".join(out)


def program_text(prog: ast.Program) -> str:
    parts = [class_text(c) for c in prog.classes]
    if prog.scenario is not None:
        parts.append(scenario_text(prog.scenario))
    return "\n\n".join(parts) + "\n"
