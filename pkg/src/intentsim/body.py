"""Evaluator for the imperative mini-language used by perception/action bodies.

Bodies may only assign to the owning agent's properties and call world
builtins; every type error, bad arity, or division by zero surfaces as
BodyRuntimeError and aborts the body (writes already made stay)."""

from __future__ import annotations

from . import ast


class BodyRuntimeError(Exception):
    """A body failed at run time; the simulation continues."""


class BodyContext:
    """What a body can touch: own properties (through the store's rules)
    and world builtins issued on behalf of the owning entity."""

    def read_prop(self, name):  # pragma: no cover - interface
        raise NotImplementedError

    def write_prop(self, name, value):  # pragma: no cover - interface
        raise NotImplementedError

    def call_builtin(self, name, args):  # pragma: no cover - interface
        raise NotImplementedError


def run_body(stmts, ctx: BodyContext):
    for s in stmts:
        if isinstance(s, ast.Assign):
            ctx.write_prop(s.prop, eval_expr(s.value, ctx))
        elif isinstance(s, ast.If):
            cond = eval_expr(s.cond, ctx)
            if not isinstance(cond, bool):
                raise BodyRuntimeError(f"if condition is not a boolean: {cond!r}")
            run_body(s.then if cond else s.orelse, ctx)
        elif isinstance(s, ast.CallStmt):
            eval_expr(s.call, ctx)
        else:
            raise BodyRuntimeError(f"unknown statement {s!r}")


def _num(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise BodyRuntimeError(f"{what} needs a number, got {v!r}")
    return v


def _bool(v, what):
    if not isinstance(v, bool):
        raise BodyRuntimeError(f"{what} needs a boolean, got {v!r}")
    return v


def eval_expr(e, ctx: BodyContext):
    if isinstance(e, ast.NumLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return e.value
    if isinstance(e, ast.SymLit):
        return e.value
    if isinstance(e, ast.PropRead):
        return ctx.read_prop(e.name)
    if isinstance(e, ast.Call):
        return ctx.call_builtin(e.name, [eval_expr(a, ctx) for a in e.args])
    if isinstance(e, ast.Unary):
        v = eval_expr(e.operand, ctx)
        if e.op == "-":
            return -_num(v, "unary '-'")
        return not _bool(v, "'not'")
    if isinstance(e, ast.Binary):
        if e.op in ("and", "or"):
            left = _bool(eval_expr(e.left, ctx), f"'{e.op}'")
            if e.op == "and":
                return left and _bool(eval_expr(e.right, ctx), "'and'")
            return left or _bool(eval_expr(e.right, ctx), "'or'")
        left = eval_expr(e.left, ctx)
        right = eval_expr(e.right, ctx)
        if e.op in ("==", "!="):
            same = type(left) is type(right) or (
                not isinstance(left, (bool, str))
                and not isinstance(right, (bool, str))
                and isinstance(left, (int, float))
                and isinstance(right, (int, float))
            )
            eq = same and left == right
            return eq if e.op == "==" else not eq
        left = _num(left, f"'{e.op}'")
        right = _num(right, f"'{e.op}'")
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            if right == 0:
                raise BodyRuntimeError("division by zero")
            return left / right
        if e.op == "<":
            return left < right
        if e.op == "<=":
            return left <= right
        if e.op == ">":
            return left > right
        if e.op == ">=":
            return left >= right
    raise BodyRuntimeError(f"unknown expression {e!r}")
