"""Reference interpreter for closed MiniFun expressions.

Call-by-name evaluation with a fuel budget; forcing an `undefined` raises
HitBottom, which is exactly the observable the to-do machinery relies on.
Results are fully forced into `Value` trees for comparison in tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import EvalError
from .syntax import (
    ECase,
    ECon,
    EList,
    ELam,
    ELit,
    ETuple,
    EUndefined,
    EVar,
    EApp,
    Expr,
    FunDecl,
    Module,
    PCon,
    PLit,
    PTuple,
    PVar,
    PWild,
    Pattern,
)

DEFAULT_FUEL = 100_000


class Value:
    """Fully forced result value."""

    __slots__ = ()


@dataclass(frozen=True)
class VCon(Value):
    name: str
    args: tuple["Value", ...] = ()


@dataclass(frozen=True)
class VTuple(Value):
    elems: tuple["Value", ...] = ()


@dataclass(frozen=True)
class VList(Value):
    elems: tuple["Value", ...] = ()


@dataclass(frozen=True)
class VLit(Value):
    value: Union[int, str]


@dataclass(frozen=True)
class VClosure(Value):
    """Opaque function value; carries a display note only."""

    note: str = "<function>"


class _Thunk:
    __slots__ = ("expr", "env")

    def __init__(self, expr: Expr, env: dict):
        self.expr = expr
        self.env = env


class _WCon:
    __slots__ = ("name", "arity", "args")

    def __init__(self, name: str, arity: int, args: tuple = ()):
        self.name = name
        self.arity = arity
        self.args = args


class _WTuple:
    __slots__ = ("elems",)

    def __init__(self, elems: tuple):
        self.elems = elems


class _WList:
    __slots__ = ("elems",)

    def __init__(self, elems: tuple):
        self.elems = elems


class _WLit:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class _WClosure:
    __slots__ = ("params", "body", "env")

    def __init__(self, params, body, env):
        self.params = params
        self.body = body
        self.env = env


class _WFun:
    """A top-level function still collecting arguments."""

    __slots__ = ("decl", "args")

    def __init__(self, decl: FunDecl, args: tuple = ()):
        self.decl = decl
        self.args = args


class Evaluator:
    """Environments map variable names to thunks or already-forced heads."""

    def __init__(self, m: Module, fuel: int = DEFAULT_FUEL):
        self.module = m
        self.fuel = fuel
        self.funs = {d.fun: d for d in m.decls if isinstance(d, FunDecl)}
        self.cons_arity: dict[str, int] = {}
        for d in m.type_decls():
            for c in m.constructors(d):
                self.cons_arity[c.name] = c.arity

    def _tick(self) -> None:
        self.fuel -= 1
        if self.fuel <= 0:
            raise EvalError("FuelExhausted", "step budget exhausted")

    def force(self, v):
        if isinstance(v, _Thunk):
            return self.whnf(v.expr, v.env)
        return v

    def whnf(self, expr: Expr, env: dict):
        while True:
            self._tick()
            if isinstance(expr, EVar):
                if expr.name in env:
                    v = env[expr.name]
                    if isinstance(v, _Thunk):
                        expr, env = v.expr, v.env
                        continue
                    return v
                decl = self.funs.get(expr.name)
                if decl is not None:
                    if not decl.equations[0].patterns:
                        expr, env = decl.equations[0].rhs, {}
                        continue
                    return _WFun(decl)
                raise EvalError("Unbound", f"unbound variable {expr.name}")
            if isinstance(expr, ECon):
                arity = self.cons_arity.get(expr.name)
                if arity is None:
                    raise EvalError("Unbound", f"unknown constructor {expr.name}")
                return _WCon(expr.name, arity)
            if isinstance(expr, ELit):
                return _WLit(expr.value)
            if isinstance(expr, EUndefined):
                raise EvalError("HitBottom", "forced an undefined to-do marker")
            if isinstance(expr, ETuple):
                return _WTuple(tuple(_Thunk(x, env) for x in expr.elems))
            if isinstance(expr, EList):
                return _WList(tuple(_Thunk(x, env) for x in expr.elems))
            if isinstance(expr, ELam):
                return _WClosure(expr.params, expr.body, env)
            if isinstance(expr, EApp):
                fun = self.whnf(expr.fun, env)
                return self.apply(fun, _Thunk(expr.arg, env))
            if isinstance(expr, ECase):
                scr = self.whnf(expr.scrutinee, env)
                for pat, body in expr.alts:
                    binding: dict = {}
                    if self.match(pat, scr, binding):
                        expr, env = body, {**env, **binding}
                        break
                else:
                    raise EvalError("PatternMatchFailure", "no case alternative matched")
                continue
            raise EvalError("Unbound", f"cannot evaluate {expr!r}")

    def apply(self, fun, arg):
        self._tick()
        if isinstance(fun, _WClosure):
            env = dict(fun.env)
            env[fun.params[0]] = arg
            rest = fun.params[1:]
            if rest:
                return _WClosure(rest, fun.body, env)
            return self.whnf(fun.body, env)
        if isinstance(fun, _WCon):
            if len(fun.args) >= fun.arity:
                raise EvalError("PatternMatchFailure", f"constructor {fun.name} over-applied")
            return _WCon(fun.name, fun.arity, fun.args + (arg,))
        if isinstance(fun, _WFun):
            args = fun.args + (arg,)
            decl = fun.decl
            arity = len(decl.equations[0].patterns)
            if len(args) < arity:
                return _WFun(decl, args)
            for eq in decl.equations:
                binding = {}
                if all(self.match_arg(p, a, binding) for p, a in zip(eq.patterns, args)):
                    return self.whnf(eq.rhs, binding)
            raise EvalError("PatternMatchFailure", f"no equation of {decl.fun} matched")
        raise EvalError("PatternMatchFailure", "applied a non-function value")

    def match_arg(self, p: Pattern, arg, out: dict) -> bool:
        """Match against a thunk or forced head, forcing only when the
        pattern actually inspects the value."""
        if isinstance(p, PVar):
            out[p.name] = arg
            return True
        if isinstance(p, PWild):
            return True
        return self.match(p, self.force(arg), out)

    def match(self, p: Pattern, w, out: dict) -> bool:
        if isinstance(p, (PVar, PWild)):
            return self.match_arg(p, w, out)
        if isinstance(p, PLit):
            return isinstance(w, _WLit) and w.value == p.value
        if isinstance(p, PCon):
            if not (isinstance(w, _WCon) and w.name == p.name and len(w.args) == len(p.subpatterns)):
                return False
            return all(self.match_arg(s, a, out) for s, a in zip(p.subpatterns, w.args))
        if isinstance(p, PTuple):
            if not (isinstance(w, _WTuple) and len(w.elems) == len(p.subpatterns)):
                return False
            return all(self.match_arg(s, a, out) for s, a in zip(p.subpatterns, w.elems))
        return False

    def deep(self, w) -> Value:
        if isinstance(w, _WLit):
            return VLit(w.value)
        if isinstance(w, _WCon):
            if len(w.args) < w.arity:
                return VClosure(note=f"<partial {w.name}>")
            return VCon(w.name, tuple(self.deep(self.force(a)) for a in w.args))
        if isinstance(w, _WTuple):
            return VTuple(tuple(self.deep(self.force(e)) for e in w.elems))
        if isinstance(w, _WList):
            return VList(tuple(self.deep(self.force(e)) for e in w.elems))
        if isinstance(w, _WClosure):
            return VClosure(note="<function>")
        if isinstance(w, _WFun):
            return VClosure(note=f"<function {w.decl.fun}>")
        raise EvalError("Unbound", f"cannot force {w!r}")


def eval_expr(m: Module, e: Expr, fuel: int = DEFAULT_FUEL) -> Value:
    """Evaluate a closed expression against a module; fully forced result."""
    ev = Evaluator(m, fuel)
    return ev.deep(ev.whnf(e, {}))


def value_text(v: Value) -> str:
    if isinstance(v, VLit):
        if isinstance(v.value, str):
            return '"' + v.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
        return str(v.value)
    if isinstance(v, VCon):
        if not v.args:
            return v.name
        return v.name + " " + " ".join(_value_atom(a) for a in v.args)
    if isinstance(v, VTuple):
        return "(" + ", ".join(value_text(e) for e in v.elems) + ")"
    if isinstance(v, VList):
        return "[" + ", ".join(value_text(e) for e in v.elems) + "]"
    if isinstance(v, VClosure):
        return v.note
    raise TypeError(f"not a value: {v!r}")


def _value_atom(v: Value) -> str:
    s = value_text(v)
    if isinstance(v, VCon) and v.args:
        return "(" + s + ")"
    return s
