"""Deterministic generator of well-formed MiniFun modules.

Seeded, so suites can demand "N generated modules" exactly.  Constructor
applications are always saturated and every function carries a signature,
which keeps the whole operator catalogue applicable.
"""
from __future__ import annotations

from random import Random

from minifun.syntax import (
    AliasDecl,
    App,
    ConsDecl,
    DataDecl,
    ECon,
    ELit,
    ETuple,
    EUndefined,
    EVar,
    EApp,
    Equation,
    Expr,
    Fun,
    FunDecl,
    ListT,
    Module,
    NewtypeDecl,
    PCon,
    PVar,
    PWild,
    Pattern,
    Sig,
    Tuple,
    TypeExpr,
    Var,
    make_app,
    well_formed,
)


class _Gen:
    def __init__(self, seed: int):
        self.rng = Random(seed)
        self.types: list[tuple[str, int, str]] = []  # (name, param count, kind)
        self.cons: dict[str, tuple[str, int]] = {}  # cons -> (type, arity)
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    def gen_type(self, params: tuple[str, ...], depth: int) -> TypeExpr:
        rng = self.rng
        leaves = ["Int", "String"] + (["param"] if params else [])
        if depth <= 0 or rng.random() < 0.4:
            pick = rng.choice(leaves)
            if pick == "param":
                return Var(rng.choice(params))
            return App(pick, ())
        shape = rng.choice(["app", "list", "tuple", "fun", "leaf"])
        if shape == "app" and self.types:
            name, arity, _ = rng.choice(self.types)
            return App(name, tuple(self.gen_type(params, depth - 1) for _ in range(arity)))
        if shape == "list":
            return ListT(self.gen_type(params, depth - 1))
        if shape == "tuple":
            return Tuple(tuple(self.gen_type(params, depth - 1) for _ in range(2)))
        if shape == "fun":
            return Fun(self.gen_type(params, depth - 1), self.gen_type(params, depth - 1))
        return App(rng.choice(["Int", "String"]), ())

    def gen_cons(self, ty: str, params: tuple[str, ...], min_comps: int = 0) -> ConsDecl:
        name = self.fresh("K")
        n = self.rng.randint(min_comps, 3)
        comps = tuple(self.gen_type(params, 2) for _ in range(n))
        self.cons[name] = (ty, len(comps))
        return ConsDecl(name, comps)

    def gen_expr(self, vars_in_scope: list[str], depth: int) -> Expr:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.35:
            options = ["lit"] + (["var"] if vars_in_scope else []) + ["undefined"]
            pick = rng.choice(options)
            if pick == "var":
                return EVar(rng.choice(vars_in_scope))
            if pick == "undefined":
                return EUndefined()
            return ELit(rng.choice([0, 1, 42, "s"]))
        shape = rng.choice(["con", "tuple", "leaf"])
        if shape == "con" and self.cons:
            cname = rng.choice(sorted(self.cons))
            arity = self.cons[cname][1]
            return make_app(ECon(cname), [self.gen_expr(vars_in_scope, depth - 1) for _ in range(arity)])
        if shape == "tuple":
            return ETuple(tuple(self.gen_expr(vars_in_scope, depth - 1) for _ in range(2)))
        return self.gen_expr(vars_in_scope, 0)

    def gen_pattern(self, data_only: list[str]) -> tuple[Pattern, list[str]]:
        rng = self.rng
        if data_only and rng.random() < 0.6:
            ty = rng.choice(data_only)
            children = [c for c, (t, _) in self.cons.items() if t == ty]
            cname = rng.choice(sorted(children))
            arity = self.cons[cname][1]
            subs = []
            vs = []
            for _ in range(arity):
                if rng.random() < 0.2:
                    subs.append(PWild())
                else:
                    v = self.fresh("v")
                    subs.append(PVar(v))
                    vs.append(v)
            return PCon(cname, tuple(subs)), vs
        v = self.fresh("v")
        return PVar(v), [v]

    def module(self) -> Module:
        rng = self.rng
        decls = []
        for _ in range(rng.randint(2, 4)):
            kind = rng.choices(["data", "alias", "newtype"], weights=[6, 3, 2])[0]
            name = self.fresh("T")
            params = tuple(("a", "b")[: rng.randint(0, 2)])
            if kind == "data":
                conss = tuple(self.gen_cons(name, params) for _ in range(rng.randint(1, 3)))
                decls.append(DataDecl(name, params, conss))
                self.types.append((name, len(params), "data"))
            elif kind == "alias":
                decls.append(AliasDecl(name, params, self.gen_type(params, 2)))
                self.types.append((name, len(params), "alias"))
            else:
                con = self.gen_cons(name, params, min_comps=1)
                con = ConsDecl(con.name, con.components[:1])
                self.cons[con.name] = (name, 1)
                decls.append(NewtypeDecl(name, params, con))
                self.types.append((name, len(params), "newtype"))
        data_types = [t for t, _, k in self.types if k in ("data", "newtype")]
        for _ in range(rng.randint(1, 3)):
            fun = self.fresh("f")
            arity = rng.randint(0, 2)
            sig_args = [self.gen_type((), 1) for _ in range(arity)]
            sig = sig_args + [self.gen_type((), 1)]
            t = sig[-1]
            for a in reversed(sig[:-1]):
                t = Fun(a, t)
            decls.append(Sig(fun, t))
            eqs = []
            for _ in range(rng.randint(1, 2)):
                pats = []
                vs: list[str] = []
                for _ in range(arity):
                    p, bound = self.gen_pattern(data_types)
                    pats.append(p)
                    vs.extend(bound)
                eqs.append(Equation(fun, tuple(pats), self.gen_expr(vs, 2)))
            decls.append(FunDecl(fun, tuple(eqs)))
        return Module(tuple(decls))


def gen_module(seed: int) -> Module:
    m = _Gen(seed).module()
    well_formed(m)
    return m
