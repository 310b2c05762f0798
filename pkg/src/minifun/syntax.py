"""Abstract syntax of the MiniFun object language.

A module is an ordered sequence of declarations: type aliases, newtypes,
datatypes, signatures, and function equation groups.  All values are
immutable (frozen dataclasses over tuples), so modules can be shared freely.

Focus markers live in the tree (`FocusType`, `FocusName`) except the
component-range focus, which is positional and carried on the module
(`Module.comp_focus`), because it marks a slice of a constructor's
component list rather than a single node.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Union

from .errors import MiniFunError, Refusal, refuse

TyVar = str
TypeName = str
ConsName = str
VarName = str
Literal = Union[int, str]

BUILTIN_TYPES = {"Int": 0, "String": 0}


# ---------------------------------------------------------------------------
# type expressions

class TypeExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(TypeExpr):
    name: TyVar


@dataclass(frozen=True)
class App(TypeExpr):
    name: TypeName
    args: tuple[TypeExpr, ...] = ()


@dataclass(frozen=True)
class Fun(TypeExpr):
    src: TypeExpr
    dst: TypeExpr


@dataclass(frozen=True)
class Tuple(TypeExpr):
    elems: tuple[TypeExpr, ...]  # arity >= 2


@dataclass(frozen=True)
class ListT(TypeExpr):
    elem: TypeExpr


@dataclass(frozen=True)
class FocusType(TypeExpr):
    """Marker around a focused type expression."""

    inner: TypeExpr


@dataclass(frozen=True)
class FocusName(TypeExpr):
    """Marker around a focused occurrence of a type name (no arguments)."""

    name: TypeName


def type_children(t: TypeExpr) -> tuple[TypeExpr, ...]:
    """Children in selector-path order: Fun = (src, dst); App/Tuple = args; List = (elem,)."""
    if isinstance(t, Fun):
        return (t.src, t.dst)
    if isinstance(t, App):
        return t.args
    if isinstance(t, Tuple):
        return t.elems
    if isinstance(t, ListT):
        return (t.elem,)
    if isinstance(t, FocusType):
        return (t.inner,)
    return ()


def with_type_children(t: TypeExpr, kids: tuple[TypeExpr, ...]) -> TypeExpr:
    if isinstance(t, Fun):
        return Fun(kids[0], kids[1])
    if isinstance(t, App):
        return App(t.name, kids)
    if isinstance(t, Tuple):
        return Tuple(kids)
    if isinstance(t, ListT):
        return ListT(kids[0])
    if isinstance(t, FocusType):
        return FocusType(kids[0])
    return t


def map_type(t: TypeExpr, f) -> TypeExpr:
    """Bottom-up rewrite of a type expression."""
    kids = tuple(map_type(k, f) for k in type_children(t))
    return f(with_type_children(t, kids))


def subterms(t: TypeExpr) -> Iterator[tuple[tuple[int, ...], TypeExpr]]:
    """Pre-order (path, node) pairs; paths use 1-based child indices."""
    yield (), t
    for i, k in enumerate(type_children(t), start=1):
        for path, sub in subterms(k):
            yield (i,) + path, sub


def subst_type(t: TypeExpr, env: dict[TyVar, TypeExpr]) -> TypeExpr:
    def go(node: TypeExpr) -> TypeExpr:
        if isinstance(node, Var) and node.name in env:
            return env[node.name]
        return node

    return map_type(t, go)


def free_type_vars(t: TypeExpr) -> set[TyVar]:
    out: set[TyVar] = set()

    def walk(node: TypeExpr) -> None:
        if isinstance(node, Var):
            out.add(node.name)
        for k in type_children(node):
            walk(k)

    walk(t)
    return out


# ---------------------------------------------------------------------------
# patterns and expressions

class Pattern:
    __slots__ = ()


@dataclass(frozen=True)
class PVar(Pattern):
    name: VarName


@dataclass(frozen=True)
class PWild(Pattern):
    pass


@dataclass(frozen=True)
class PCon(Pattern):
    name: ConsName
    subpatterns: tuple[Pattern, ...] = ()


@dataclass(frozen=True)
class PTuple(Pattern):
    subpatterns: tuple[Pattern, ...]


@dataclass(frozen=True)
class PLit(Pattern):
    value: Literal


def pattern_vars(p: Pattern) -> list[VarName]:
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, (PCon, PTuple)):
        out: list[VarName] = []
        for s in p.subpatterns:
            out.extend(pattern_vars(s))
        return out
    return []


def pattern_cons(p: Pattern) -> set[ConsName]:
    if isinstance(p, PCon):
        out = {p.name}
        for s in p.subpatterns:
            out |= pattern_cons(s)
        return out
    if isinstance(p, PTuple):
        out = set()
        for s in p.subpatterns:
            out |= pattern_cons(s)
        return out
    return set()


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class EVar(Expr):
    name: VarName


@dataclass(frozen=True)
class ECon(Expr):
    name: ConsName


@dataclass(frozen=True)
class EApp(Expr):
    fun: Expr
    arg: Expr


@dataclass(frozen=True)
class ELam(Expr):
    params: tuple[VarName, ...]  # nonempty
    body: Expr


@dataclass(frozen=True)
class ECase(Expr):
    scrutinee: Expr
    alts: tuple[tuple[Pattern, Expr], ...]


@dataclass(frozen=True)
class ETuple(Expr):
    elems: tuple[Expr, ...]


@dataclass(frozen=True)
class EList(Expr):
    elems: tuple[Expr, ...]


@dataclass(frozen=True)
class EUndefined(Expr):
    pass


@dataclass(frozen=True)
class ELit(Expr):
    value: Literal


def app_spine(e: Expr) -> tuple[Expr, list[Expr]]:
    """Decompose nested applications into (root, [args])."""
    args: list[Expr] = []
    while isinstance(e, EApp):
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, args


def make_app(root: Expr, args: list[Expr]) -> Expr:
    for a in args:
        root = EApp(root, a)
    return root


def expr_children(e: Expr) -> tuple[Expr, ...]:
    """Children in to-do-path order."""
    if isinstance(e, EApp):
        return (e.fun, e.arg)
    if isinstance(e, ELam):
        return (e.body,)
    if isinstance(e, ECase):
        return (e.scrutinee,) + tuple(body for _, body in e.alts)
    if isinstance(e, (ETuple, EList)):
        return e.elems
    return ()


def expr_at(e: Expr, path: tuple[int, ...]) -> Expr:
    for i in path:
        kids = expr_children(e)
        if not 1 <= i <= len(kids):
            raise Refusal("BadPath", f"no child {i} in expression")
        e = kids[i - 1]
    return e


def free_expr_vars(e: Expr, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(e, EVar):
        return set() if e.name in bound else {e.name}
    if isinstance(e, ELam):
        return free_expr_vars(e.body, bound | frozenset(e.params))
    if isinstance(e, ECase):
        out = free_expr_vars(e.scrutinee, bound)
        for p, body in e.alts:
            out |= free_expr_vars(body, bound | frozenset(pattern_vars(p)))
        return out
    out: set[str] = set()
    for k in expr_children(e):
        out |= free_expr_vars(k, bound)
    return out


# ---------------------------------------------------------------------------
# declarations

class Decl:
    __slots__ = ()


@dataclass(frozen=True)
class ConsDecl:
    name: ConsName
    components: tuple[TypeExpr, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class AliasDecl(Decl):
    name: TypeName
    params: tuple[TyVar, ...]
    rhs: TypeExpr


@dataclass(frozen=True)
class NewtypeDecl(Decl):
    name: TypeName
    params: tuple[TyVar, ...]
    con: ConsDecl  # exactly one component


@dataclass(frozen=True)
class DataDecl(Decl):
    name: TypeName
    params: tuple[TyVar, ...]
    conss: tuple[ConsDecl, ...]  # nonempty


@dataclass(frozen=True)
class Sig(Decl):
    fun: VarName
    type: TypeExpr


@dataclass(frozen=True)
class Equation:
    fun: VarName
    patterns: tuple[Pattern, ...]
    rhs: Expr


@dataclass(frozen=True)
class FunDecl(Decl):
    fun: VarName
    equations: tuple[Equation, ...]  # nonempty, equal arity


TypeDecl = Union[AliasDecl, NewtypeDecl, DataDecl]


@dataclass(frozen=True)
class FocusCompList:
    """Focus on a contiguous run of constructor components."""

    host: ConsName
    start: int  # 1-based
    count: int  # >= 1


@dataclass(frozen=True)
class Module:
    decls: tuple[Decl, ...] = ()
    comp_focus: FocusCompList | None = None

    # ---- lookup helpers ------------------------------------------------
    def type_decl(self, name: TypeName) -> TypeDecl | None:
        for d in self.decls:
            if isinstance(d, (AliasDecl, NewtypeDecl, DataDecl)) and d.name == name:
                return d
        return None

    def type_decls(self) -> list[TypeDecl]:
        return [d for d in self.decls if isinstance(d, (AliasDecl, NewtypeDecl, DataDecl))]

    def fun_decl(self, name: VarName) -> FunDecl | None:
        for d in self.decls:
            if isinstance(d, FunDecl) and d.fun == name:
                return d
        return None

    def sig_of(self, name: VarName) -> Sig | None:
        for d in self.decls:
            if isinstance(d, Sig) and d.fun == name:
                return d
        return None

    def cons_owner(self, cons: ConsName) -> tuple[TypeDecl, ConsDecl] | None:
        for d in self.decls:
            if isinstance(d, NewtypeDecl) and d.con.name == cons:
                return d, d.con
            if isinstance(d, DataDecl):
                for c in d.conss:
                    if c.name == cons:
                        return d, c
        return None

    def cons_arity(self, cons: ConsName) -> int | None:
        owner = self.cons_owner(cons)
        return owner[1].arity if owner else None

    def constructors(self, decl: TypeDecl) -> tuple[ConsDecl, ...]:
        if isinstance(decl, NewtypeDecl):
            return (decl.con,)
        if isinstance(decl, DataDecl):
            return decl.conss
        return ()

    def type_arity(self, name: TypeName) -> int | None:
        if name in BUILTIN_TYPES:
            return BUILTIN_TYPES[name]
        d = self.type_decl(name)
        return len(d.params) if d is not None else None

    def replace_decl(self, index: int, new: Decl | None) -> "Module":
        decls = list(self.decls)
        if new is None:
            del decls[index]
        else:
            decls[index] = new
        return replace(self, decls=tuple(decls))


def constructors_of(m: Module, ty: TypeName) -> list[ConsDecl]:
    """Declaration-order constructors of a newtype or datatype."""
    d = m.type_decl(ty)
    if d is None:
        refuse("UnknownType", f"no type named {ty}")
    if isinstance(d, AliasDecl):
        refuse("KindMismatch", f"{ty} is a type alias and has no constructors")
    return list(m.constructors(d))


# ---------------------------------------------------------------------------
# focus stripping (shared by alpha_eq and the selector machinery)

def strip_focus_type(t: TypeExpr) -> TypeExpr:
    def go(node: TypeExpr) -> TypeExpr:
        if isinstance(node, FocusType):
            return node.inner
        if isinstance(node, FocusName):
            return App(node.name, ())
        return node

    return map_type(t, go)


def strip_focus(m: Module) -> Module:
    decls = []
    for d in m.decls:
        if isinstance(d, AliasDecl):
            decls.append(AliasDecl(d.name, d.params, strip_focus_type(d.rhs)))
        elif isinstance(d, NewtypeDecl):
            decls.append(NewtypeDecl(d.name, d.params, _strip_cons(d.con)))
        elif isinstance(d, DataDecl):
            decls.append(DataDecl(d.name, d.params, tuple(_strip_cons(c) for c in d.conss)))
        elif isinstance(d, Sig):
            decls.append(Sig(d.fun, strip_focus_type(d.type)))
        else:
            decls.append(d)
    return Module(tuple(decls), comp_focus=None)


def _strip_cons(c: ConsDecl) -> ConsDecl:
    return ConsDecl(c.name, tuple(strip_focus_type(t) for t in c.components))


# ---------------------------------------------------------------------------
# well-formedness

class IllFormed(MiniFunError):
    pass


def well_formed(m: Module) -> None:
    """Assert the Module invariants; raises IllFormed with a reason."""

    def bad(msg: str) -> None:
        raise IllFormed(msg)

    ty_names: set[str] = set()
    cons_names: set[str] = set()
    sig_funs: set[str] = set()
    fun_names: set[str] = set()

    for d in m.decls:
        if isinstance(d, (AliasDecl, NewtypeDecl, DataDecl)):
            if d.name in ty_names or d.name in BUILTIN_TYPES:
                bad(f"duplicate type name {d.name}")
            ty_names.add(d.name)
            if len(set(d.params)) != len(d.params):
                bad(f"repeated type parameter in {d.name}")
            for c in m.constructors(d):
                if c.name in cons_names:
                    bad(f"duplicate constructor name {c.name}")
                cons_names.add(c.name)
            if isinstance(d, NewtypeDecl) and d.con.arity != 1:
                bad(f"newtype {d.name} must have exactly one component")
            if isinstance(d, DataDecl) and not d.conss:
                bad(f"datatype {d.name} has no constructors")
        elif isinstance(d, Sig):
            if d.fun in sig_funs:
                bad(f"duplicate signature for {d.fun}")
            sig_funs.add(d.fun)
        elif isinstance(d, FunDecl):
            if d.fun in fun_names:
                bad(f"equations for {d.fun} are not contiguous")
            fun_names.add(d.fun)
            if not d.equations:
                bad(f"function {d.fun} has no equations")
            arity = len(d.equations[0].patterns)
            for eq in d.equations:
                if eq.fun != d.fun:
                    bad(f"equation for {eq.fun} grouped under {d.fun}")
                if len(eq.patterns) != arity:
                    bad(f"equations for {d.fun} differ in arity")
                vs = [v for p in eq.patterns for v in pattern_vars(p)]
                if len(vs) != len(set(vs)):
                    bad(f"repeated pattern variable in an equation of {d.fun}")

    # scoping and arity of type expressions
    stripped = strip_focus(m)

    def check_type(t: TypeExpr, params: tuple[TyVar, ...], where: str) -> None:
        for _, sub in subterms(t):
            if isinstance(sub, Var) and sub.name not in params:
                bad(f"unbound type variable {sub.name} in {where}")
            if isinstance(sub, App):
                arity = stripped.type_arity(sub.name)
                if arity is None:
                    bad(f"unknown type {sub.name} in {where}")
                if arity != len(sub.args):
                    bad(f"{sub.name} applied to {len(sub.args)} arguments, expects {arity} in {where}")
            if isinstance(sub, Tuple) and len(sub.elems) < 2:
                bad(f"tuple type of arity {len(sub.elems)} in {where}")

    for d in stripped.decls:
        if isinstance(d, AliasDecl):
            check_type(d.rhs, d.params, f"alias {d.name}")
        elif isinstance(d, (NewtypeDecl, DataDecl)):
            for c in stripped.constructors(d):
                for t in c.components:
                    check_type(t, d.params, f"constructor {c.name}")
        elif isinstance(d, Sig):
            check_type(d.type, tuple(free_type_vars(d.type)), f"signature of {d.fun}")

    # alias acyclicity
    alias_deps = {
        d.name: {s.name for _, s in subterms(d.rhs) if isinstance(s, App)}
        for d in stripped.decls
        if isinstance(d, AliasDecl)
    }
    seen: set[str] = set()

    def visit(name: str, stack: tuple[str, ...]) -> None:
        if name in stack:
            bad(f"cyclic type alias {name}")
        if name in seen or name not in alias_deps:
            return
        for dep in alias_deps[name]:
            visit(dep, stack + (name,))
        seen.add(name)

    for name in alias_deps:
        visit(name, ())

    # at most one focus marker in the whole module
    foci = count_foci(m)
    if foci > 1:
        bad(f"{foci} focus markers present, at most one allowed")

    if m.comp_focus is not None:
        owner = m.cons_owner(m.comp_focus.host)
        if owner is None:
            bad(f"component focus on unknown constructor {m.comp_focus.host}")
        else:
            f = m.comp_focus
            if f.start < 1 or f.count < 1 or f.start + f.count - 1 > owner[1].arity:
                bad(f"component focus range out of bounds for {f.host}")


def is_well_formed(m: Module) -> bool:
    try:
        well_formed(m)
        return True
    except IllFormed:
        return False


def count_foci(m: Module) -> int:
    n = 1 if m.comp_focus is not None else 0

    def walk(t: TypeExpr) -> int:
        k = 1 if isinstance(t, (FocusType, FocusName)) else 0
        return k + sum(walk(c) for c in type_children(t))

    for d in m.decls:
        if isinstance(d, AliasDecl):
            n += walk(d.rhs)
        elif isinstance(d, Sig):
            n += walk(d.type)
        elif isinstance(d, (NewtypeDecl, DataDecl)):
            for c in m.constructors(d):
                n += sum(walk(t) for t in c.components)
    return n


# ---------------------------------------------------------------------------
# alpha equivalence

def alpha_eq(m1: Module, m2: Module) -> bool:
    """Structural equality up to consistent renaming of type variables and
    pattern/lambda variables; focus markers are ignored."""
    a, b = strip_focus(m1), strip_focus(m2)
    if len(a.decls) != len(b.decls):
        return False
    return all(_decl_eq(d1, d2) for d1, d2 in zip(a.decls, b.decls))


def _decl_eq(d1: Decl, d2: Decl) -> bool:
    if type(d1) is not type(d2):
        return False
    if isinstance(d1, AliasDecl):
        env = _param_env(d1.params, d2.params)
        return env is not None and d1.name == d2.name and _type_eq(d1.rhs, d2.rhs, env)
    if isinstance(d1, NewtypeDecl):
        env = _param_env(d1.params, d2.params)
        return env is not None and d1.name == d2.name and _cons_eq(d1.con, d2.con, env)
    if isinstance(d1, DataDecl):
        env = _param_env(d1.params, d2.params)
        return (
            env is not None
            and d1.name == d2.name
            and len(d1.conss) == len(d2.conss)
            and all(_cons_eq(c1, c2, env) for c1, c2 in zip(d1.conss, d2.conss))
        )
    if isinstance(d1, Sig):
        return d1.fun == d2.fun and _type_eq_flex(d1.type, d2.type)
    if isinstance(d1, FunDecl):
        return (
            d1.fun == d2.fun
            and len(d1.equations) == len(d2.equations)
            and all(_eq_eq(e1, e2) for e1, e2 in zip(d1.equations, d2.equations))
        )
    return False


def _param_env(p1: tuple[str, ...], p2: tuple[str, ...]) -> dict[str, str] | None:
    if len(p1) != len(p2):
        return None
    return dict(zip(p1, p2))


def _type_eq(t1: TypeExpr, t2: TypeExpr, env: dict[str, str]) -> bool:
    if isinstance(t1, Var) and isinstance(t2, Var):
        return env.get(t1.name) == t2.name
    if type(t1) is not type(t2):
        return False
    if isinstance(t1, App):
        return t1.name == t2.name and len(t1.args) == len(t2.args) and all(
            _type_eq(a, b, env) for a, b in zip(t1.args, t2.args)
        )
    k1, k2 = type_children(t1), type_children(t2)
    return len(k1) == len(k2) and all(_type_eq(a, b, env) for a, b in zip(k1, k2))


def _type_eq_flex(t1: TypeExpr, t2: TypeExpr) -> bool:
    """Like _type_eq but the variable correspondence is built on the fly
    (used for signatures, whose variables are implicitly quantified)."""
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}

    def go(a: TypeExpr, b: TypeExpr) -> bool:
        if isinstance(a, Var) and isinstance(b, Var):
            if a.name in fwd and fwd[a.name] != b.name:
                return False
            if b.name in bwd and bwd[b.name] != a.name:
                return False
            fwd[a.name] = b.name
            bwd[b.name] = a.name
            return True
        if type(a) is not type(b):
            return False
        if isinstance(a, App) and a.name != b.name:
            return False
        ka, kb = type_children(a), type_children(b)
        return len(ka) == len(kb) and all(go(x, y) for x, y in zip(ka, kb))

    return go(t1, t2)


def _cons_eq(c1: ConsDecl, c2: ConsDecl, env: dict[str, str]) -> bool:
    return (
        c1.name == c2.name
        and c1.arity == c2.arity
        and all(_type_eq(a, b, env) for a, b in zip(c1.components, c2.components))
    )


def _eq_eq(e1: Equation, e2: Equation) -> bool:
    if e1.fun != e2.fun or len(e1.patterns) != len(e2.patterns):
        return False
    env: dict[str, str] = {}
    for p1, p2 in zip(e1.patterns, e2.patterns):
        if not _pat_eq(p1, p2, env):
            return False
    return _expr_eq(e1.rhs, e2.rhs, env)


def _pat_eq(p1: Pattern, p2: Pattern, env: dict[str, str]) -> bool:
    if isinstance(p1, PVar) and isinstance(p2, PVar):
        env[p1.name] = p2.name
        return True
    if type(p1) is not type(p2):
        return False
    if isinstance(p1, PWild):
        return True
    if isinstance(p1, PLit):
        return p1.value == p2.value
    if isinstance(p1, PCon) and p1.name != p2.name:
        return False
    s1 = p1.subpatterns  # type: ignore[union-attr]
    s2 = p2.subpatterns  # type: ignore[union-attr]
    return len(s1) == len(s2) and all(_pat_eq(a, b, env) for a, b in zip(s1, s2))


def _expr_eq(e1: Expr, e2: Expr, env: dict[str, str]) -> bool:
    if isinstance(e1, EVar) and isinstance(e2, EVar):
        if e1.name in env:
            return env[e1.name] == e2.name
        # free occurrence: must be identical and not captured on the right
        return e1.name == e2.name and e2.name not in env.values()
    if type(e1) is not type(e2):
        return False
    if isinstance(e1, ECon):
        return e1.name == e2.name
    if isinstance(e1, ELit):
        return e1.value == e2.value
    if isinstance(e1, (EUndefined,)):
        return True
    if isinstance(e1, EApp):
        return _expr_eq(e1.fun, e2.fun, env) and _expr_eq(e1.arg, e2.arg, env)
    if isinstance(e1, ELam):
        if len(e1.params) != len(e2.params):  # type: ignore[union-attr]
            return False
        inner = dict(env)
        inner.update(zip(e1.params, e2.params))  # type: ignore[union-attr]
        return _expr_eq(e1.body, e2.body, inner)  # type: ignore[union-attr]
    if isinstance(e1, ECase):
        if len(e1.alts) != len(e2.alts):  # type: ignore[union-attr]
            return False
        if not _expr_eq(e1.scrutinee, e2.scrutinee, env):  # type: ignore[union-attr]
            return False
        for (pa, ba), (pb, bb) in zip(e1.alts, e2.alts):  # type: ignore[union-attr]
            inner = dict(env)
            if not _pat_eq(pa, pb, inner):
                return False
            if not _expr_eq(ba, bb, inner):
                return False
        return True
    if isinstance(e1, (ETuple, EList)):
        k1, k2 = e1.elems, e2.elems  # type: ignore[union-attr]
        return len(k1) == len(k2) and all(_expr_eq(a, b, env) for a, b in zip(k1, k2))
    return False


# ---------------------------------------------------------------------------
# module-wide traversal helpers

def map_types_in_module(m: Module, f) -> Module:
    """Apply a bottom-up type rewrite to every type expression in the module."""

    def over(t: TypeExpr) -> TypeExpr:
        return map_type(t, f)

    decls: list[Decl] = []
    for d in m.decls:
        if isinstance(d, AliasDecl):
            decls.append(AliasDecl(d.name, d.params, over(d.rhs)))
        elif isinstance(d, NewtypeDecl):
            decls.append(NewtypeDecl(d.name, d.params, ConsDecl(d.con.name, tuple(over(t) for t in d.con.components))))
        elif isinstance(d, DataDecl):
            decls.append(
                DataDecl(
                    d.name,
                    d.params,
                    tuple(ConsDecl(c.name, tuple(over(t) for t in c.components)) for c in d.conss),
                )
            )
        elif isinstance(d, Sig):
            decls.append(Sig(d.fun, over(d.type)))
        else:
            decls.append(d)
    return replace(m, decls=tuple(decls))


def map_equations(m: Module, f) -> Module:
    """Rewrite every equation with f(equation) -> equation | list | None.

    None deletes the equation, a list splices replacements.
    """
    decls: list[Decl] = []
    for d in m.decls:
        if isinstance(d, FunDecl):
            eqs: list[Equation] = []
            for eq in d.equations:
                out = f(eq)
                if out is None:
                    continue
                if isinstance(out, Equation):
                    eqs.append(out)
                else:
                    eqs.extend(out)
            decls.append(FunDecl(d.fun, tuple(eqs)))
        else:
            decls.append(d)
    return replace(m, decls=tuple(decls))


def map_patterns(p: Pattern, f) -> Pattern:
    """Bottom-up pattern rewrite."""
    if isinstance(p, PCon):
        p = PCon(p.name, tuple(map_patterns(s, f) for s in p.subpatterns))
    elif isinstance(p, PTuple):
        p = PTuple(tuple(map_patterns(s, f) for s in p.subpatterns))
    return f(p)


def map_exprs(e: Expr, f) -> Expr:
    """Bottom-up expression rewrite (patterns untouched)."""
    if isinstance(e, EApp):
        e = EApp(map_exprs(e.fun, f), map_exprs(e.arg, f))
    elif isinstance(e, ELam):
        e = ELam(e.params, map_exprs(e.body, f))
    elif isinstance(e, ECase):
        e = ECase(
            map_exprs(e.scrutinee, f),
            tuple((p, map_exprs(b, f)) for p, b in e.alts),
        )
    elif isinstance(e, ETuple):
        e = ETuple(tuple(map_exprs(x, f) for x in e.elems))
    elif isinstance(e, EList):
        e = EList(tuple(map_exprs(x, f) for x in e.elems))
    return f(e)


def used_var_names(m: Module) -> set[str]:
    """Every identifier that occurs anywhere in value-land (for freshness)."""
    out: set[str] = set()
    for d in m.decls:
        if isinstance(d, Sig):
            out.add(d.fun)
        elif isinstance(d, FunDecl):
            out.add(d.fun)
            for eq in d.equations:
                for p in eq.patterns:
                    out.update(pattern_vars(p))
                _collect_expr_names(eq.rhs, out)
    return out


def _collect_expr_names(e: Expr, out: set[str]) -> None:
    if isinstance(e, EVar):
        out.add(e.name)
    elif isinstance(e, ELam):
        out.update(e.params)
    elif isinstance(e, ECase):
        for p, _ in e.alts:
            out.update(pattern_vars(p))
    for k in expr_children(e):
        _collect_expr_names(k, out)


def fresh_names(base: str, n: int, used: set[str]) -> list[str]:
    """x1, x2, ... with collision-avoiding suffixing."""
    out: list[str] = []
    i = 1
    while len(out) < n:
        cand = f"{base}{i}"
        if cand not in used:
            out.append(cand)
            used.add(cand)
        i += 1
    return out


def expand_aliases(m: Module, t: TypeExpr, opaque: frozenset[str] = frozenset(), fuel: int = 64) -> TypeExpr:
    """Expand every alias application (except names in `opaque`); newtypes
    and datatypes stay nominal.  Fuel guards against pathological nesting."""
    if fuel <= 0:
        raise IllFormed("alias expansion did not terminate")
    if isinstance(t, App):
        args = tuple(expand_aliases(m, a, opaque, fuel) for a in t.args)
        d = m.type_decl(t.name)
        if isinstance(d, AliasDecl) and t.name not in opaque:
            body = subst_type(d.rhs, dict(zip(d.params, args)))
            return expand_aliases(m, body, opaque, fuel - 1)
        return App(t.name, args)
    kids = tuple(expand_aliases(m, k, opaque, fuel) for k in type_children(t))
    return with_type_children(t, kids)


def type_alpha_eq(t1: TypeExpr, t2: TypeExpr, params1: tuple[str, ...], params2: tuple[str, ...]) -> bool:
    """Syntactic equality of two type expressions up to the positional
    renaming params1 -> params2."""
    if len(params1) != len(params2):
        return False
    return _type_eq(t1, t2, dict(zip(params1, params2)))
