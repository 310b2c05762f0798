"""Program-level completion of the datatype operators.

Datatype operators change declarations; the functions here keep the
equations honest: they rewrite patterns and expressions, eta-pump
partially applied constructors to reach their components, generate
mediator functions between structurally equivalent datatypes, and plant
`undefined` to-do markers where a structure change leaves semantics open.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import refuse
from .select import AliasRhs, NewtypeRhs, ConsComp, SigUse, all_selectors, format_selector
from .syntax import (
    AliasDecl,
    App,
    ConsDecl,
    Decl,
    ECase,
    ECon,
    EList,
    ELam,
    ETuple,
    EUndefined,
    EVar,
    EApp,
    Equation,
    Expr,
    Fun,
    FunDecl,
    Module,
    PCon,
    PTuple,
    PVar,
    PWild,
    Pattern,
    Sig,
    Tuple,
    TypeExpr,
    Var,
    app_spine,
    expand_aliases,
    expr_children,
    free_expr_vars,
    fresh_names,
    make_app,
    map_equations,
    map_patterns,
    pattern_vars,
    pattern_cons,
    subterms,
    used_var_names,
)
from .typeops import DataUnifier


@dataclass(frozen=True)
class TodoMarker:
    """Coordinates of one `undefined` node: function, equation, path."""

    fun: str
    equation: int  # 1-based
    path: tuple[int, ...]

    def loc(self) -> str:
        return f"{self.fun}/{self.equation}/" + ".".join(str(i) for i in self.path)


@dataclass(frozen=True)
class MediatorPair:
    to_new: str
    to_old: str
    unifier: DataUnifier


def scan_todos(m: Module) -> list[TodoMarker]:
    """All `undefined` coordinates in the module, in declaration order."""
    out: list[TodoMarker] = []
    for d in m.decls:
        if not isinstance(d, FunDecl):
            continue
        for k, eq in enumerate(d.equations, start=1):
            def walk(e: Expr, path: tuple[int, ...]) -> None:
                if isinstance(e, EUndefined):
                    out.append(TodoMarker(d.fun, k, path))
                for i, kid in enumerate(expr_children(e), start=1):
                    walk(kid, path + (i,))

            walk(eq.rhs, ())
    return out


# ---------------------------------------------------------------------------
# generic constructor-site rewriting

def eta_pump(e: Expr, cons: str, arity: int, used: set[str] | None = None) -> Expr:
    """Replace every underapplied occurrence of `cons` by an n-ary lambda
    applying it, so each component position becomes addressable."""
    used = set() if used is None else used
    return _rewrite_cons_sites(e, cons, arity, lambda args: args, used)


def _rewrite_cons_sites(e: Expr, cons: str, old_arity: int, arg_fn, used: set[str]) -> Expr:
    """Apply arg_fn to the first old_arity arguments at every application of
    `cons`; underapplied occurrences are eta-pumped first."""

    def go(e: Expr) -> Expr:
        root, args = app_spine(e)
        args = [go(a) for a in args]
        if isinstance(root, ECon) and root.name == cons:
            if len(args) >= old_arity:
                head = make_app(ECon(cons), list(arg_fn(args[:old_arity])))
                return make_app(head, args[old_arity:])
            xs = fresh_names("x", old_arity, used)
            inner = make_app(ECon(cons), list(arg_fn([EVar(x) for x in xs])))
            return make_app(ELam(tuple(xs), inner), args)
        return make_app(_go_inside(root), args)

    def _go_inside(root: Expr) -> Expr:
        if isinstance(root, ELam):
            return ELam(root.params, go(root.body))
        if isinstance(root, ECase):
            return ECase(go(root.scrutinee), tuple((p, go(b)) for p, b in root.alts))
        if isinstance(root, ETuple):
            return ETuple(tuple(go(x) for x in root.elems))
        if isinstance(root, EList):
            return EList(tuple(go(x) for x in root.elems))
        return root

    return go(e)


def _rewrite_cons_patterns(m: Module, cons: str, old_arity: int, sub_fn) -> Module:
    """Apply sub_fn to the subpattern list of every PCon(cons, ...) in the
    program, including patterns inside case alternatives."""

    def fix(p: Pattern) -> Pattern:
        if isinstance(p, PCon) and p.name == cons:
            if len(p.subpatterns) != old_arity:
                refuse(
                    "UnsaturatedPattern",
                    f"pattern for {cons} has {len(p.subpatterns)} subpatterns, expected {old_arity}",
                )
            return PCon(cons, tuple(sub_fn(list(p.subpatterns))))
        return p

    def fix_expr(e: Expr) -> Expr:
        if isinstance(e, ECase):
            return ECase(e.scrutinee, tuple((map_patterns(p, fix), b) for p, b in e.alts))
        return e

    from .syntax import map_exprs

    def on_eq(eq: Equation) -> Equation:
        pats = tuple(map_patterns(p, fix) for p in eq.patterns)
        return Equation(eq.fun, pats, map_exprs(eq.rhs, fix_expr))

    return map_equations(m, on_eq)


def _rewrite_cons_exprs(m: Module, cons: str, old_arity: int, arg_fn) -> Module:
    used = used_var_names(m)

    def on_eq(eq: Equation) -> Equation:
        return Equation(eq.fun, eq.patterns, _rewrite_cons_sites(eq.rhs, cons, old_arity, arg_fn, used))

    return map_equations(m, on_eq)


# ---------------------------------------------------------------------------
# renaming and permutation

def lift_rename_cons(m: Module, old: str, new: str) -> Module:
    from .syntax import map_exprs

    def fix_pat(p: Pattern) -> Pattern:
        if isinstance(p, PCon) and p.name == old:
            return PCon(new, p.subpatterns)
        return p

    def fix_expr(e: Expr) -> Expr:
        if isinstance(e, ECon) and e.name == old:
            return ECon(new)
        if isinstance(e, ECase):
            return ECase(e.scrutinee, tuple((map_patterns(p, fix_pat), b) for p, b in e.alts))
        return e

    def on_eq(eq: Equation) -> Equation:
        pats = tuple(map_patterns(p, fix_pat) for p in eq.patterns)
        return Equation(eq.fun, pats, map_exprs(eq.rhs, fix_expr))

    return map_equations(m, on_eq)


def lift_permute_components(m: Module, cons: str, image: tuple[int, ...]) -> Module:
    n = len(image)
    m = _rewrite_cons_patterns(m, cons, n, lambda subs: [subs[i - 1] for i in image])
    return _rewrite_cons_exprs(m, cons, n, lambda args: [args[i - 1] for i in image])


# ---------------------------------------------------------------------------
# grouping and ungrouping

def lift_group(m: Module, cons: str, start: int, count: int, old_arity: int) -> Module:
    lo, hi = start - 1, start - 1 + count

    def pat_fn(subs: list[Pattern]) -> list[Pattern]:
        return subs[:lo] + [PTuple(tuple(subs[lo:hi]))] + subs[hi:]

    def arg_fn(args: list[Expr]) -> list[Expr]:
        return args[:lo] + [ETuple(tuple(args[lo:hi]))] + args[hi:]

    m = _rewrite_cons_patterns(m, cons, old_arity, pat_fn)
    return _rewrite_cons_exprs(m, cons, old_arity, arg_fn)


def lift_ungroup(m: Module, cons: str, index: int, width: int, old_arity: int) -> Module:
    at = index - 1

    def pat_fn(subs: list[Pattern]) -> list[Pattern]:
        target = subs[at]
        if isinstance(target, PTuple) and len(target.subpatterns) == width:
            spliced = list(target.subpatterns)
        elif isinstance(target, PWild):
            spliced = [PWild() for _ in range(width)]
        else:
            refuse(
                "UnsaturatedUntuplable",
                f"component {index} of a {cons} pattern is not a literal tuple",
            )
        return subs[:at] + spliced + subs[at + 1 :]

    def arg_fn(args: list[Expr]) -> list[Expr]:
        target = args[at]
        if not (isinstance(target, ETuple) and len(target.elems) == width):
            refuse(
                "UnsaturatedUntuplable",
                f"argument {index} of a {cons} application is not a literal tuple",
            )
        return args[:at] + list(target.elems) + args[at + 1 :]

    m = _rewrite_cons_patterns(m, cons, old_arity, pat_fn)
    return _rewrite_cons_exprs(m, cons, old_arity, arg_fn)


# ---------------------------------------------------------------------------
# newtype wrapping and unwrapping

def _split_spine(t: TypeExpr, n: int) -> tuple[list[TypeExpr], TypeExpr]:
    """First n arrow arguments plus the remaining result type."""
    args: list[TypeExpr] = []
    while len(args) < n and isinstance(t, Fun):
        args.append(t.src)
        t = t.dst
    return args, t


def _occurrence_kind(m: Module, t: TypeExpr, ty: str) -> str:
    """exact / inside / absent, after expanding every alias but ty."""
    expanded = expand_aliases(m, t, opaque=frozenset({ty}))
    if isinstance(expanded, App) and expanded.name == ty:
        return "exact"
    if any(isinstance(s, App) and s.name == ty for _, s in subterms(expanded)):
        return "inside"
    return "absent"


def _component_completions(m: Module, ty: str) -> list[tuple[str, int, int]]:
    """(cons, position, arity) for every datatype component that is exactly
    the type ty; nested occurrences are refused."""
    out: list[tuple[str, int, int]] = []
    for d in m.type_decls():
        if isinstance(d, AliasDecl) or d.name == ty:
            continue
        for c in m.constructors(d):
            for j, comp in enumerate(c.components, start=1):
                kind = _occurrence_kind(m, comp, ty)
                if kind == "exact":
                    out.append((c.name, j, c.arity))
                elif kind == "inside":
                    refuse(
                        "NestedOccurrenceUnsupported",
                        f"{ty} occurs inside component {j} of {c.name}",
                        (format_selector(ConsComp(d.name, c.name, j)),),
                    )
    return out


def _signature_positions(m: Module, ty: str) -> dict[str, tuple[list[int], bool]]:
    """fun -> (argument positions to wrap, wrap result?), for every signed
    function with equations; refuses nested occurrences and unsigned use."""
    affected: dict[str, tuple[list[int], bool]] = {}
    for d in m.decls:
        if not isinstance(d, Sig):
            continue
        fd = m.fun_decl(d.fun)
        if fd is None:
            continue
        arity = len(fd.equations[0].patterns)
        args, result = _split_spine(d.type, arity)
        positions: list[int] = []
        for i, t in enumerate(args, start=1):
            kind = _occurrence_kind(m, t, ty)
            if kind == "exact":
                positions.append(i)
            elif kind == "inside":
                refuse(
                    "NestedOccurrenceUnsupported",
                    f"{ty} occurs nested in argument {i} of {d.fun}",
                    (format_selector(SigUse(d.fun)),),
                )
        wrap_result = False
        rkind = _occurrence_kind(m, result, ty)
        if rkind == "exact":
            wrap_result = True
        elif rkind == "inside":
            refuse(
                "NestedOccurrenceUnsupported",
                f"{ty} occurs nested in the result of {d.fun}",
                (format_selector(SigUse(d.fun)),),
            )
        if positions or wrap_result:
            affected[d.fun] = (positions, wrap_result)
    return affected


def _check_unsigned(m: Module, affected_funs: set[str], ty: str) -> None:
    for d in m.decls:
        if isinstance(d, FunDecl) and m.sig_of(d.fun) is None:
            refs = set()
            for eq in d.equations:
                refs |= free_expr_vars(eq.rhs, frozenset(v for p in eq.patterns for v in pattern_vars(p)))
            hits = refs & affected_funs
            if hits:
                refuse(
                    "UnsignedFunctionUsesType",
                    f"{d.fun} has no signature but uses {', '.join(sorted(hits))}, which involve {ty}",
                    (f"fun:{d.fun}",),
                )


def lift_alias_to_newtype(m: Module, ty: str, cons: str) -> Module:
    """Runs on the module after the declaration switched to a newtype."""
    affected = _signature_positions(m, ty)
    _check_unsigned(m, set(affected), ty)
    completions = _component_completions(m, ty)

    # function boundaries: strip the constructor off argument patterns,
    # wrap result expressions
    def on_eq(eq: Equation) -> Equation:
        if eq.fun not in affected:
            return eq
        positions, wrap_result = affected[eq.fun]
        pats = list(eq.patterns)
        for i in positions:
            pats[i - 1] = PCon(cons, (pats[i - 1],))
        rhs = EApp(ECon(cons), eq.rhs) if wrap_result else eq.rhs
        return Equation(eq.fun, tuple(pats), rhs)

    m = map_equations(m, on_eq)

    # component positions inside other datatypes
    for host_cons, j, arity in completions:
        m = _rewrite_cons_patterns(m, host_cons, arity, _wrap_sub(cons, j))
        m = _rewrite_cons_exprs(m, host_cons, arity, _wrap_arg(cons, j))
    return m


def _wrap_sub(cons: str, j: int):
    def fn(subs: list[Pattern]) -> list[Pattern]:
        subs = list(subs)
        subs[j - 1] = PCon(cons, (subs[j - 1],))
        return subs

    return fn


def _wrap_arg(cons: str, j: int):
    def fn(args: list[Expr]) -> list[Expr]:
        args = list(args)
        args[j - 1] = EApp(ECon(cons), args[j - 1])
        return args

    return fn


def lift_newtype_to_alias(m: Module, cons: str) -> Module:
    """Remove every occurrence of the wrapper constructor."""
    used = used_var_names(m)

    def fix_pat(p: Pattern) -> Pattern:
        if isinstance(p, PCon) and p.name == cons:
            if len(p.subpatterns) != 1:
                refuse("UnsaturatedPattern", f"pattern for {cons} must have exactly one subpattern")
            return p.subpatterns[0]
        return p

    def strip_expr(e: Expr) -> Expr:
        root, args = app_spine(e)
        args = [strip_expr(a) for a in args]
        if isinstance(root, ECon) and root.name == cons:
            if args:
                return make_app(args[0], args[1:])
            x = fresh_names("x", 1, used)[0]
            return ELam((x,), EVar(x))
        if isinstance(root, ELam):
            root = ELam(root.params, strip_expr(root.body))
        elif isinstance(root, ECase):
            root = ECase(
                strip_expr(root.scrutinee),
                tuple((map_patterns(p, fix_pat), strip_expr(b)) for p, b in root.alts),
            )
        elif isinstance(root, ETuple):
            root = ETuple(tuple(strip_expr(x) for x in root.elems))
        elif isinstance(root, EList):
            root = EList(tuple(strip_expr(x) for x in root.elems))
        return make_app(root, args)

    def on_eq(eq: Equation) -> Equation:
        pats = tuple(map_patterns(p, fix_pat) for p in eq.patterns)
        return Equation(eq.fun, pats, strip_expr(eq.rhs))

    return map_equations(m, on_eq)


# ---------------------------------------------------------------------------
# mediators and swap boundaries

def mediator_names(u: DataUnifier) -> tuple[str, str]:
    return f"to{u.new_ty}", f"from{u.new_ty}"


def generate_mediators(m: Module, u: DataUnifier, family: list[DataUnifier] | None = None) -> Module:
    """Append toX/fromX converting between the unified types, recursing on
    components that are themselves unified."""
    family = family or [u]
    to_name, from_name = mediator_names(u)
    taken = {d.fun for d in m.decls if isinstance(d, (Sig, FunDecl))}
    for name in (to_name, from_name):
        if name in taken:
            refuse("NameClash", f"function name {name} is already in use")
    do = m.type_decl(u.old_ty)
    dn = m.type_decl(u.new_ty)
    old_cons = {c.name: c for c in m.constructors(do)}
    new_cons = {c.name: c for c in m.constructors(dn)}
    params = tuple(Var(p) for p in do.params)

    def convert(x: Expr, comp: TypeExpr, direction: str) -> Expr:
        source = {f.old_ty: f for f in family} if direction == "to" else {f.new_ty: f for f in family}
        if isinstance(comp, App) and comp.name in source:
            f = source[comp.name]
            name = mediator_names(f)[0] if direction == "to" else mediator_names(f)[1]
            return EApp(EVar(name), x)
        nested = {s.name for _, s in subterms(comp) if isinstance(s, App)} & set(source)
        if nested:
            refuse(
                "NestedOccurrenceUnsupported",
                f"unified type {sorted(nested)[0]} occurs nested in a component; no mediator for that shape",
            )
        return x

    used = used_var_names(m)

    def equations(fun: str, pairs, cons_of, direction: str) -> list[Equation]:
        eqs = []
        for src_name, dst_name in pairs:
            src = cons_of[src_name]
            xs = fresh_names("x", src.arity, set(used))
            args = [convert(EVar(x), comp, direction) for x, comp in zip(xs, src.components)]
            eqs.append(
                Equation(fun, (PCon(src_name, tuple(PVar(x) for x in xs)),), make_app(ECon(dst_name), args))
            )
        return eqs

    to_sig = Sig(to_name, Fun(App(u.old_ty, params), App(u.new_ty, params)))
    to_fun = FunDecl(to_name, tuple(equations(to_name, u.cons_pairs, old_cons, "to")))
    from_sig = Sig(from_name, Fun(App(u.new_ty, params), App(u.old_ty, params)))
    from_fun = FunDecl(
        from_name, tuple(equations(from_name, [(b, a) for a, b in u.cons_pairs], new_cons, "from"))
    )
    return Module(m.decls + (to_sig, to_fun, from_sig, from_fun), m.comp_focus)


def _build_adapter(tb: TypeExpr, ta: TypeExpr, direction: str, pairs: dict, used: set[str]):
    """Expression converting a value of the after-type into the before-type
    (direction 'a2b') or vice versa ('b2a'); None means identity."""
    if tb == ta:
        return None
    if isinstance(tb, App) and isinstance(ta, App):
        pair = pairs.get((tb.name, ta.name))
        if pair is not None and tb.args == ta.args:
            to_name, from_name = pair
            return EVar(from_name) if direction == "a2b" else EVar(to_name)
    if isinstance(tb, Fun) and isinstance(ta, Fun):
        flip = "b2a" if direction == "a2b" else "a2b"
        conv_arg = _build_adapter(tb.src, ta.src, flip, pairs, used)
        conv_res = _build_adapter(tb.dst, ta.dst, direction, pairs, used)
        f, x = fresh_names("f", 1, used)[0], fresh_names("x", 1, used)[0]
        inner = EApp(EVar(f), _apply_conv(conv_arg, EVar(x)))
        return ELam((f,), ELam((x,), _apply_conv(conv_res, inner)))
    if isinstance(tb, Tuple) and isinstance(ta, Tuple) and len(tb.elems) == len(ta.elems):
        convs = [_build_adapter(a, b, direction, pairs, used) for a, b in zip(tb.elems, ta.elems)]
        t = fresh_names("t", 1, used)[0]
        xs = fresh_names("x", len(convs), used)
        body = ETuple(tuple(_apply_conv(c, EVar(x)) for c, x in zip(convs, xs)))
        return ELam((t,), ECase(EVar(t), ((PTuple(tuple(PVar(x) for x in xs)), body),)))
    refuse(
        "NestedOccurrenceUnsupported",
        "the swapped type occurs in a position no adapter is generated for",
    )


def _apply_conv(conv, e: Expr) -> Expr:
    return e if conv is None else EApp(conv, e)


def lift_swap_boundaries(m_before: Module, m_after: Module, unifiers: list[DataUnifier]) -> Module:
    """Insert mediator calls at the signatures whose meaning the swap
    changed, leaving every function body textually intact."""
    pairs = {}
    for u in unifiers:
        pairs[(u.old_ty, u.new_ty)] = mediator_names(u)

    # components of other datatypes must not silently change meaning
    for d in m_before.type_decls():
        da = m_after.type_decl(d.name)
        if da is None or isinstance(d, AliasDecl):
            continue
        for cb, ca in zip(m_before.constructors(d), m_after.constructors(da)):
            for j, (tb, ta) in enumerate(zip(cb.components, ca.components), start=1):
                eb = expand_aliases(m_before, tb)
                ea = expand_aliases(m_after, ta)
                if eb != ea:
                    refuse(
                        "NestedOccurrenceUnsupported",
                        f"the swap changes component {j} of {cb.name}; adapt datatype components explicitly",
                        (format_selector(ConsComp(d.name, cb.name, j)),),
                    )

    affected: dict[str, tuple[list, object]] = {}
    for d in m_after.decls:
        if not isinstance(d, Sig):
            continue
        fd = m_after.fun_decl(d.fun)
        if fd is None:
            continue
        sig_before = m_before.sig_of(d.fun)
        if sig_before is None:
            continue
        arity = len(fd.equations[0].patterns)
        args_b, res_b = _split_spine(sig_before.type, arity)
        args_a, res_a = _split_spine(d.type, arity)
        used = used_var_names(m_after)
        arg_convs = []
        for i, (tb, ta) in enumerate(zip(args_b, args_a), start=1):
            eb = expand_aliases(m_before, tb)
            ea = expand_aliases(m_after, ta)
            conv = _build_adapter(eb, ea, "a2b", pairs, used) if eb != ea else None
            arg_convs.append(conv)
        eb, ea = expand_aliases(m_before, res_b), expand_aliases(m_after, res_a)
        res_conv = _build_adapter(eb, ea, "b2a", pairs, used) if eb != ea else None
        if any(c is not None for c in arg_convs) or res_conv is not None:
            affected[d.fun] = (arg_convs, res_conv)

    _check_unsigned_swap(m_after, set(affected))

    used = used_var_names(m_after)

    def on_eq(eq: Equation) -> Equation:
        if eq.fun not in affected:
            return eq
        arg_convs, res_conv = affected[eq.fun]
        pats = list(eq.patterns)
        rhs = eq.rhs
        rebinds: list[tuple[str, Expr]] = []
        for i, conv in enumerate(arg_convs):
            if conv is None:
                continue
            p = pats[i]
            if isinstance(p, PWild):
                continue
            if not isinstance(p, PVar):
                refuse(
                    "BoundaryPatternUnsupported",
                    f"argument {i + 1} of {eq.fun} pattern-matches the swapped type directly",
                )
            fresh = fresh_names(p.name, 1, used)[0]
            pats[i] = PVar(fresh)
            rebinds.append((p.name, EApp(conv, EVar(fresh))))
        if rebinds:
            lam = ELam(tuple(name for name, _ in rebinds), rhs)
            rhs = make_app(lam, [arg for _, arg in rebinds])
        if res_conv is not None:
            rhs = EApp(res_conv, rhs)
        return Equation(eq.fun, tuple(pats), rhs)

    return map_equations(m_after, on_eq)


def _check_unsigned_swap(m: Module, affected_funs: set[str]) -> None:
    for d in m.decls:
        if isinstance(d, FunDecl) and m.sig_of(d.fun) is None:
            refs = set()
            for eq in d.equations:
                refs |= free_expr_vars(eq.rhs, frozenset(v for p in eq.patterns for v in pattern_vars(p)))
            hits = refs & affected_funs
            if hits:
                refuse(
                    "UnsignedFunctionUsesType",
                    f"{d.fun} has no signature but uses the adapted {', '.join(sorted(hits))}",
                    (f"fun:{d.fun}",),
                )


# ---------------------------------------------------------------------------
# inclusion and exclusion

def lift_include(m: Module, ty: str, new_cons: ConsDecl) -> Module:
    """Add `undefined` equations and case alternatives for a constructor
    that was just included into ty."""
    d = m.type_decl(ty)
    family = {c.name for c in m.constructors(d)} - {new_cons.name}
    wilds = tuple(PWild() for _ in range(new_cons.arity))

    decls: list[Decl] = []
    for decl in m.decls:
        if not isinstance(decl, FunDecl):
            decls.append(decl)
            continue
        pos = None
        for eq in decl.equations:
            for j, p in enumerate(eq.patterns, start=1):
                if isinstance(p, PCon) and p.name in family:
                    pos = j
                    break
            if pos is not None:
                break
        eqs = list(decl.equations)
        if pos is not None:
            arity = len(decl.equations[0].patterns)
            pats = [PWild() for _ in range(arity)]
            pats[pos - 1] = PCon(new_cons.name, wilds)
            eqs.append(Equation(decl.fun, tuple(pats), EUndefined()))
        eqs = [Equation(eq.fun, eq.patterns, _extend_cases(eq.rhs, family, new_cons)) for eq in eqs]
        decls.append(FunDecl(decl.fun, tuple(eqs)))
    return Module(tuple(decls), m.comp_focus)


def _extend_cases(e: Expr, family: set[str], new_cons: ConsDecl) -> Expr:
    from .syntax import map_exprs

    wilds = tuple(PWild() for _ in range(new_cons.arity))

    def fix(e: Expr) -> Expr:
        if isinstance(e, ECase) and any(
            isinstance(p, PCon) and p.name in family for p, _ in e.alts
        ):
            return ECase(e.scrutinee, e.alts + ((PCon(new_cons.name, wilds), EUndefined()),))
        return e

    return map_exprs(e, fix)


def lift_exclude(m: Module, ty: str, cons: str) -> Module:
    """Remove the equations and alternatives matching on cons; remaining
    expression occurrences become `undefined` to-do markers."""
    from .syntax import map_exprs

    def on_eq(eq: Equation):
        if any(cons in pattern_cons(p) for p in eq.patterns):
            return None
        return eq

    decls: list[Decl] = []
    for decl in m.decls:
        if not isinstance(decl, FunDecl):
            decls.append(decl)
            continue
        eqs = [eq for eq in decl.equations if on_eq(eq) is not None]
        if not eqs:
            refuse(
                "WouldEmptyFunction",
                f"removing {cons} would leave {decl.fun} without equations",
                (f"fun:{decl.fun}",),
            )
        fixed = []
        for k, eq in enumerate(eqs, start=1):
            rhs = _drop_case_alts(eq.rhs, cons, decl.fun)
            rhs = _cons_to_bottom(rhs, cons)
            fixed.append(Equation(eq.fun, eq.patterns, rhs))
        decls.append(FunDecl(decl.fun, tuple(fixed)))
    return Module(tuple(decls), m.comp_focus)


def _drop_case_alts(e: Expr, cons: str, fun: str) -> Expr:
    from .syntax import map_exprs

    def fix(e: Expr) -> Expr:
        if isinstance(e, ECase):
            alts = tuple((p, b) for p, b in e.alts if cons not in pattern_cons(p))
            if not alts:
                refuse(
                    "WouldEmptyFunction",
                    f"removing {cons} would empty a case expression in {fun}",
                    (f"fun:{fun}",),
                )
            return ECase(e.scrutinee, alts)
        return e

    return map_exprs(e, fix)


def _cons_to_bottom(e: Expr, cons: str) -> Expr:
    """Replace the maximal application rooted at the constructor by bottom."""

    def go(e: Expr) -> Expr:
        root, args = app_spine(e)
        if isinstance(root, ECon) and root.name == cons:
            return EUndefined()
        args = [go(a) for a in args]
        if isinstance(root, ELam):
            root = ELam(root.params, go(root.body))
        elif isinstance(root, ECase):
            root = ECase(go(root.scrutinee), tuple((p, go(b)) for p, b in root.alts))
        elif isinstance(root, ETuple):
            root = ETuple(tuple(go(x) for x in root.elems))
        elif isinstance(root, EList):
            root = EList(tuple(go(x) for x in root.elems))
        return make_app(root, args)

    return go(e)


# ---------------------------------------------------------------------------
# insertion and deletion of components

def lift_insert(m: Module, cons: str, i: int, old_arity: int) -> Module:
    def pat_fn(subs: list[Pattern]) -> list[Pattern]:
        return subs[: i - 1] + [PWild()] + subs[i - 1 :]

    def arg_fn(args: list[Expr]) -> list[Expr]:
        return args[: i - 1] + [EUndefined()] + args[i - 1 :]

    m = _rewrite_cons_patterns(m, cons, old_arity, pat_fn)
    return _rewrite_cons_exprs(m, cons, old_arity, arg_fn)


def lift_delete(m: Module, cons: str, i: int, old_arity: int) -> Module:
    """Patterns and applications lose position i; variables bound by the
    deleted subpattern turn into bottom in their right-hand sides."""
    used = used_var_names(m)

    def fix_pattern(p: Pattern, removed: set[str]) -> Pattern:
        if isinstance(p, PCon):
            subs = [fix_pattern(s, removed) for s in p.subpatterns]
            if p.name == cons:
                if len(subs) != old_arity:
                    refuse(
                        "UnsaturatedPattern",
                        f"pattern for {cons} has {len(subs)} subpatterns, expected {old_arity}",
                    )
                removed.update(pattern_vars(subs[i - 1]))
                subs = subs[: i - 1] + subs[i:]
            return PCon(p.name, tuple(subs))
        if isinstance(p, PTuple):
            return PTuple(tuple(fix_pattern(s, removed) for s in p.subpatterns))
        return p

    def fix_expr(e: Expr, removed: frozenset[str]) -> Expr:
        root, args = app_spine(e)
        args = [fix_expr(a, removed) for a in args]
        if isinstance(root, ECon) and root.name == cons:
            if len(args) >= old_arity:
                head_args = args[:old_arity]
                head_args = head_args[: i - 1] + head_args[i:]
                return make_app(make_app(ECon(cons), head_args), args[old_arity:])
            xs = fresh_names("x", old_arity, used)
            inner_args = [EVar(x) for x in xs]
            inner_args = inner_args[: i - 1] + inner_args[i:]
            return make_app(ELam(tuple(xs), make_app(ECon(cons), inner_args)), args)
        if isinstance(root, EVar) and root.name in removed:
            root = EUndefined()
        elif isinstance(root, ELam):
            root = ELam(root.params, fix_expr(root.body, removed - frozenset(root.params)))
        elif isinstance(root, ECase):
            new_alts = []
            for p, b in root.alts:
                local: set[str] = set()
                p2 = fix_pattern(p, local)
                shadowed = frozenset(pattern_vars(p2))
                new_alts.append((p2, fix_expr(b, (removed | frozenset(local)) - shadowed)))
            root = ECase(fix_expr(root.scrutinee, removed), tuple(new_alts))
        elif isinstance(root, ETuple):
            root = ETuple(tuple(fix_expr(x, removed) for x in root.elems))
        elif isinstance(root, EList):
            root = EList(tuple(fix_expr(x, removed) for x in root.elems))
        return make_app(root, args)

    def on_eq(eq: Equation) -> Equation:
        removed: set[str] = set()
        pats = tuple(fix_pattern(p, removed) for p in eq.patterns)
        surviving = frozenset(v for p in pats for v in pattern_vars(p))
        rhs = fix_expr(eq.rhs, frozenset(removed) - surviving)
        return Equation(eq.fun, pats, rhs)

    return map_equations(m, on_eq)


# ---------------------------------------------------------------------------
# elimination support

def check_eliminate(m: Module, names: list[str]) -> list[str]:
    """Locations still referring to the given types (or their constructors),
    ignoring the declarations being removed themselves."""
    removed_cons: set[str] = set()
    for n in names:
        d = m.type_decl(n)
        if d is not None:
            removed_cons |= {c.name for c in m.constructors(d)}
    offenders: list[str] = []
    skip_roots = set(names)
    for sel, sub in all_selectors(m):
        if isinstance(sel, (AliasRhs, NewtypeRhs)) and sel.name in skip_roots:
            continue
        if isinstance(sel, ConsComp) and sel.ty in skip_roots:
            continue
        if isinstance(sub, App) and sub.name in names and not sel.path:
            offenders.append(format_selector(sel))
        elif isinstance(sub, App) and sub.name in names:
            offenders.append(format_selector(sel))
    # deduplicate nested reports: keep the outermost mention per root
    seen: set[str] = set()
    unique = []
    for o in offenders:
        if o not in seen:
            seen.add(o)
            unique.append(o)
    offenders = unique
    for d in m.decls:
        if not isinstance(d, FunDecl):
            continue
        for k, eq in enumerate(d.equations, start=1):
            cons_in_pats = set()
            for p in eq.patterns:
                cons_in_pats |= pattern_cons(p)
            if cons_in_pats & removed_cons or _expr_mentions_cons(eq.rhs, removed_cons):
                offenders.append(f"eq:{d.fun}/{k}")
    return offenders


def _expr_mentions_cons(e: Expr, cons: set[str]) -> bool:
    if isinstance(e, ECon) and e.name in cons:
        return True
    if isinstance(e, ECase):
        if any(pattern_cons(p) & cons for p, _ in e.alts):
            return True
    return any(_expr_mentions_cons(k, cons) for k in expr_children(e))
