"""The basic datatype-transformation operators, acting on declarations only.

Eight groups: renaming, permutation, introduction/elimination, folding/
unfolding, wrapping/unwrapping (grouping, kind conversions), swapping,
constructor inclusion/exclusion, component insertion/deletion.  Every
operator checks its preconditions and raises a Refusal rather than produce
an ill-formed module; the program-level completions live in `lift`.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import refuse
from .select import CompRangeSel, ConsComp, TypeSel, format_selector, resolve, resolve_range, rewrite_at
from .syntax import (
    AliasDecl,
    App,
    BUILTIN_TYPES,
    ConsDecl,
    DataDecl,
    Decl,
    Module,
    NewtypeDecl,
    TypeExpr,
    Var,
    free_type_vars,
    map_types_in_module,
    subst_type,
    subterms,
    type_alpha_eq,
    type_children,
)


@dataclass(frozen=True)
class TypeHdr:
    """A type name together with its parameter list."""

    name: str
    params: tuple[str, ...] = ()


@dataclass(frozen=True)
class Permutation:
    """Image list: new position j holds the old component image[j-1]."""

    image: tuple[int, ...]

    def validate(self, n: int) -> None:
        if sorted(self.image) != list(range(1, n + 1)):
            refuse("BadPermutation", f"{list(self.image)} is not a permutation of 1..{n}")

    def apply(self, items: tuple) -> tuple:
        return tuple(items[i - 1] for i in self.image)


@dataclass(frozen=True)
class DataUnifier:
    """Name-level correspondence between two structurally equivalent types."""

    old_ty: str
    new_ty: str
    cons_pairs: tuple[tuple[str, str], ...]


# ---------------------------------------------------------------------------
# renaming and permutation

def rename_type(m: Module, old: str, new: str) -> Module:
    if m.type_decl(old) is None:
        refuse("UnknownName", f"no type named {old}")
    if new in BUILTIN_TYPES or m.type_decl(new) is not None:
        refuse("NameClash", f"type name {new} is already in use")

    def ren(t: TypeExpr) -> TypeExpr:
        if isinstance(t, App) and t.name == old:
            return App(new, t.args)
        return t

    m = map_types_in_module(m, ren)
    decls = []
    for d in m.decls:
        if isinstance(d, AliasDecl) and d.name == old:
            d = AliasDecl(new, d.params, d.rhs)
        elif isinstance(d, NewtypeDecl) and d.name == old:
            d = NewtypeDecl(new, d.params, d.con)
        elif isinstance(d, DataDecl) and d.name == old:
            d = DataDecl(new, d.params, d.conss)
        decls.append(d)
    return Module(tuple(decls), m.comp_focus)


def rename_cons(m: Module, old: str, new: str) -> Module:
    """Declaration-site constructor rename; pattern/expression sites are
    completed by lift.lift_rename_cons."""
    if old == new:
        return m
    owner = m.cons_owner(old)
    if owner is None:
        refuse("UnknownName", f"no constructor named {old}")
    if m.cons_owner(new) is not None:
        refuse("NameClash", f"constructor name {new} is already in use")
    return _replace_cons(m, old, lambda c: ConsDecl(new, c.components))


def _replace_cons(m: Module, cons: str, f) -> Module:
    decls = []
    for d in m.decls:
        if isinstance(d, NewtypeDecl) and d.con.name == cons:
            d = NewtypeDecl(d.name, d.params, f(d.con))
        elif isinstance(d, DataDecl) and any(c.name == cons for c in d.conss):
            d = DataDecl(d.name, d.params, tuple(f(c) if c.name == cons else c for c in d.conss))
        decls.append(d)
    return Module(tuple(decls), m.comp_focus)


def permute_type_params(m: Module, ty: str, p: Permutation) -> Module:
    d = m.type_decl(ty)
    if d is None:
        refuse("UnknownName", f"no type named {ty}")
    p.validate(len(d.params))

    def reorder(t: TypeExpr) -> TypeExpr:
        if isinstance(t, App) and t.name == ty:
            return App(ty, p.apply(t.args))
        return t

    m = map_types_in_module(m, reorder)
    decls = []
    for dd in m.decls:
        if isinstance(dd, AliasDecl) and dd.name == ty:
            dd = AliasDecl(ty, p.apply(dd.params), dd.rhs)
        elif isinstance(dd, NewtypeDecl) and dd.name == ty:
            dd = NewtypeDecl(ty, p.apply(dd.params), dd.con)
        elif isinstance(dd, DataDecl) and dd.name == ty:
            dd = DataDecl(ty, p.apply(dd.params), dd.conss)
        decls.append(dd)
    return Module(tuple(decls), m.comp_focus)


def permute_cons_components(m: Module, cons: str, p: Permutation) -> Module:
    owner = m.cons_owner(cons)
    if owner is None:
        refuse("UnknownName", f"no constructor named {cons}")
    p.validate(owner[1].arity)
    return _replace_cons(m, cons, lambda c: ConsDecl(cons, p.apply(c.components)))


# ---------------------------------------------------------------------------
# introduction and elimination

def introduce(m: Module, decls: list[Decl]) -> Module:
    for d in decls:
        if not isinstance(d, (AliasDecl, NewtypeDecl, DataDecl)):
            refuse("BadArguments", "introduce takes type declarations only")
    result = Module(m.decls + tuple(decls), m.comp_focus)
    new_tys = set()
    new_cons = set()
    for d in decls:
        if d.name in BUILTIN_TYPES or m.type_decl(d.name) is not None or d.name in new_tys:
            refuse("NameClash", f"type name {d.name} is already in use")
        new_tys.add(d.name)
        for c in result.constructors(d):
            if m.cons_owner(c.name) is not None or c.name in new_cons:
                refuse("NameClash", f"constructor name {c.name} is already in use")
            new_cons.add(c.name)
    _validate_type_decls(result, decls)
    return result


def _validate_type_decls(m: Module, decls: list[Decl]) -> None:
    for d in decls:
        comps = [(d.rhs, d.params)] if isinstance(d, AliasDecl) else [
            (t, d.params) for c in m.constructors(d) for t in c.components
        ]
        for t, params in comps:
            for _, sub in subterms(t):
                if isinstance(sub, Var) and sub.name not in params:
                    refuse("UnboundTypeVar", f"type variable {sub.name} is not a parameter of {d.name}")
                if isinstance(sub, App):
                    arity = m.type_arity(sub.name)
                    if arity is None:
                        refuse("UnknownName", f"unknown type {sub.name} in {d.name}")
                    if arity != len(sub.args):
                        refuse("ArityMismatch", f"{sub.name} expects {arity} arguments")


def eliminate(m: Module, names: list[str]) -> Module:
    for n in names:
        if m.type_decl(n) is None:
            refuse("UnknownName", f"no type named {n}")
    from . import lift  # the reference scan walks equations too

    offenders = lift.check_eliminate(m, names)
    if offenders:
        refuse("StillReferenced", f"{', '.join(names)} still referenced", tuple(offenders))
    decls = tuple(d for d in m.decls if not (isinstance(d, (AliasDecl, NewtypeDecl, DataDecl)) and d.name in names))
    return Module(decls, m.comp_focus)


# ---------------------------------------------------------------------------
# folding and unfolding (type aliases only)

def _match_type(pattern: TypeExpr, target: TypeExpr, binders: tuple[str, ...], out: dict) -> bool:
    if isinstance(pattern, Var) and pattern.name in binders:
        if pattern.name in out:
            return out[pattern.name] == target
        out[pattern.name] = target
        return True
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, Var):
        return pattern.name == target.name
    if isinstance(pattern, App) and pattern.name != target.name:
        return False
    kp, kt = type_children(pattern), type_children(target)
    return len(kp) == len(kt) and all(_match_type(a, b, binders, out) for a, b in zip(kp, kt))


def _reachable_aliases(m: Module, start: str) -> set[str]:
    out = {start}
    frontier = [start]
    while frontier:
        name = frontier.pop()
        d = m.type_decl(name)
        if not isinstance(d, AliasDecl):
            continue
        for _, sub in subterms(d.rhs):
            if isinstance(sub, App) and sub.name not in out:
                out.add(sub.name)
                frontier.append(sub.name)
    return out


def fold_alias(m: Module, sel: TypeSel, hdr: TypeHdr, arg_map: dict[str, tuple[int, ...]] | None = None) -> Module:
    d = m.type_decl(hdr.name)
    if d is None or not isinstance(d, AliasDecl):
        refuse("NotAnAlias", f"{hdr.name} is not a declared type alias")
    from .select import AliasRhs

    if isinstance(sel, AliasRhs) and sel.name in _reachable_aliases(m, hdr.name):
        refuse(
            "CyclicAlias",
            f"folding {hdr.name} inside the definition of {sel.name} would make the aliases cyclic",
            (format_selector(sel),),
        )
    if hdr.params and hdr.params != d.params:
        refuse("BadArgMap", f"header parameters {list(hdr.params)} do not match the declaration")
    selected = resolve(m, sel)
    subst: dict[str, TypeExpr] = {}
    if arg_map:
        for param, path in arg_map.items():
            if param not in d.params:
                refuse("BadArgMap", f"{param} is not a parameter of {hdr.name}")
            node = selected
            for step in path:
                kids = type_children(node)
                if not 1 <= step <= len(kids):
                    refuse("BadArgMap", f"bad path {list(path)} into the selected expression")
                node = kids[step - 1]
            subst[param] = node
    if not _match_type(d.rhs, selected, d.params, subst):
        refuse("RhsMismatch", f"selected expression does not match the right-hand side of {hdr.name}",
               (format_selector(sel),))
    missing = [p for p in d.params if p not in subst]
    if missing:
        refuse("BadArgMap", f"cannot infer arguments for {', '.join(missing)}")
    replacement = App(hdr.name, tuple(subst[p] for p in d.params))
    return rewrite_at(m, sel, lambda _t: replacement)


def unfold_alias(m: Module, sel: TypeSel) -> Module:
    selected = resolve(m, sel)
    if not isinstance(selected, App):
        refuse("NotAliasApplication", "selected expression is not a type application", (format_selector(sel),))
    d = m.type_decl(selected.name)
    if not isinstance(d, AliasDecl):
        refuse("NotAliasApplication", f"{selected.name} is not a type alias", (format_selector(sel),))
    body = subst_type(d.rhs, dict(zip(d.params, selected.args)))
    return rewrite_at(m, sel, lambda _t: body)


# ---------------------------------------------------------------------------
# wrapping and unwrapping

def group_components(m: Module, r: CompRangeSel) -> Module:
    comps = resolve_range(m, r)
    if r.count < 2:
        refuse("BadRange", "grouping needs at least two components", (format_selector(r),))
    from .syntax import Tuple as TupleT

    grouped = TupleT(tuple(comps))

    def regroup(c: ConsDecl) -> ConsDecl:
        items = list(c.components)
        items[r.start - 1 : r.start - 1 + r.count] = [grouped]
        return ConsDecl(c.name, tuple(items))

    return _replace_cons(m, r.cons, regroup)


def ungroup_component(m: Module, ty: str, cons: str, index: int) -> Module:
    from .syntax import Tuple as TupleT

    comp = resolve(m, ConsComp(ty, cons, index))
    if not isinstance(comp, TupleT):
        refuse("NotATuple", f"component {index} of {cons} is not a tuple",
               (format_selector(ConsComp(ty, cons, index)),))

    def split(c: ConsDecl) -> ConsDecl:
        items = list(c.components)
        items[index - 1 : index] = list(comp.elems)
        return ConsDecl(c.name, tuple(items))

    return _replace_cons(m, cons, split)


def alias_to_newtype(m: Module, ty: str, cons: str) -> Module:
    d = m.type_decl(ty)
    if not isinstance(d, AliasDecl):
        refuse("NotAnAlias", f"{ty} is not a type alias")
    if m.cons_owner(cons) is not None:
        refuse("NameClash", f"constructor name {cons} is already in use")
    new = NewtypeDecl(ty, d.params, ConsDecl(cons, (d.rhs,)))
    return Module(tuple(new if dd is d else dd for dd in m.decls), m.comp_focus)


def newtype_to_alias(m: Module, ty: str) -> Module:
    d = m.type_decl(ty)
    if not isinstance(d, NewtypeDecl):
        refuse("NotANewtype", f"{ty} is not a newtype")
    new = AliasDecl(ty, d.params, d.con.components[0])
    return Module(tuple(new if dd is d else dd for dd in m.decls), m.comp_focus)


def newtype_to_data(m: Module, ty: str) -> Module:
    d = m.type_decl(ty)
    if not isinstance(d, NewtypeDecl):
        refuse("NotANewtype", f"{ty} is not a newtype")
    new = DataDecl(ty, d.params, (d.con,))
    return Module(tuple(new if dd is d else dd for dd in m.decls), m.comp_focus)


def data_to_newtype(m: Module, ty: str) -> Module:
    d = m.type_decl(ty)
    if d is None:
        refuse("UnknownName", f"no type named {ty}")
    if not isinstance(d, DataDecl) or len(d.conss) != 1 or d.conss[0].arity != 1:
        refuse("NotConvertibleToNewtype", f"{ty} must be a datatype with one unary constructor")
    new = NewtypeDecl(ty, d.params, d.conss[0])
    return Module(tuple(new if dd is d else dd for dd in m.decls), m.comp_focus)


# ---------------------------------------------------------------------------
# swapping types on use sites

def swap_alias(m: Module, old: str, new: str, sel: TypeSel) -> Module:
    do, dn = m.type_decl(old), m.type_decl(new)
    if do is None or dn is None:
        refuse("UnknownName", f"both {old} and {new} must be declared")
    if not (isinstance(do, AliasDecl) and isinstance(dn, AliasDecl)):
        refuse("NotEquivalent", f"{old} and {new} must both be type aliases")
    if not type_alpha_eq(do.rhs, dn.rhs, do.params, dn.params):
        refuse("NotEquivalent", f"{old} and {new} have different right-hand sides")
    selected = resolve(m, sel)
    if not (isinstance(selected, App) and selected.name == old):
        refuse("NotAnApplicationOfOld", f"selected expression does not apply {old}", (format_selector(sel),))
    return rewrite_at(m, sel, lambda t: App(new, selected.args))


def validate_unifiers(m: Module, unifiers: list[DataUnifier]) -> None:
    rename = {u.old_ty: u.new_ty for u in unifiers}
    for u in unifiers:
        do, dn = m.type_decl(u.old_ty), m.type_decl(u.new_ty)
        if do is None or dn is None:
            refuse("UnifierInvalid", f"{u.old_ty} and {u.new_ty} must both be declared")
        if type(do) is not type(dn) or isinstance(do, AliasDecl):
            refuse("UnifierInvalid", f"{u.old_ty} and {u.new_ty} must be the same kind of datatype")
        if len(do.params) != len(dn.params):
            refuse("UnifierInvalid", f"{u.old_ty} and {u.new_ty} differ in parameter count")
        old_cons = {c.name: c for c in m.constructors(do)}
        new_cons = {c.name: c for c in m.constructors(dn)}
        if sorted(old_cons) != sorted(p[0] for p in u.cons_pairs) or sorted(new_cons) != sorted(
            p[1] for p in u.cons_pairs
        ):
            refuse("UnifierInvalid", f"constructor pairs are not a bijection for {u.old_ty}/{u.new_ty}")
        param_env = dict(zip(do.params, (Var(p) for p in dn.params)))
        for oc_name, nc_name in u.cons_pairs:
            oc, nc = old_cons[oc_name], new_cons[nc_name]
            if oc.arity != nc.arity:
                refuse("UnifierInvalid", f"{oc_name} and {nc_name} differ in arity")
            for told, tnew in zip(oc.components, nc.components):
                expected = _rename_heads(subst_type(told, param_env), rename)
                if expected != tnew:
                    refuse(
                        "UnifierInvalid",
                        f"component types of {oc_name} and {nc_name} do not correspond",
                    )


def _rename_heads(t: TypeExpr, rename: dict[str, str]) -> TypeExpr:
    from .syntax import map_type

    def go(node: TypeExpr) -> TypeExpr:
        if isinstance(node, App) and node.name in rename:
            return App(rename[node.name], node.args)
        return node

    return map_type(t, go)


def swap_data(m: Module, unifiers: list[DataUnifier], sel: TypeSel) -> Module:
    """Rewire one use site; mediators and boundaries are lift's business."""
    validate_unifiers(m, unifiers)
    selected = resolve(m, sel)
    new_by_old = {u.old_ty: u.new_ty for u in unifiers}
    if not (isinstance(selected, App) and selected.name in new_by_old):
        refuse("NotAnApplicationOfOld", "selected expression does not apply a unified type", (format_selector(sel),))
    return rewrite_at(m, sel, lambda t: App(new_by_old[selected.name], selected.args))


# ---------------------------------------------------------------------------
# inclusion and exclusion of constructors

def include_cons(m: Module, ty: str, c: ConsDecl, position: int | None = None) -> Module:
    d = m.type_decl(ty)
    if d is None:
        refuse("UnknownName", f"no type named {ty}")
    if not isinstance(d, DataDecl):
        refuse("NotAData", f"{ty} is not a proper datatype")
    if m.cons_owner(c.name) is not None:
        refuse("NameClash", f"constructor name {c.name} is already in use")
    for t in c.components:
        unknown = free_type_vars(t) - set(d.params)
        if unknown:
            refuse("UnboundTypeVar", f"type variables {sorted(unknown)} are not parameters of {ty}")
    pos = len(d.conss) + 1 if position is None else position
    if not 1 <= pos <= len(d.conss) + 1:
        refuse("BadIndex", f"insertion position {pos} outside 1..{len(d.conss) + 1}")
    probe = Module(m.decls + (DataDecl("_Probe", d.params, (c,)),))
    _validate_type_decls(probe, [probe.decls[-1]])
    conss = d.conss[: pos - 1] + (c,) + d.conss[pos - 1 :]
    new = DataDecl(ty, d.params, conss)
    return Module(tuple(new if dd is d else dd for dd in m.decls), m.comp_focus)


def exclude_cons(m: Module, ty: str, cons: str) -> Module:
    d = m.type_decl(ty)
    if d is None:
        refuse("UnknownName", f"no type named {ty}")
    if not isinstance(d, DataDecl):
        refuse("NotAData", f"{ty} is not a proper datatype")
    if all(c.name != cons for c in d.conss):
        refuse("UnknownName", f"{ty} has no constructor {cons}")
    if len(d.conss) < 2:
        refuse("LastConstructor", f"cannot remove the only constructor of {ty}")
    new = DataDecl(ty, d.params, tuple(c for c in d.conss if c.name != cons))
    return Module(tuple(new if dd is d else dd for dd in m.decls), m.comp_focus)


# ---------------------------------------------------------------------------
# insertion and deletion of components

def insert_component(m: Module, cons: str, i: int, c: TypeExpr) -> Module:
    owner = m.cons_owner(cons)
    if owner is None:
        refuse("NotADataOrNewtypeCons", f"no constructor named {cons}")
    d, cd = owner
    if isinstance(d, NewtypeDecl):
        refuse("NotADataOrNewtypeCons", f"{cons} belongs to a newtype, whose arity is fixed at one")
    if not 1 <= i <= cd.arity + 1:
        refuse("BadIndex", f"position {i} outside 1..{cd.arity + 1}")
    unknown = free_type_vars(c) - set(d.params)
    if unknown:
        refuse("UnboundTypeVar", f"type variables {sorted(unknown)} are not parameters of {d.name}")
    probe = Module(m.decls + (DataDecl("_Probe", d.params, (ConsDecl("_ProbeCons", (c,)),)),))
    _validate_type_decls(probe, [probe.decls[-1]])

    def ins(cd2: ConsDecl) -> ConsDecl:
        comps = cd2.components[: i - 1] + (c,) + cd2.components[i - 1 :]
        return ConsDecl(cons, comps)

    return _replace_cons(m, cons, ins)


def delete_component(m: Module, cons: str, i: int) -> Module:
    owner = m.cons_owner(cons)
    if owner is None:
        refuse("UnknownName", f"no constructor named {cons}")
    d, cd = owner
    if isinstance(d, NewtypeDecl):
        refuse("NotANewtypeTarget", f"{cons} is a newtype constructor; its single component cannot be deleted")
    if not 1 <= i <= cd.arity:
        refuse("BadIndex", f"position {i} outside 1..{cd.arity}")

    def rem(cd2: ConsDecl) -> ConsDecl:
        comps = cd2.components[: i - 1] + cd2.components[i:]
        return ConsDecl(cons, comps)

    return _replace_cons(m, cons, rem)
