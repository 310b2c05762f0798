"""Selectors, focus markers, predicates, and the mediations between them.

A type fragment can be addressed three ways: by an in-tree focus marker, by
a positional selector, or by a predicate over subterms.  Selectors have a
flat string form for scripts and the CLI:

    alias:Block                alias right-hand side
    newtype:State/rhs          newtype right-hand side (the one component)
    cons:ConsList.Cons/2       second component of constructor Cons
    cons:Prog.Prog/2-3         component range (start-end)
    sig:deadEnd                a signature's type
    .../path:1.2               descend into the addressed type expression

Path steps are 1-based child indices: Fun = [from, to]; App and Tuple use
argument order; List = [elem].
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import refuse
from .syntax import (
    AliasDecl,
    App,
    ConsDecl,
    DataDecl,
    FocusCompList,
    FocusName,
    FocusType,
    Fun,
    ListT,
    Module,
    NewtypeDecl,
    Sig,
    Tuple,
    TypeExpr,
    Var,
    count_foci,
    strip_focus,
    subterms,
    type_children,
    with_type_children,
)

Path = tuple[int, ...]


# ---------------------------------------------------------------------------
# selector types

@dataclass(frozen=True)
class AliasRhs:
    name: str
    path: Path = ()


@dataclass(frozen=True)
class NewtypeRhs:
    name: str
    path: Path = ()


@dataclass(frozen=True)
class ConsComp:
    ty: str
    cons: str
    index: int  # 1-based
    path: Path = ()


@dataclass(frozen=True)
class SigUse:
    fun: str
    path: Path = ()


TypeSel = AliasRhs | NewtypeRhs | ConsComp | SigUse


@dataclass(frozen=True)
class CompRangeSel:
    ty: str
    cons: str
    start: int  # 1-based
    count: int  # >= 1


# ---------------------------------------------------------------------------
# predicates

@dataclass(frozen=True)
class EqualsType:
    type: TypeExpr


@dataclass(frozen=True)
class MentionsName:
    name: str


@dataclass(frozen=True)
class TopLevelIs:
    shape: str  # Fun | Tuple | List | App | Var


TypePredicate = EqualsType | MentionsName | TopLevelIs

_SHAPES = {"Fun": Fun, "Tuple": Tuple, "List": ListT, "App": App, "Var": Var}


def predicate_holds(p: TypePredicate, t: TypeExpr) -> bool:
    if isinstance(p, EqualsType):
        return t == p.type
    if isinstance(p, MentionsName):
        return any(isinstance(s, App) and s.name == p.name for _, s in subterms(t))
    if isinstance(p, TopLevelIs):
        shape = _SHAPES.get(p.shape)
        if shape is None:
            refuse("BadArguments", f"unknown shape {p.shape}")
        return type(t) is shape
    raise TypeError(f"not a predicate: {p!r}")


# ---------------------------------------------------------------------------
# string form

def format_selector(sel: TypeSel | CompRangeSel) -> str:
    if isinstance(sel, CompRangeSel):
        end = sel.start + sel.count - 1
        return f"cons:{sel.ty}.{sel.cons}/{sel.start}-{end}"
    suffix = "/path:" + ".".join(str(i) for i in sel.path) if sel.path else ""
    if isinstance(sel, AliasRhs):
        return f"alias:{sel.name}{suffix}"
    if isinstance(sel, NewtypeRhs):
        return f"newtype:{sel.name}{suffix}"
    if isinstance(sel, ConsComp):
        return f"cons:{sel.ty}.{sel.cons}/{sel.index}{suffix}"
    if isinstance(sel, SigUse):
        return f"sig:{sel.fun}{suffix}"
    raise TypeError(f"not a selector: {sel!r}")


_PATH_RE = re.compile(r"^path:((?:\d+)(?:\.\d+)*)$")


def parse_selector(text: str) -> TypeSel | CompRangeSel:
    """Parse the flat string form; raises a BadArguments refusal."""
    parts = text.strip().split("/")
    head = parts[0]
    rest = parts[1:]
    if rest and rest[0] == "rhs":
        rest = rest[1:]

    def path_of(segs: list[str]) -> Path:
        if not segs:
            return ()
        mo = _PATH_RE.match(segs[0])
        if mo is None or len(segs) > 1:
            refuse("BadArguments", f"malformed selector {text!r}")
        return tuple(int(s) for s in mo.group(1).split("."))

    if head.startswith("alias:"):
        return AliasRhs(head[6:], path_of(rest))
    if head.startswith("newtype:"):
        return NewtypeRhs(head[8:], path_of(rest))
    if head.startswith("sig:"):
        return SigUse(head[4:], path_of(rest))
    if head.startswith("cons:"):
        name = head[5:]
        if "." not in name or not rest:
            refuse("BadArguments", f"malformed selector {text!r}")
        ty, cons = name.split(".", 1)
        idx = rest[0]
        if re.fullmatch(r"\d+-\d+", idx):
            start, end = (int(x) for x in idx.split("-"))
            if rest[1:]:
                refuse("BadArguments", f"malformed selector {text!r}")
            return CompRangeSel(ty, cons, start, end - start + 1)
        if not idx.isdigit():
            refuse("BadArguments", f"malformed selector {text!r}")
        return ConsComp(ty, cons, int(idx), path_of(rest[1:]))
    refuse("BadArguments", f"malformed selector {text!r}")
    raise AssertionError  # unreachable


# ---------------------------------------------------------------------------
# resolution

def _root_of(m: Module, sel: TypeSel) -> TypeExpr:
    if isinstance(sel, AliasRhs):
        d = m.type_decl(sel.name)
        if d is None:
            refuse("UnknownName", f"no type named {sel.name}", (format_selector(sel),))
        if not isinstance(d, AliasDecl):
            refuse("KindMismatch", f"{sel.name} is not a type alias", (format_selector(sel),))
        return d.rhs
    if isinstance(sel, NewtypeRhs):
        d = m.type_decl(sel.name)
        if d is None:
            refuse("UnknownName", f"no type named {sel.name}", (format_selector(sel),))
        if not isinstance(d, NewtypeDecl):
            refuse("KindMismatch", f"{sel.name} is not a newtype", (format_selector(sel),))
        return d.con.components[0]
    if isinstance(sel, ConsComp):
        d = m.type_decl(sel.ty)
        if d is None:
            refuse("UnknownName", f"no type named {sel.ty}", (format_selector(sel),))
        if isinstance(d, AliasDecl):
            refuse("KindMismatch", f"{sel.ty} has no constructors", (format_selector(sel),))
        cons = next((c for c in m.constructors(d) if c.name == sel.cons), None)
        if cons is None:
            refuse("UnknownName", f"{sel.ty} has no constructor {sel.cons}", (format_selector(sel),))
        if not 1 <= sel.index <= cons.arity:
            refuse(
                "BadIndex",
                f"constructor {sel.cons} has arity {cons.arity}, no component {sel.index}",
                (format_selector(sel),),
            )
        return cons.components[sel.index - 1]
    if isinstance(sel, SigUse):
        sig = m.sig_of(sel.fun)
        if sig is None:
            refuse("UnknownName", f"no signature for {sel.fun}", (format_selector(sel),))
        return sig.type
    raise TypeError(f"not a selector: {sel!r}")


def _descend(t: TypeExpr, path: Path, sel: TypeSel) -> TypeExpr:
    for step in path:
        kids = type_children(t)
        if not 1 <= step <= len(kids):
            refuse("BadPath", f"no child {step} here", (format_selector(sel),))
        t = kids[step - 1]
    return t


def resolve(m: Module, sel: TypeSel) -> TypeExpr:
    """The subterm a selector addresses (focus markers are transparent)."""
    m = strip_focus(m)
    return _descend(_root_of(m, sel), sel.path, sel)


def resolve_range(m: Module, r: CompRangeSel) -> tuple[TypeExpr, ...]:
    m = strip_focus(m)
    d = m.type_decl(r.ty)
    if d is None:
        refuse("UnknownName", f"no type named {r.ty}", (format_selector(r),))
    if isinstance(d, AliasDecl):
        refuse("KindMismatch", f"{r.ty} has no constructors", (format_selector(r),))
    cons = next((c for c in m.constructors(d) if c.name == r.cons), None)
    if cons is None:
        refuse("UnknownName", f"{r.ty} has no constructor {r.cons}", (format_selector(r),))
    if r.start < 1 or r.count < 1 or r.start + r.count - 1 > cons.arity:
        refuse("BadRange", f"range outside the {cons.arity} components of {r.cons}", (format_selector(r),))
    return cons.components[r.start - 1 : r.start - 1 + r.count]


def _replace_at(t: TypeExpr, path: Path, f) -> TypeExpr:
    if not path:
        return f(t)
    kids = list(type_children(t))
    step = path[0]
    kids[step - 1] = _replace_at(kids[step - 1], path[1:], f)
    return with_type_children(t, tuple(kids))


def rewrite_at(m: Module, sel: TypeSel, f) -> Module:
    """Rewrite the addressed subterm with f (the module must be focus-free)."""
    resolve(m, sel)  # surfaces UnknownName/KindMismatch/BadPath/BadIndex first
    decls = list(m.decls)
    for i, d in enumerate(decls):
        if isinstance(sel, AliasRhs) and isinstance(d, AliasDecl) and d.name == sel.name:
            decls[i] = AliasDecl(d.name, d.params, _replace_at(d.rhs, sel.path, f))
        elif isinstance(sel, NewtypeRhs) and isinstance(d, NewtypeDecl) and d.name == sel.name:
            comp = _replace_at(d.con.components[0], sel.path, f)
            decls[i] = NewtypeDecl(d.name, d.params, ConsDecl(d.con.name, (comp,)))
        elif isinstance(sel, ConsComp) and isinstance(d, (NewtypeDecl, DataDecl)) and d.name == sel.ty:
            conss = list(m.constructors(d))
            for j, c in enumerate(conss):
                if c.name == sel.cons:
                    comps = list(c.components)
                    comps[sel.index - 1] = _replace_at(comps[sel.index - 1], sel.path, f)
                    conss[j] = ConsDecl(c.name, tuple(comps))
            if isinstance(d, NewtypeDecl):
                decls[i] = NewtypeDecl(d.name, d.params, conss[0])
            else:
                decls[i] = DataDecl(d.name, d.params, tuple(conss))
        elif isinstance(sel, SigUse) and isinstance(d, Sig) and d.fun == sel.fun:
            decls[i] = Sig(d.fun, _replace_at(d.type, sel.path, f))
    return Module(tuple(decls), comp_focus=m.comp_focus)


# ---------------------------------------------------------------------------
# enumeration (declaration order, then pre-order within each type)

def all_selectors(m: Module):
    """Yield (selector, subterm) for every addressable type position."""
    m = strip_focus(m)
    for d in m.decls:
        if isinstance(d, AliasDecl):
            for path, sub in subterms(d.rhs):
                yield AliasRhs(d.name, path), sub
        elif isinstance(d, NewtypeDecl):
            for path, sub in subterms(d.con.components[0]):
                yield NewtypeRhs(d.name, path), sub
        elif isinstance(d, DataDecl):
            for c in d.conss:
                for i, comp in enumerate(c.components, start=1):
                    for path, sub in subterms(comp):
                        yield ConsComp(d.name, c.name, i, path), sub
        elif isinstance(d, Sig):
            for path, sub in subterms(d.type):
                yield SigUse(d.fun, path), sub


def selectors_matching(m: Module, p: TypePredicate) -> list[TypeSel]:
    return [sel for sel, sub in all_selectors(m) if predicate_holds(p, sub)]


# ---------------------------------------------------------------------------
# focus mediation

def focus_to_selector(m: Module) -> TypeSel | CompRangeSel:
    """The selector addressing the unique focus marker."""
    n = count_foci(m)
    if n == 0:
        refuse("NoFocus", "module has no focus marker")
    if n > 1:
        refuse("MultipleFoci", f"module has {n} focus markers")
    if m.comp_focus is not None:
        owner = m.cons_owner(m.comp_focus.host)
        if owner is None:
            refuse("UnknownName", f"focused constructor {m.comp_focus.host} not declared")
        f = m.comp_focus
        return CompRangeSel(owner[0].name, f.host, f.start, f.count)
    for sel, sub in _selectors_with_focus(m):
        if isinstance(sub, (FocusType, FocusName)):
            return sel
    refuse("NoFocus", "module has no focus marker")
    raise AssertionError  # unreachable


def _selectors_with_focus(m: Module):
    """Like all_selectors but over the unstripped tree, so the focus node is
    visible; paths still agree with the stripped tree because the focus node
    stands exactly where its payload will stand."""
    for d in m.decls:
        if isinstance(d, AliasDecl):
            for path, sub in _subterms_skipping_focus(d.rhs):
                yield AliasRhs(d.name, path), sub
        elif isinstance(d, NewtypeDecl):
            for path, sub in _subterms_skipping_focus(d.con.components[0]):
                yield NewtypeRhs(d.name, path), sub
        elif isinstance(d, DataDecl):
            for c in d.conss:
                for i, comp in enumerate(c.components, start=1):
                    for path, sub in _subterms_skipping_focus(comp):
                        yield ConsComp(d.name, c.name, i, path), sub
        elif isinstance(d, Sig):
            for path, sub in _subterms_skipping_focus(d.type):
                yield SigUse(d.fun, path), sub


def _subterms_skipping_focus(t: TypeExpr, path: Path = ()):
    yield path, t
    if isinstance(t, FocusType):
        # the focused payload sits at the same path once the marker is gone
        for sub in _subterms_skipping_focus(t.inner, path):
            yield sub
        return
    for i, k in enumerate(type_children(t), start=1):
        yield from _subterms_skipping_focus(k, path + (i,))


def selector_to_focus(m: Module, sel: TypeSel | CompRangeSel) -> Module:
    """Add the focus marker corresponding to a selector."""
    if count_foci(m) > 0:
        refuse("AlreadyFocused", "module already carries a focus marker")
    if isinstance(sel, CompRangeSel):
        resolve_range(m, sel)
        return Module(m.decls, comp_focus=FocusCompList(sel.cons, sel.start, sel.count))
    return rewrite_at(m, sel, FocusType)
