"""Pretty-printer for MiniFun modules, with an optional span map.

`print_module` emits deterministic text that `parse_module` accepts back
(alpha-equivalent round trip; focus markers re-emitted).  The span variant
additionally reports, for every addressable node, its text range together
with the location string used across the engine: selector strings for type
positions, `decl:`/`sig:`/`fun:`/`eq:` for declarations and equations, and
`todo:` for `undefined` nodes.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import select
from .syntax import (
    AliasDecl,
    App,
    ConsDecl,
    DataDecl,
    Decl,
    ECase,
    ECon,
    EList,
    ELam,
    ELit,
    ETuple,
    EUndefined,
    EVar,
    EApp,
    FocusName,
    FocusType,
    Fun,
    FunDecl,
    ListT,
    Module,
    NewtypeDecl,
    PCon,
    PLit,
    PTuple,
    PVar,
    PWild,
    Pattern,
    Sig,
    Tuple,
    TypeExpr,
    Var,
)


@dataclass(frozen=True)
class Span:
    loc: str
    start: int
    end: int


class _Out:
    def __init__(self) -> None:
        self.parts: list[str] = []
        self.pos = 0
        self.spans: list[Span] = []

    def emit(self, s: str) -> None:
        self.parts.append(s)
        self.pos += len(s)

    def open(self) -> int:
        return self.pos

    def close(self, loc: str | None, start: int) -> None:
        if loc is not None:
            self.spans.append(Span(loc, start, self.pos))

    def text(self) -> str:
        return "".join(self.parts)


# ---------------------------------------------------------------------------
# types

def _quote_lit(v) -> str:
    if isinstance(v, str):
        body = v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
        return f'"{body}"'
    return str(v)


def _ptype(out: _Out, t: TypeExpr, need: int, selof, path) -> None:
    """need: 0 = any, 1 = application operand, 2 = atom."""
    start = out.open()
    loc = selof(path) if selof else None
    if isinstance(t, FocusType):
        out.emit("{! ")
        _ptype(out, t.inner, 0, None, path)
        out.emit(" !}")
    elif isinstance(t, FocusName):
        out.emit("{! " + t.name + " !}")
    elif isinstance(t, Var):
        out.emit(t.name)
    elif isinstance(t, App):
        if not t.args:
            out.emit(t.name)
        else:
            wrap = need > 1
            if wrap:
                out.emit("(")
            out.emit(t.name)
            for i, a in enumerate(t.args, start=1):
                out.emit(" ")
                _ptype(out, a, 2, selof, path + (i,))
            if wrap:
                out.emit(")")
    elif isinstance(t, Fun):
        wrap = need > 0
        if wrap:
            out.emit("(")
        _ptype(out, t.src, 1, selof, path + (1,))
        out.emit(" -> ")
        _ptype(out, t.dst, 0, selof, path + (2,))
        if wrap:
            out.emit(")")
    elif isinstance(t, Tuple):
        out.emit("(")
        for i, e in enumerate(t.elems, start=1):
            if i > 1:
                out.emit(", ")
            _ptype(out, e, 0, selof, path + (i,))
        out.emit(")")
    elif isinstance(t, ListT):
        out.emit("[")
        _ptype(out, t.elem, 0, selof, path + (1,))
        out.emit("]")
    else:
        raise TypeError(f"cannot print {t!r}")
    out.close(loc, start)


def type_text(t: TypeExpr) -> str:
    out = _Out()
    _ptype(out, t, 0, None, ())
    return out.text()


# ---------------------------------------------------------------------------
# patterns

def _ppat(out: _Out, p: Pattern, need: int) -> None:
    """need: 0 = any, 1 = atomic position."""
    if isinstance(p, PVar):
        out.emit(p.name)
    elif isinstance(p, PWild):
        out.emit("_")
    elif isinstance(p, PLit):
        out.emit(_quote_lit(p.value))
    elif isinstance(p, PTuple):
        out.emit("(")
        for i, s in enumerate(p.subpatterns):
            if i:
                out.emit(", ")
            _ppat(out, s, 0)
        out.emit(")")
    elif isinstance(p, PCon):
        if not p.subpatterns:
            out.emit(p.name)
        else:
            wrap = need > 0
            if wrap:
                out.emit("(")
            out.emit(p.name)
            for s in p.subpatterns:
                out.emit(" ")
                _ppat(out, s, 1)
            if wrap:
                out.emit(")")
    else:
        raise TypeError(f"cannot print {p!r}")


def pattern_text(p: Pattern, atomic: bool = False) -> str:
    out = _Out()
    _ppat(out, p, 1 if atomic else 0)
    return out.text()


# ---------------------------------------------------------------------------
# expressions

def _pexpr(out: _Out, e, need: int, locof, path) -> None:
    """need: 0 = any, 1 = application head, 2 = application argument."""
    start = out.open()
    loc = locof(path) if locof and isinstance(e, EUndefined) else None
    if isinstance(e, EVar):
        out.emit(e.name)
    elif isinstance(e, ECon):
        out.emit(e.name)
    elif isinstance(e, ELit):
        out.emit(_quote_lit(e.value))
    elif isinstance(e, EUndefined):
        out.emit("undefined")
    elif isinstance(e, ETuple):
        out.emit("(")
        for i, x in enumerate(e.elems, start=1):
            if i > 1:
                out.emit(", ")
            _pexpr(out, x, 0, locof, path + (i,))
        out.emit(")")
    elif isinstance(e, EList):
        out.emit("[")
        for i, x in enumerate(e.elems, start=1):
            if i > 1:
                out.emit(", ")
            _pexpr(out, x, 0, locof, path + (i,))
        out.emit("]")
    elif isinstance(e, EApp):
        wrap = need > 1
        if wrap:
            out.emit("(")
        _pexpr(out, e.fun, 1, locof, path + (1,))
        out.emit(" ")
        _pexpr(out, e.arg, 2, locof, path + (2,))
        if wrap:
            out.emit(")")
    elif isinstance(e, ELam):
        wrap = need > 0
        if wrap:
            out.emit("(")
        out.emit("\\" + " ".join(e.params) + " -> ")
        _pexpr(out, e.body, 0, locof, path + (1,))
        if wrap:
            out.emit(")")
    elif isinstance(e, ECase):
        wrap = need > 0
        if wrap:
            out.emit("(")
        out.emit("case ")
        _pexpr(out, e.scrutinee, 1, locof, path + (1,))
        out.emit(" of { ")
        for i, (p, body) in enumerate(e.alts):
            if i:
                out.emit(" ; ")
            _ppat(out, p, 0)
            out.emit(" -> ")
            _pexpr(out, body, 0, locof, path + (1 + i + 1,))
        out.emit(" }")
        if wrap:
            out.emit(")")
    else:
        raise TypeError(f"cannot print {e!r}")
    out.close(loc, start)


def expr_text(e) -> str:
    out = _Out()
    _pexpr(out, e, 0, None, ())
    return out.text()


# ---------------------------------------------------------------------------
# declarations and modules

def _pcons(out: _Out, m: Module, d, c: ConsDecl, selof_comp) -> None:
    out.emit(c.name)
    focus = m.comp_focus if m.comp_focus is not None and m.comp_focus.host == c.name else None
    for i, comp in enumerate(c.components, start=1):
        out.emit(" ")
        if focus is not None and i == focus.start:
            out.emit("{! ")
        _ptype(out, comp, 2, selof_comp(i), ())
        if focus is not None and i == focus.start + focus.count - 1:
            out.emit(" !}")


def _pdecl(out: _Out, m: Module, d: Decl, with_spans: bool) -> None:
    start = out.open()
    loc: str | None = None
    if isinstance(d, AliasDecl):
        loc = f"decl:{d.name}"
        out.emit("type " + d.name + "".join(" " + p for p in d.params) + " = ")
        selof = (lambda path: select.format_selector(select.AliasRhs(d.name, path))) if with_spans else None
        _ptype(out, d.rhs, 0, selof, ())
        out.emit(";")
    elif isinstance(d, NewtypeDecl):
        loc = f"decl:{d.name}"
        out.emit("newtype " + d.name + "".join(" " + p for p in d.params) + " = ")
        out.emit(d.con.name + " ")
        selof = (lambda path: select.format_selector(select.NewtypeRhs(d.name, path))) if with_spans else None
        _ptype(out, d.con.components[0], 2, selof, ())
        out.emit(";")
    elif isinstance(d, DataDecl):
        loc = f"decl:{d.name}"
        out.emit("data " + d.name + "".join(" " + p for p in d.params) + " = ")
        for j, c in enumerate(d.conss):
            if j:
                out.emit(" | ")

            def selof_comp(i, c=c):
                if not with_spans:
                    return None
                return lambda path: select.format_selector(select.ConsComp(d.name, c.name, i, path))

            _pcons(out, m, d, c, selof_comp)
        out.emit(";")
    elif isinstance(d, Sig):
        loc = f"sig:{d.fun}"
        out.emit(d.fun + " :: ")
        selof = (lambda path: select.format_selector(select.SigUse(d.fun, path))) if with_spans else None
        _ptype(out, d.type, 0, selof, ())
        out.emit(";")
    elif isinstance(d, FunDecl):
        loc = f"fun:{d.fun}"
        for k, eq in enumerate(d.equations, start=1):
            if k > 1:
                out.emit("\n")
            eq_start = out.open()
            out.emit(eq.fun)
            for p in eq.patterns:
                out.emit(" ")
                _ppat(out, p, 1)
            out.emit(" = ")
            locof = (lambda path, k=k: f"todo:{d.fun}/{k}/" + ".".join(map(str, path))) if with_spans else None
            _pexpr(out, eq.rhs, 0, locof, ())
            out.emit(";")
            if with_spans:
                out.spans.append(Span(f"eq:{d.fun}/{k}", eq_start, out.pos))
    else:
        raise TypeError(f"cannot print {d!r}")
    if with_spans and loc is not None:
        out.spans.append(Span(loc, start, out.pos))


def print_module(m: Module) -> str:
    out = _Out()
    for d in m.decls:
        _pdecl(out, m, d, with_spans=False)
        out.emit("\n")
    return out.text()


def print_module_with_spans(m: Module) -> tuple[str, list[Span]]:
    out = _Out()
    for d in m.decls:
        _pdecl(out, m, d, with_spans=True)
        out.emit("\n")
    return out.text(), out.spans


def decl_text(m: Module, d: Decl) -> str:
    out = _Out()
    _pdecl(out, m, d, with_spans=False)
    return out.text()
