"""Concrete syntax: lexer and recursive-descent parser for MiniFun text.

Declarations are `;`-terminated, `--` starts a line comment, and focus
markers are written `{! ... !}`.  Identifiers may contain apostrophes
(Maybe', Just').
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SourceError
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
    Equation,
    FocusCompList,
    FocusName,
    FocusType,
    Fun,
    FunDecl,
    IllFormed,
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
    well_formed,
)

KEYWORDS = {"type", "newtype", "data", "case", "of", "undefined"}

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>--[^\n]*)
    | (?P<focusopen>\{!)
    | (?P<focusclose>!\})
    | (?P<dcolon>::)
    | (?P<arrow>->)
    | (?P<int>-?[0-9]+)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<conid>[A-Z][A-Za-z0-9_']*)
    | (?P<varid>[a-z_][A-Za-z0-9_']*)
    | (?P<sym>[=|;,()\[\]{}\\])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # conid varid int string sym keyword focusopen focusclose dcolon arrow eof
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    col = 1
    n = len(src)
    while pos < n:
        mo = _TOKEN_RE.match(src, pos)
        if mo is None:
            raise SourceError("SyntaxError", f"unexpected character {src[pos]!r}", line, col)
        kind = mo.lastgroup
        text = mo.group()
        if kind not in ("ws", "comment"):
            tkind = kind
            if kind == "varid" and text in KEYWORDS:
                tkind = "keyword"
            if kind == "varid" and text == "_":
                tkind = "wild"
            tokens.append(Token(tkind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = mo.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    # ---- token plumbing -------------------------------------------------
    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None) -> SourceError:
        tok = tok or self.peek()
        return SourceError("SyntaxError", msg, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise self.error(f"expected {want!r}, found {t.text or 'end of input'!r}")
        return self.next()

    def at_sym(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == text

    def eat_sym(self, text: str) -> bool:
        if self.at_sym(text):
            self.next()
            return True
        return False

    # ---- types ----------------------------------------------------------
    def parse_type(self) -> TypeExpr:
        t = self.parse_btype()
        if self.peek().kind == "arrow":
            self.next()
            return Fun(t, self.parse_type())
        return t

    def parse_btype(self) -> TypeExpr:
        if self.peek().kind == "conid":
            name = self.next().text
            args: list[TypeExpr] = []
            while self._at_atype():
                args.append(self.parse_atype())
            return App(name, tuple(args))
        return self.parse_atype()

    def _at_atype(self) -> bool:
        t = self.peek()
        return t.kind in ("conid", "varid", "focusopen") or (t.kind == "sym" and t.text in "([")

    def parse_atype(self) -> TypeExpr:
        t = self.peek()
        if t.kind == "varid":
            return Var(self.next().text)
        if t.kind == "conid":
            return App(self.next().text, ())
        if t.kind == "focusopen":
            self.next()
            if self.peek().kind == "conid" and self.peek(1).kind == "focusclose":
                name = self.next().text
                self.next()
                return FocusName(name)
            inner = self.parse_type()
            self.expect("focusclose")
            return FocusType(inner)
        if self.eat_sym("("):
            elems = [self.parse_type()]
            while self.eat_sym(","):
                elems.append(self.parse_type())
            self.expect("sym", ")")
            return elems[0] if len(elems) == 1 else Tuple(tuple(elems))
        if self.eat_sym("["):
            inner = self.parse_type()
            self.expect("sym", "]")
            return ListT(inner)
        raise self.error("expected a type")

    # ---- patterns ---------------------------------------------------------
    def parse_pattern(self) -> Pattern:
        if self.peek().kind == "conid":
            name = self.next().text
            subs: list[Pattern] = []
            while self._at_apat():
                subs.append(self.parse_apat())
            return PCon(name, tuple(subs))
        return self.parse_apat()

    def _at_apat(self) -> bool:
        t = self.peek()
        return t.kind in ("conid", "varid", "wild", "int", "string") or (
            t.kind == "sym" and t.text == "("
        )

    def parse_apat(self) -> Pattern:
        t = self.peek()
        if t.kind == "varid":
            return PVar(self.next().text)
        if t.kind == "wild":
            self.next()
            return PWild()
        if t.kind == "conid":
            return PCon(self.next().text, ())
        if t.kind == "int":
            return PLit(int(self.next().text))
        if t.kind == "string":
            return PLit(_unquote(self.next().text))
        if self.eat_sym("("):
            elems = [self.parse_pattern()]
            while self.eat_sym(","):
                elems.append(self.parse_pattern())
            self.expect("sym", ")")
            return elems[0] if len(elems) == 1 else PTuple(tuple(elems))
        raise self.error("expected a pattern")

    # ---- expressions ----------------------------------------------------
    def parse_expr(self):
        t = self.peek()
        if t.kind == "sym" and t.text == "\\":
            self.next()
            params = []
            while self.peek().kind == "varid":
                params.append(self.next().text)
            if not params:
                raise self.error("lambda needs at least one parameter")
            self.expect("arrow")
            return ELam(tuple(params), self.parse_expr())
        if t.kind == "keyword" and t.text == "case":
            self.next()
            scrutinee = self.parse_expr_app()
            self.expect("keyword", "of")
            self.expect("sym", "{")
            alts = [self.parse_alt()]
            while self.eat_sym(";"):
                alts.append(self.parse_alt())
            self.expect("sym", "}")
            return ECase(scrutinee, tuple(alts))
        return self.parse_expr_app()

    def parse_alt(self):
        p = self.parse_pattern()
        self.expect("arrow")
        return (p, self.parse_expr())

    def parse_expr_app(self):
        e = self.parse_aexpr()
        while self._at_aexpr():
            e = EApp(e, self.parse_aexpr())
        return e

    def _at_aexpr(self) -> bool:
        t = self.peek()
        if t.kind in ("varid", "conid", "int", "string"):
            return True
        if t.kind == "keyword" and t.text == "undefined":
            return True
        return t.kind == "sym" and t.text in "(["

    def parse_aexpr(self):
        t = self.peek()
        if t.kind == "varid":
            return EVar(self.next().text)
        if t.kind == "conid":
            return ECon(self.next().text)
        if t.kind == "int":
            return ELit(int(self.next().text))
        if t.kind == "string":
            return ELit(_unquote(self.next().text))
        if t.kind == "keyword" and t.text == "undefined":
            self.next()
            return EUndefined()
        if self.eat_sym("("):
            elems = [self.parse_expr()]
            while self.eat_sym(","):
                elems.append(self.parse_expr())
            self.expect("sym", ")")
            return elems[0] if len(elems) == 1 else ETuple(tuple(elems))
        if self.eat_sym("["):
            elems = []
            if not self.at_sym("]"):
                elems.append(self.parse_expr())
                while self.eat_sym(","):
                    elems.append(self.parse_expr())
            self.expect("sym", "]")
            return EList(tuple(elems))
        raise self.error("expected an expression")

    # ---- declarations ---------------------------------------------------
    def parse_decl(self) -> tuple[Decl, FocusCompList | None]:
        t = self.peek()
        if t.kind == "keyword" and t.text in ("type", "newtype", "data"):
            return self.parse_typedecl()
        if t.kind == "varid":
            if self.peek(1).kind == "dcolon":
                fun = self.next().text
                self.next()
                return Sig(fun, self.parse_type()), None
            fun = self.next().text
            pats: list[Pattern] = []
            while self._at_apat():
                pats.append(self.parse_apat())
            self.expect("sym", "=")
            rhs = self.parse_expr()
            eq = Equation(fun, tuple(pats), rhs)
            return FunDecl(fun, (eq,)), None
        raise self.error("expected a declaration")

    def parse_typedecl(self) -> tuple[Decl, FocusCompList | None]:
        kw = self.next().text
        name = self.expect("conid").text
        params: list[str] = []
        while self.peek().kind == "varid":
            params.append(self.next().text)
        self.expect("sym", "=")
        if kw == "type":
            return AliasDecl(name, tuple(params), self.parse_type()), None
        if kw == "newtype":
            cname = self.expect("conid").text
            comp = self.parse_atype()
            return NewtypeDecl(name, tuple(params), ConsDecl(cname, (comp,))), None
        conss: list[ConsDecl] = []
        focus: FocusCompList | None = None
        while True:
            c, f = self.parse_consdecl()
            conss.append(c)
            if f is not None:
                if focus is not None:
                    raise self.error("more than one component focus")
                focus = f
            if not self.eat_sym("|"):
                break
        return DataDecl(name, tuple(params), tuple(conss)), focus

    def parse_consdecl(self) -> tuple[ConsDecl, FocusCompList | None]:
        cname = self.expect("conid").text
        comps: list[TypeExpr] = []
        focus: FocusCompList | None = None
        while True:
            if self.peek().kind == "focusopen" and self._focused_comp_run(cname):
                self.next()
                start = len(comps) + 1
                while not self.peek().kind == "focusclose":
                    comps.append(self.parse_atype())
                self.next()
                count = len(comps) + 1 - start
                if count < 1:
                    raise self.error("empty component focus")
                focus = FocusCompList(cname, start, count)
                continue
            if self._at_atype():
                comps.append(self.parse_atype())
                continue
            break
        return ConsDecl(cname, tuple(comps)), focus

    def _focused_comp_run(self, cname: str) -> bool:
        """A `{!` inside a constructor is a component-range focus when it wraps
        more than one atype; a single focused atype parses as a type focus."""
        depth = 0
        j = self.i + 1
        atypes = 0
        while j < len(self.toks):
            t = self.toks[j]
            if t.kind == "focusclose" and depth == 0:
                return atypes > 1
            if t.kind == "sym" and t.text in "([":
                if depth == 0:
                    atypes += 1
                depth += 1
            elif t.kind == "sym" and t.text in ")]":
                depth -= 1
            elif depth == 0 and (t.kind in ("conid", "varid")):
                atypes += 1
            j += 1
        return False

    def parse_module(self) -> Module:
        decls: list[Decl] = []
        focus: FocusCompList | None = None
        while self.peek().kind != "eof":
            d, f = self.parse_decl()
            self.expect("sym", ";")
            decls.append(d)
            if f is not None:
                if focus is not None:
                    raise self.error("more than one component focus")
                focus = f
        return Module(tuple(_group_equations(decls)), comp_focus=focus)


def _group_equations(decls: list[Decl]) -> list[Decl]:
    out: list[Decl] = []
    for d in decls:
        if (
            isinstance(d, FunDecl)
            and out
            and isinstance(out[-1], FunDecl)
            and out[-1].fun == d.fun
        ):
            out[-1] = FunDecl(d.fun, out[-1].equations + d.equations)
        else:
            out.append(d)
    return out


def _unquote(text: str) -> str:
    body = text[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _classify_illformed(msg: str) -> str:
    lowered = msg.lower()
    if "duplicate" in lowered or "contiguous" in lowered or "repeated pattern" in lowered:
        return "DuplicateName"
    if "arity" in lowered or "applied to" in lowered:
        return "ArityMismatch"
    return "SyntaxError"


def parse_module(src: str) -> Module:
    """Parse and validate a whole module."""
    m = _Parser(src).parse_module()
    try:
        well_formed(m)
    except IllFormed as exc:
        raise SourceError(_classify_illformed(str(exc)), str(exc), 1, 1) from exc
    return m


def parse_type_fragment(src: str) -> TypeExpr:
    p = _Parser(src)
    t = p.parse_type()
    p.expect("eof")
    return t


def parse_expr_fragment(src: str):
    p = _Parser(src)
    e = p.parse_expr()
    p.expect("eof")
    return e


def parse_consdecl_fragment(src: str) -> ConsDecl:
    p = _Parser(src)
    c, f = p.parse_consdecl()
    if f is not None:
        raise p.error("focus markers are not allowed here")
    p.expect("eof")
    return c


def parse_decls_fragment(src: str) -> list[Decl]:
    """Parse a `;`-separated run of declarations (trailing `;` optional)."""
    p = _Parser(src)
    decls: list[Decl] = []
    while p.peek().kind != "eof":
        d, f = p.parse_decl()
        if f is not None:
            raise p.error("focus markers are not allowed in declaration fragments")
        decls.append(d)
        if not p.eat_sym(";"):
            break
    p.expect("eof")
    return _group_equations(decls)
