"""Concrete syntax: parsing, printing, round trips, error reporting."""
import pathlib

import pytest
from hypothesis import given, settings, strategies as st

from minifun import alpha_eq, parse_module, parse_type_fragment, print_module
from minifun.errors import SourceError
from minifun.parser import parse_consdecl_fragment, parse_expr_fragment
from minifun.syntax import (
    AliasDecl,
    App,
    DataDecl,
    EUndefined,
    FocusType,
    Module,
    Tuple,
    Var,
)

from modgen import gen_module

CORPUS = pathlib.Path(__file__).parent / "corpus"


def test_conslist_data_decl():
    m = parse_module("data ConsList a = Nil | Cons a (ConsList a);")
    d = m.decls[0]
    assert isinstance(d, DataDecl)
    assert [c.name for c in d.conss] == ["Nil", "Cons"]
    assert d.conss[1].components == (Var("a"), App("ConsList", (Var("a"),)))


def test_alias_of_tuple():
    m = parse_module(
        "data Dec = Dec String;\ndata Stat = Skip;\ntype B = ([Dec], [Stat]);"
    )
    d = m.type_decl("B")
    assert isinstance(d, AliasDecl)
    assert isinstance(d.rhs, Tuple)


def test_malformed_data_is_syntax_error():
    with pytest.raises(SourceError) as exc:
        parse_module("data T = |;")
    assert exc.value.code == "SyntaxError"
    assert exc.value.line == 1


def test_duplicate_name_reported():
    with pytest.raises(SourceError) as exc:
        parse_module("data A = K;\ndata A = L;")
    assert exc.value.code == "DuplicateName"


def test_equation_arity_mismatch():
    with pytest.raises(SourceError) as exc:
        parse_module("f x = x;\nf x y = x;")
    assert exc.value.code == "ArityMismatch"


def test_noncontiguous_equations():
    with pytest.raises(SourceError) as exc:
        parse_module("f x = x;\ng x = x;\nf y = y;")
    assert exc.value.code == "DuplicateName"


class TestTypeFragments:
    def test_primed_application(self):
        assert parse_type_fragment("Maybe' a") == App("Maybe'", (Var("a"),))

    def test_tuple(self):
        assert parse_type_fragment("(a,a)") == Tuple((Var("a"), Var("a")))

    def test_dangling_arrow(self):
        with pytest.raises(SourceError):
            parse_type_fragment("a ->")


def test_consdecl_fragment():
    c = parse_consdecl_fragment("SBlock Block")
    assert c.name == "SBlock" and c.components == (App("Block", ()),)


def test_undefined_prints_and_parses():
    m = parse_module("f x = undefined;")
    assert m.decls[0].equations[0].rhs == EUndefined()
    assert "undefined" in print_module(m)


def test_focus_marker_round_trip():
    m = parse_module("type B = {! (Int, String) !};")
    d = m.type_decl("B")
    assert isinstance(d.rhs, FocusType)
    printed = print_module(m)
    assert "{!" in printed and "!}" in printed
    assert alpha_eq(parse_module(printed), m)


def test_component_range_focus():
    m = parse_module("data P = P Int {! String Int !};")
    assert m.comp_focus is not None
    assert (m.comp_focus.host, m.comp_focus.start, m.comp_focus.count) == ("P", 2, 2)
    printed = print_module(m)
    again = parse_module(printed)
    assert again.comp_focus == m.comp_focus


def test_lambda_case_expressions():
    m = parse_module('f = \\x y -> case x of { 1 -> y ; _ -> "no" };')
    printed = print_module(m)
    assert alpha_eq(parse_module(printed), m)


def test_string_escapes():
    m = parse_module('f = "a\\"b\\n";')
    assert alpha_eq(parse_module(print_module(m)), m)


def test_comments_discarded():
    m = parse_module("-- a comment\nf x = x; -- trailing\n")
    assert len(m.decls) == 1


@pytest.mark.parametrize("name", ["conslist.mf", "imp.mf", "trans.mf"])
def test_corpus_round_trip(name):
    src = (CORPUS / name).read_text()
    m = parse_module(src)
    printed = print_module(m)
    assert alpha_eq(parse_module(printed), m)
    # parse-print-parse idempotence
    assert print_module(parse_module(printed)) == printed


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_generated_round_trip(seed):
    m = gen_module(seed)
    printed = print_module(m)
    assert alpha_eq(parse_module(printed), m)


def test_expr_fragment_application():
    e = parse_expr_fragment("f (g x) 1")
    from minifun.syntax import app_spine, EVar

    root, args = app_spine(e)
    assert root == EVar("f") and len(args) == 2
