"""Selectors, focus mediation, predicates — with brute-force oracles."""
import pathlib

import pytest
from hypothesis import given, settings, strategies as st

from minifun import alpha_eq, parse_module, parse_type_fragment
from minifun.errors import Refusal
from minifun.select import (
    AliasRhs,
    CompRangeSel,
    ConsComp,
    EqualsType,
    MentionsName,
    NewtypeRhs,
    SigUse,
    TopLevelIs,
    all_selectors,
    focus_to_selector,
    format_selector,
    parse_selector,
    resolve,
    selector_to_focus,
    selectors_matching,
)
from minifun.syntax import (
    AliasDecl,
    App,
    DataDecl,
    Fun,
    ListT,
    NewtypeDecl,
    Sig,
    Tuple,
    Var,
    strip_focus,
    subterms,
)

from modgen import gen_module

CORPUS = pathlib.Path(__file__).parent / "corpus"

BLOCK_MODULE = """
data Dec = Dec String;
data Stat = Skip;
type Block = ([Dec], [Stat]);
data Prog = Prog String [Dec] [Stat];
"""

TRANS_MODULE = (CORPUS / "trans.mf").read_text()


class TestResolve:
    def test_alias_rhs(self):
        m = parse_module(BLOCK_MODULE)
        assert resolve(m, AliasRhs("Block")) == Tuple((ListT(App("Dec", ())), ListT(App("Stat", ()))))

    def test_cons_component(self):
        m = parse_module("data ConsList a = Nil | Cons a (ConsList a);")
        assert resolve(m, ConsComp("ConsList", "Cons", 2)) == App("ConsList", (Var("a"),))

    def test_bad_index(self):
        m = parse_module("data T = K Int Int;")
        with pytest.raises(Refusal) as exc:
            resolve(m, ConsComp("T", "K", 9))
        assert exc.value.code == "BadIndex"

    def test_unknown_name(self):
        m = parse_module(BLOCK_MODULE)
        with pytest.raises(Refusal) as exc:
            resolve(m, AliasRhs("Nope"))
        assert exc.value.code == "UnknownName"

    def test_kind_mismatch(self):
        m = parse_module(BLOCK_MODULE)
        with pytest.raises(Refusal) as exc:
            resolve(m, AliasRhs("Prog"))
        assert exc.value.code == "KindMismatch"

    def test_bad_path(self):
        m = parse_module(BLOCK_MODULE)
        with pytest.raises(Refusal) as exc:
            resolve(m, AliasRhs("Block", (9,)))
        assert exc.value.code == "BadPath"

    def test_signature_use(self):
        m = parse_module("f :: Int -> String;")
        assert resolve(m, SigUse("f", (1,))) == App("Int", ())

    def test_newtype_rhs(self):
        m = parse_module("newtype State = State Int;")
        assert resolve(m, NewtypeRhs("State")) == App("Int", ())


class TestFocusMediation:
    def test_alias_focus_round_trip(self):
        m = parse_module(BLOCK_MODULE)
        focused = selector_to_focus(m, AliasRhs("Block"))
        assert focus_to_selector(focused) == AliasRhs("Block")

    def test_component_range_round_trip(self):
        m = parse_module(BLOCK_MODULE)
        focused = selector_to_focus(m, CompRangeSel("Prog", "Prog", 2, 2))
        sel = focus_to_selector(focused)
        assert sel == CompRangeSel("Prog", "Prog", 2, 2)

    def test_no_focus(self):
        with pytest.raises(Refusal) as exc:
            focus_to_selector(parse_module(BLOCK_MODULE))
        assert exc.value.code == "NoFocus"

    def test_already_focused(self):
        m = selector_to_focus(parse_module(BLOCK_MODULE), AliasRhs("Block"))
        with pytest.raises(Refusal) as exc:
            selector_to_focus(m, AliasRhs("Block"))
        assert exc.value.code == "AlreadyFocused"

    def test_add_then_strip_is_alpha_eq(self):
        m = parse_module(BLOCK_MODULE)
        focused = selector_to_focus(m, ConsComp("Prog", "Prog", 2))
        assert alpha_eq(strip_focus(focused), m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 50_000), st.integers(0, 200))
def test_focus_selector_round_trip_generated(seed, pick):
    m = gen_module(seed)
    sels = [sel for sel, _ in all_selectors(m)]
    if not sels:
        return
    sel = sels[pick % len(sels)]
    assert focus_to_selector(selector_to_focus(m, sel)) == sel


def brute_force_matching(m, pred):
    """Independent oracle: enumerate subterms by hand, mirror the spec order."""
    out = []
    m = strip_focus(m)
    for d in m.decls:
        if isinstance(d, AliasDecl):
            roots = [(lambda p: AliasRhs(d.name, p), d.rhs)]
        elif isinstance(d, NewtypeDecl):
            roots = [(lambda p: NewtypeRhs(d.name, p), d.con.components[0])]
        elif isinstance(d, DataDecl):
            roots = []
            for c in d.conss:
                for i, comp in enumerate(c.components, start=1):
                    roots.append((lambda p, c=c, i=i: ConsComp(d.name, c.name, i, p), comp))
        elif isinstance(d, Sig):
            roots = [(lambda p: SigUse(d.fun, p), d.type)]
        else:
            continue
        for make, root in roots:
            for path, sub in subterms(root):
                if pred(sub):
                    out.append(make(path))
    return out


def test_equals_type_on_trans_module():
    m = parse_module(TRANS_MODULE)
    target = parse_type_fragment("Maybe a")
    got = selectors_matching(m, EqualsType(target))
    expected = brute_force_matching(m, lambda s: s == target)
    assert got == expected
    assert AliasRhs("TransRel", (2,)) in got


def test_mentions_undeclared_is_empty():
    m = parse_module(BLOCK_MODULE)
    assert selectors_matching(m, MentionsName("Undeclared")) == []


def test_top_level_is_app_order():
    m = parse_module((CORPUS / "conslist.mf").read_text())
    got = selectors_matching(m, TopLevelIs("App"))
    expected = brute_force_matching(m, lambda s: isinstance(s, App))
    assert got == expected


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 50_000))
def test_equals_type_matches_brute_force(seed):
    m = gen_module(seed)
    target = App("Int", ())
    got = selectors_matching(m, EqualsType(target))
    assert got == brute_force_matching(m, lambda s: s == target)
    for sel in got:
        assert resolve(m, sel) == target


class TestSelectorStrings:
    @pytest.mark.parametrize(
        "text,sel",
        [
            ("alias:Block", AliasRhs("Block")),
            ("newtype:State/rhs", NewtypeRhs("State")),
            ("cons:ConsList.Cons/2", ConsComp("ConsList", "Cons", 2)),
            ("alias:TransRel/rhs/path:2", AliasRhs("TransRel", (2,))),
            ("cons:Prog.Prog/2-3", CompRangeSel("Prog", "Prog", 2, 2)),
            ("sig:deadEnd/path:1.2", SigUse("deadEnd", (1, 2))),
        ],
    )
    def test_parse(self, text, sel):
        assert parse_selector(text) == sel

    @pytest.mark.parametrize(
        "sel",
        [
            AliasRhs("Block"),
            NewtypeRhs("State", (1,)),
            ConsComp("ConsList", "Cons", 2, (1,)),
            CompRangeSel("Prog", "Prog", 2, 2),
            SigUse("deadEnd"),
        ],
    )
    def test_bijective(self, sel):
        assert parse_selector(format_selector(sel)) == sel

    def test_malformed(self):
        with pytest.raises(Refusal) as exc:
            parse_selector("what:ever")
        assert exc.value.code == "BadArguments"
