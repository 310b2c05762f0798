"""Object-language structure: free variables, constructor lookup, alpha
equivalence, well-formedness."""
import pytest
from hypothesis import given, settings, strategies as st

from minifun import alpha_eq, constructors_of, free_type_vars, parse_module, parse_type_fragment
from minifun.errors import Refusal
from minifun.select import AliasRhs, selector_to_focus
from minifun.syntax import IllFormed, Module, well_formed

from modgen import gen_module

CONSLIST = """
data ConsList a = Nil | Cons a (ConsList a);
"""


def t(src):
    return parse_type_fragment(src)


class TestFreeTypeVars:
    def test_arrow_with_recursion(self):
        assert free_type_vars(t("a -> ConsList a")) == {"a"}

    def test_ground_type(self):
        assert free_type_vars(t("Int")) == set()

    def test_union_of_children(self):
        assert free_type_vars(t("(a, b -> a)")) == {"a", "b"}


class TestConstructorsOf:
    def test_declaration_order(self):
        m = parse_module(CONSLIST)
        names = [c.name for c in constructors_of(m, "ConsList")]
        assert names == ["Nil", "Cons"]

    def test_alias_is_kind_mismatch(self):
        m = parse_module("type B = Int;")
        with pytest.raises(Refusal) as exc:
            constructors_of(m, "B")
        assert exc.value.code == "KindMismatch"

    def test_unknown_type(self):
        m = parse_module(CONSLIST)
        with pytest.raises(Refusal) as exc:
            constructors_of(m, "Wat")
        assert exc.value.code == "UnknownType"


class TestAlphaEq:
    def test_bound_type_variable_renaming(self):
        assert alpha_eq(parse_module("data T a = K a;"), parse_module("data T b = K b;"))

    def test_structural_difference(self):
        assert not alpha_eq(parse_module("data T a = K a;"), parse_module("data T a = K Int;"))

    def test_focus_markers_ignored(self):
        m = parse_module("type B = (Int, String);")
        focused = selector_to_focus(m, AliasRhs("B"))
        assert focused != m
        assert alpha_eq(m, focused)

    def test_pattern_variable_renaming(self):
        a = parse_module(CONSLIST + "f :: ConsList Int -> Int;\nf (Cons x xs) = x;")
        b = parse_module(CONSLIST + "f :: ConsList Int -> Int;\nf (Cons y ys) = y;")
        assert alpha_eq(a, b)

    def test_free_variable_must_match(self):
        a = parse_module("f x = g x;\n")
        b = parse_module("f x = h x;\n")
        assert not alpha_eq(a, b)

    def test_capture_rejected(self):
        # left `g` is free, right `y` is a pattern variable: not equivalent
        a = parse_module("f x = g;\n")
        b = parse_module("f y = y;\n")
        assert not alpha_eq(a, b)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_alpha_eq_reflexive(seed):
    m = gen_module(seed)
    assert alpha_eq(m, m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_alpha_eq_symmetric(s1, s2):
    a, b = gen_module(s1), gen_module(s2)
    assert alpha_eq(a, b) == alpha_eq(b, a)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_modules_well_formed(seed):
    well_formed(gen_module(seed))


def _rename_bound(m: Module, suffix: str) -> Module:
    """An alpha-equivalent variant: consistently rename type parameters and
    pattern/lambda variables."""
    from minifun.syntax import (
        AliasDecl,
        DataDecl,
        ConsDecl,
        ECase,
        ELam,
        EVar,
        Equation,
        FunDecl,
        NewtypeDecl,
        PVar,
        Var,
        map_exprs,
        map_patterns,
        map_type,
        pattern_vars,
    )

    def rt(t, params):
        return map_type(t, lambda x: Var(x.name + suffix) if isinstance(x, Var) and x.name in params else x)

    def rp(p, bound):
        return map_patterns(p, lambda x: PVar(x.name + suffix) if isinstance(x, PVar) and x.name in bound else x)

    def re_expr(e, bound):
        def go(x):
            if isinstance(x, EVar) and x.name in bound:
                return EVar(x.name + suffix)
            if isinstance(x, ELam):
                inner = {p for p in x.params}
                return ELam(tuple(p + suffix for p in x.params), re_expr(x.body, bound | inner))
            return x

        if isinstance(e, ELam):
            return go(e)
        if isinstance(e, ECase):
            return ECase(
                re_expr(e.scrutinee, bound),
                tuple((rp(p, set(pattern_vars(p))), re_expr(b, bound | set(pattern_vars(p)))) for p, b in e.alts),
            )
        from minifun.syntax import EApp, EList, ETuple

        if isinstance(e, EApp):
            return EApp(re_expr(e.fun, bound), re_expr(e.arg, bound))
        if isinstance(e, ETuple):
            return ETuple(tuple(re_expr(x, bound) for x in e.elems))
        if isinstance(e, EList):
            return EList(tuple(re_expr(x, bound) for x in e.elems))
        if isinstance(e, EVar):
            return go(e)
        return e

    decls = []
    for d in m.decls:
        if isinstance(d, AliasDecl):
            ps = set(d.params)
            decls.append(AliasDecl(d.name, tuple(p + suffix for p in d.params), rt(d.rhs, ps)))
        elif isinstance(d, NewtypeDecl):
            ps = set(d.params)
            decls.append(
                NewtypeDecl(
                    d.name,
                    tuple(p + suffix for p in d.params),
                    ConsDecl(d.con.name, tuple(rt(t, ps) for t in d.con.components)),
                )
            )
        elif isinstance(d, DataDecl):
            ps = set(d.params)
            decls.append(
                DataDecl(
                    d.name,
                    tuple(p + suffix for p in d.params),
                    tuple(ConsDecl(c.name, tuple(rt(t, ps) for t in c.components)) for c in d.conss),
                )
            )
        elif isinstance(d, FunDecl):
            eqs = []
            for eq in d.equations:
                bound = {v for p in eq.patterns for v in pattern_vars(p)}
                eqs.append(
                    Equation(eq.fun, tuple(rp(p, bound) for p in eq.patterns), re_expr(eq.rhs, bound))
                )
            decls.append(FunDecl(d.fun, tuple(eqs)))
        else:
            decls.append(d)
    return Module(tuple(decls), m.comp_focus)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_alpha_eq_transitive_on_renamed_chain(seed):
    a = gen_module(seed)
    b = _rename_bound(a, "q")
    c = _rename_bound(b, "w")
    assert alpha_eq(a, b) and alpha_eq(b, c) and alpha_eq(a, c)


class TestWellFormed:
    def test_duplicate_type_names(self):
        with pytest.raises(IllFormed):
            well_formed(Module(parse_module("data A = K;").decls + parse_module("data A = L;").decls))

    def test_duplicate_cons_across_types(self):
        with pytest.raises(IllFormed):
            well_formed(Module(parse_module("data A = K;").decls + parse_module("data B = K Int;").decls))

    def test_unbound_type_variable(self):
        from minifun.syntax import DataDecl

        good = parse_module("data A a = K a;").decls[0]
        broken = Module((DataDecl(good.name, (), good.conss),))
        with pytest.raises(IllFormed):
            well_formed(broken)

    def test_arity_checked(self):
        from minifun.syntax import AliasDecl, App

        m = parse_module("data A a = K a;")
        broken = Module(m.decls + (AliasDecl("B", (), App("A", ())),))
        with pytest.raises(IllFormed):
            well_formed(broken)

    def test_alias_cycle_rejected(self):
        from minifun.syntax import AliasDecl, App

        broken = Module((AliasDecl("A", (), App("B", ())), AliasDecl("B", (), App("A", ()))))
        with pytest.raises(IllFormed):
            well_formed(broken)
