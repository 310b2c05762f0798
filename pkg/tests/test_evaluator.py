"""The call-by-name interpreter used as the semantic oracle."""
import pytest

from minifun import eval_expr, parse_expr_fragment, parse_module, value_text
from minifun.errors import EvalError
from minifun.evaluator import VCon, VList, VLit, VTuple

SNOC = """
data SnocList a = Lin | Snoc (SnocList a) a;
"""


def ev(m, src, fuel=100_000):
    return eval_expr(m, parse_expr_fragment(src), fuel)


def test_constructor_value():
    m = parse_module(SNOC)
    v = ev(m, "Snoc (Snoc Lin 1) 2")
    assert v == VCon("Snoc", (VCon("Snoc", (VCon("Lin"), VLit(1))), VLit(2)))
    assert value_text(v) == "Snoc (Snoc Lin 1) 2"


def test_undefined_forced_hits_bottom():
    m = parse_module(SNOC)
    with pytest.raises(EvalError) as exc:
        ev(m, "undefined")
    assert exc.value.code == "HitBottom"


def test_call_by_name_skips_unused_bottom():
    m = parse_module("fst' :: (Int, Int) -> Int;\nfst' (a, b) = a;")
    assert ev(m, "fst' (1, undefined)") == VLit(1)


def test_pattern_match_failure():
    m = parse_module("data T = K | L;\nf :: T -> Int;\nf K = 1;")
    with pytest.raises(EvalError) as exc:
        ev(m, "f L")
    assert exc.value.code == "PatternMatchFailure"


def test_unbound_variable():
    with pytest.raises(EvalError) as exc:
        ev(parse_module(""), "nope")
    assert exc.value.code == "Unbound"


def test_fuel_exhausted_on_loop():
    m = parse_module("loop :: Int;\nloop = loop;")
    with pytest.raises(EvalError) as exc:
        ev(m, "loop", fuel=5_000)
    assert exc.value.code == "FuelExhausted"


def test_determinism():
    m = parse_module(SNOC + "f :: Int -> SnocList Int;\nf x = Snoc Lin x;")
    assert ev(m, "f 3") == ev(m, "f 3")


def test_case_and_lambda():
    m = parse_module("")
    assert ev(m, '(\\x -> case x of { 1 -> "one" ; _ -> "other" }) 1') == VLit("one")
    assert ev(m, '(\\x y -> (y, x)) 1 2') == VTuple((VLit(2), VLit(1)))


def test_list_values():
    assert ev(parse_module(""), "[1, 2, 3]") == VList((VLit(1), VLit(2), VLit(3)))


def test_partial_application_collects():
    m = parse_module(SNOC + "mk :: SnocList Int -> Int -> SnocList Int;\nmk xs x = Snoc xs x;")
    assert ev(m, "(mk Lin) 4") == VCon("Snoc", (VCon("Lin"), VLit(4)))


def test_equation_order_first_match():
    m = parse_module("f :: Int -> Int;\nf 0 = 10;\nf x = x;")
    assert ev(m, "f 0") == VLit(10)
    assert ev(m, "f 5") == VLit(5)
