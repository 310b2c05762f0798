"""Random walks over the operator catalogue.

Each step asks the engine what applies at a randomly chosen focus and runs
one of its own suggestions; a sound engine must accept every one of them
and must never emit an ill-formed module (apply_op asserts that
internally).  Refusals from deliberately broken invocations must leave the
module untouched mid-walk.
"""
import pathlib
from random import Random

from minifun import parse_module, print_module
from minifun.engine import Success, applicable_ops, apply_op, parse_op_line
from minifun.errors import Refusal
from minifun.select import all_selectors, CompRangeSel
from minifun.syntax import well_formed

from modgen import gen_module

CORPUS = pathlib.Path(__file__).parent / "corpus"

BROKEN_LINES = [
    "rename-type Nowhere X",
    "eliminate Nowhere",
    "permute-cons Nowhere 2,1",
    "delete-comp Nowhere 1",
    "unfold-alias at alias:Nowhere",
]


def random_focus(rng: Random, m):
    sels = [sel for sel, _ in all_selectors(m)]
    options = [None] + sels
    choice = rng.choice(options)
    if choice is None:
        return None
    # sometimes widen a component selector into a range
    from minifun.select import ConsComp

    if isinstance(choice, ConsComp) and not choice.path and rng.random() < 0.3:
        owner = m.cons_owner(choice.cons)
        arity = owner[1].arity
        hi = rng.randint(choice.index, arity)
        return CompRangeSel(choice.ty, choice.cons, choice.index, hi - choice.index + 1)
    return choice


def walk(seed: int, start, steps: int = 6) -> int:
    rng = Random(seed)
    m = start
    performed = 0
    for _ in range(steps):
        focus = random_focus(rng, m)
        suggestions = applicable_ops(m, focus)
        if suggestions:
            inv = rng.choice(suggestions)
            result = apply_op(m, inv)
            assert isinstance(result, Success), (inv.line(), result)
            well_formed(result.module)
            m = result.module
            performed += 1
        # a broken invocation must refuse and change nothing
        before = print_module(m)
        r = apply_op(m, parse_op_line(rng.choice(BROKEN_LINES)))
        assert isinstance(r, Refusal)
        assert print_module(m) == before
    return performed


def test_fuzz_walks_generated_modules():
    performed = sum(walk(seed, gen_module(seed)) for seed in range(60))
    assert performed >= 150


def test_fuzz_walks_corpus():
    performed = 0
    for i, name in enumerate(("conslist.mf", "imp.mf", "trans.mf")):
        m = parse_module((CORPUS / name).read_text())
        performed += sum(walk(1000 * i + k, m) for k in range(10))
    assert performed >= 80
