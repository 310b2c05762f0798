"""Datatype refactoring engine for the MiniFun object language.

The package splits along the natural seams: `syntax` (the object
language), `parser`/`printer` (concrete syntax), `select` (selectors,
focus markers, predicates), `typeops` (declaration-level operators),
`lift` (program-level completion), `engine` (dispatch, scripts, sessions),
`evaluator` (the semantic oracle), `cli`, and `service`.
"""
from .errors import EvalError, MiniFunError, Refusal, SourceError
from .evaluator import eval_expr, value_text
from .parser import parse_expr_fragment, parse_module, parse_type_fragment
from .printer import print_module, print_module_with_spans, type_text
from .select import (
    AliasRhs,
    CompRangeSel,
    ConsComp,
    EqualsType,
    MentionsName,
    NewtypeRhs,
    SigUse,
    TopLevelIs,
    focus_to_selector,
    format_selector,
    parse_selector,
    resolve,
    selector_to_focus,
    selectors_matching,
)
from .engine import (
    OpInvocation,
    Script,
    Session,
    Success,
    applicable_ops,
    apply_op,
    parse_op_line,
    parse_script,
    run_script,
    seq_trafo,
)
from .syntax import Module, alpha_eq, constructors_of, free_type_vars, well_formed

__all__ = [
    "AliasRhs",
    "CompRangeSel",
    "ConsComp",
    "EqualsType",
    "EvalError",
    "MentionsName",
    "MiniFunError",
    "Module",
    "NewtypeRhs",
    "OpInvocation",
    "Refusal",
    "Script",
    "Session",
    "SigUse",
    "SourceError",
    "Success",
    "TopLevelIs",
    "alpha_eq",
    "applicable_ops",
    "apply_op",
    "constructors_of",
    "eval_expr",
    "focus_to_selector",
    "format_selector",
    "free_type_vars",
    "parse_expr_fragment",
    "parse_module",
    "parse_op_line",
    "parse_script",
    "parse_selector",
    "parse_type_fragment",
    "print_module",
    "print_module_with_spans",
    "resolve",
    "run_script",
    "selector_to_focus",
    "selectors_matching",
    "seq_trafo",
    "type_text",
    "value_text",
    "well_formed",
]
