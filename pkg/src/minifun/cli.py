"""Command-line front end for the scripting mode.

Exit codes: 0 success, 1 refusal (reason on stderr as `CODE: message @
location`), 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys

from .engine import Success, apply_op, applicable_ops, parse_op_line, parse_script, run_script
from .errors import EvalError, Refusal, SourceError
from .evaluator import eval_expr, value_text
from .parser import parse_expr_fragment, parse_module
from .printer import print_module
from .select import parse_selector
from .syntax import IllFormed, Module, well_formed


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_module(path: str) -> Module:
    return parse_module(_read_input(path))


def _diag(message: str) -> None:
    sys.stderr.write(message + "\n")


def _run_transform(args, result, source: str) -> int:
    if isinstance(result, Success):
        _write_output(args.output, print_module(result.module))
        for todo in result.todos:
            _diag(f"todo: {todo.loc()}")
        return 0
    _diag(result.format())
    if args.passthrough:
        _write_output(args.output, source)
    return 1


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="minifun", description="Datatype refactoring for MiniFun modules")
    sub = ap.add_subparsers(dest="verb", required=True)

    def add_io(p, output=True):
        p.add_argument("-i", "--input", required=True, help="module file (.mf), - for stdin")
        if output:
            p.add_argument("-o", "--output", default=None, help="output file, default stdout")
            p.add_argument("--passthrough", action="store_true",
                           help="echo the input module on refusal")

    p_apply = sub.add_parser("apply", help="apply a single operator line")
    p_apply.add_argument("op_line", help='e.g. "rename-type ConsList SnocList"')
    add_io(p_apply)

    p_script = sub.add_parser("script", help="run a .trafo script")
    p_script.add_argument("script", help="script file, one operator per line")
    add_io(p_script)

    p_check = sub.add_parser("check", help="parse and check module invariants")
    add_io(p_check, output=False)

    p_ops = sub.add_parser("ops", help="list applicable operators at a focus")
    p_ops.add_argument("--focus", default=None, help="selector string, e.g. alias:Block")
    add_io(p_ops, output=False)

    p_fmt = sub.add_parser("fmt", help="pretty-print a module")
    add_io(p_fmt)

    p_eval = sub.add_parser("eval", help="evaluate an expression against a module")
    p_eval.add_argument("-e", "--expr", required=True)
    add_io(p_eval, output=False)

    p_serve = sub.add_parser("serve", help="start the interactive refactoring service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=7878)

    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        if args.verb == "check":
            module = _load_module(args.input)
            well_formed(module)
            _diag(f"OK: {len(module.decls)} declarations")
            return 0
        if args.verb == "fmt":
            module = _load_module(args.input)
            _write_output(args.output, print_module(module))
            return 0
        if args.verb == "apply":
            source = _read_input(args.input)
            module = parse_module(source)
            inv = parse_op_line(args.op_line)
            return _run_transform(args, apply_op(module, inv), source)
        if args.verb == "script":
            source = _read_input(args.input)
            module = parse_module(source)
            script = parse_script(_read_input(args.script))
            return _run_transform(args, run_script(module, script), source)
        if args.verb == "ops":
            module = _load_module(args.input)
            focus = parse_selector(args.focus) if args.focus else None
            for inv in applicable_ops(module, focus):
                sys.stdout.write(inv.line() + "\n")
            return 0
        if args.verb == "eval":
            module = _load_module(args.input)
            expr = parse_expr_fragment(args.expr)
            value = eval_expr(module, expr)
            sys.stdout.write(value_text(value) + "\n")
            return 0
        if args.verb == "serve":
            from .service import serve

            serve(args.host, args.port)
            return 0
    except SourceError as exc:
        _diag(exc.format())
        return 2
    except IllFormed as exc:
        _diag(f"IllFormed: {exc}")
        return 2
    except Refusal as exc:
        _diag(exc.format())
        return 1
    except EvalError as exc:
        _diag(str(exc))
        return 1
    except OSError as exc:
        _diag(f"IOError: {exc}")
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
