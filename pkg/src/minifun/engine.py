"""Transformation engine: operator dispatch, scripts, sessions, undo.

A transformation is a partial function on modules; refusal leaves the input
untouched.  Scripts are line-oriented (one invocation per line, `#`
comments); the same invocations drive the CLI, the HTTP service, and the
interactive compound-fold dialogue.
"""
from __future__ import annotations

import re
import shlex
from dataclasses import dataclass
from typing import Callable

from . import lift, typeops
from .errors import Refusal, SourceError, refuse
from .parser import (
    parse_consdecl_fragment,
    parse_decls_fragment,
    parse_type_fragment,
)
from .printer import type_text
from .select import (
    AliasRhs,
    CompRangeSel,
    ConsComp,
    NewtypeRhs,
    TypeSel,
    format_selector,
    parse_selector,
    resolve,
    resolve_range,
)
from .syntax import (
    AliasDecl,
    App,
    DataDecl,
    Decl,
    FunDecl,
    IllFormed,
    Module,
    NewtypeDecl,
    Sig,
    Tuple,
    strip_focus,
    type_alpha_eq,
    well_formed,
)
from .typeops import DataUnifier, Permutation, TypeHdr


@dataclass
class OpInvocation:
    op: str
    args: dict

    def line(self) -> str:
        return CATALOGUE[self.op].render(self.args)


@dataclass(frozen=True)
class Success:
    module: Module
    todos: tuple[lift.TodoMarker, ...] = ()
    changed: tuple[str, ...] = ()


TrafoResult = Success | Refusal


@dataclass(frozen=True)
class Script:
    steps: tuple[tuple[int, OpInvocation], ...]  # (line number, invocation)


# ---------------------------------------------------------------------------
# argument parsing helpers

def _perm(text: str) -> Permutation:
    try:
        return Permutation(tuple(int(x) for x in text.split(",")))
    except ValueError:
        refuse("BadArguments", f"malformed permutation {text!r}")


def _sel(text: str) -> TypeSel:
    sel = parse_selector(text)
    if isinstance(sel, CompRangeSel):
        refuse("BadArguments", f"expected a type selector, got a component range {text!r}")
    return sel


def _range(text: str) -> CompRangeSel:
    sel = parse_selector(text)
    if not isinstance(sel, CompRangeSel):
        if isinstance(sel, ConsComp) and not sel.path:
            return CompRangeSel(sel.ty, sel.cons, sel.index, 1)
        refuse("BadArguments", f"expected a component range, got {text!r}")
    return sel


_UNIFIER_RE = re.compile(r"unifier\(([^)]*)\)")


def parse_unifiers(text: str) -> list[DataUnifier]:
    unifiers = []
    for body in _UNIFIER_RE.findall(text):
        parts = body.split(";")
        if len(parts) != 2 or "=" not in parts[0]:
            refuse("BadArguments", f"malformed unifier {body!r}")
        old_ty, new_ty = (s.strip() for s in parts[0].split("=", 1))
        pairs = []
        for chunk in parts[1].split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "=" not in chunk:
                refuse("BadArguments", f"malformed constructor pair {chunk!r}")
            a, b = (s.strip() for s in chunk.split("=", 1))
            pairs.append((a, b))
        if not pairs:
            refuse("BadArguments", f"unifier {body!r} names no constructor pairs")
        unifiers.append(DataUnifier(old_ty, new_ty, tuple(pairs)))
    if not unifiers:
        refuse("BadArguments", f"no unifier(...) groups in {text!r}")
    return unifiers


def render_unifier(u: DataUnifier) -> str:
    pairs = ", ".join(f"{a}={b}" for a, b in u.cons_pairs)
    return f"unifier({u.old_ty}={u.new_ty}; {pairs})"


def _argmap(text: str) -> dict[str, tuple[int, ...]]:
    out: dict[str, tuple[int, ...]] = {}
    for chunk in text.split(","):
        if "=" not in chunk:
            refuse("BadArguments", f"malformed argument map entry {chunk!r}")
        var, path = chunk.split("=", 1)
        try:
            out[var.strip()] = tuple(int(x) for x in path.split("."))
        except ValueError:
            refuse("BadArguments", f"malformed argument map path {path!r}")
    return out


def _shlex(rest: str) -> list[str]:
    """Split on whitespace honoring double quotes only; apostrophes are
    ordinary identifier characters (Maybe', Just')."""
    lex = shlex.shlex(rest, posix=True)
    lex.quotes = '"'
    lex.whitespace_split = True
    lex.commenters = ""
    try:
        return list(lex)
    except ValueError as exc:
        refuse("BadArguments", f"malformed arguments: {exc}")


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# the operator catalogue

@dataclass(frozen=True)
class OpDef:
    name: str
    parse: Callable[[str], dict]
    apply: Callable[[Module, dict], Module]
    render: Callable[[dict], str]


def _two_names(op: str, keys: tuple[str, str]):
    def parse(rest: str) -> dict:
        parts = rest.split()
        if len(parts) != 2:
            refuse("BadArguments", f"{op} expects two names")
        return {keys[0]: parts[0], keys[1]: parts[1]}

    return parse


def _one_name(op: str, key: str):
    def parse(rest: str) -> dict:
        parts = rest.split()
        if len(parts) != 1:
            refuse("BadArguments", f"{op} expects one name")
        return {key: parts[0]}

    return parse


def _apply_rename_type(m: Module, a: dict) -> Module:
    return typeops.rename_type(m, a["old"], a["new"])


def _apply_rename_cons(m: Module, a: dict) -> Module:
    m2 = typeops.rename_cons(m, a["old"], a["new"])
    if a["old"] == a["new"]:
        return m2
    return lift.lift_rename_cons(m2, a["old"], a["new"])


def _apply_permute_params(m: Module, a: dict) -> Module:
    return typeops.permute_type_params(m, a["ty"], _perm(a["perm"]))


def _apply_permute_cons(m: Module, a: dict) -> Module:
    p = _perm(a["perm"])
    m2 = typeops.permute_cons_components(m, a["cons"], p)
    return lift.lift_permute_components(m2, a["cons"], p.image)


def _parse_fragment_decls(text: str) -> list[Decl]:
    try:
        return parse_decls_fragment(text)
    except SourceError as exc:
        refuse("BadArguments", f"cannot parse declarations: {exc.message}")


def _apply_introduce(m: Module, a: dict) -> Module:
    return typeops.introduce(m, _parse_fragment_decls(a["decls"]))


def _apply_eliminate(m: Module, a: dict) -> Module:
    names = [n for n in re.split(r"[,\s]+", a["names"]) if n]
    return typeops.eliminate(m, names)


def _apply_fold_alias(m: Module, a: dict) -> Module:
    arg_map = _argmap(a["argmap"]) if a.get("argmap") else None
    return typeops.fold_alias(m, _sel(a["at"]), TypeHdr(a["alias"]), arg_map)


def _apply_unfold_alias(m: Module, a: dict) -> Module:
    return typeops.unfold_alias(m, _sel(a["at"]))


def _apply_group(m: Module, a: dict) -> Module:
    r = _range(a["range"])
    owner = m.cons_owner(r.cons)
    old_arity = owner[1].arity if owner else 0
    m2 = typeops.group_components(m, r)
    return lift.lift_group(m2, r.cons, r.start, r.count, old_arity)


def _apply_ungroup(m: Module, a: dict) -> Module:
    sel = _sel(a["at"])
    if not isinstance(sel, ConsComp) or sel.path:
        refuse("BadArguments", "ungroup expects a constructor component selector")
    comp = resolve(m, sel)
    if not isinstance(comp, Tuple):
        refuse("NotATuple", f"component {sel.index} of {sel.cons} is not a tuple", (a["at"],))
    width = len(comp.elems)
    old_arity = m.cons_owner(sel.cons)[1].arity
    m2 = typeops.ungroup_component(m, sel.ty, sel.cons, sel.index)
    return lift.lift_ungroup(m2, sel.cons, sel.index, width, old_arity)


def _apply_alias2newtype(m: Module, a: dict) -> Module:
    m2 = typeops.alias_to_newtype(m, a["ty"], a["cons"])
    return lift.lift_alias_to_newtype(m2, a["ty"], a["cons"])


def _apply_newtype2alias(m: Module, a: dict) -> Module:
    d = m.type_decl(a["ty"])
    cons_name = d.con.name if isinstance(d, NewtypeDecl) else None
    m2 = typeops.newtype_to_alias(m, a["ty"])
    return lift.lift_newtype_to_alias(m2, cons_name)


def _apply_newtype2data(m: Module, a: dict) -> Module:
    return typeops.newtype_to_data(m, a["ty"])


def _apply_data2newtype(m: Module, a: dict) -> Module:
    return typeops.data_to_newtype(m, a["ty"])


def _apply_swap_alias(m: Module, a: dict) -> Module:
    return typeops.swap_alias(m, a["old"], a["new"], _sel(a["at"]))


def _apply_swap_data(m: Module, a: dict) -> Module:
    unifiers = parse_unifiers(a["unifiers"])
    m2 = typeops.swap_data(m, unifiers, _sel(a["at"]))
    for u in unifiers:
        m2 = lift.generate_mediators(m2, u, unifiers)
    return lift.lift_swap_boundaries(m, m2, unifiers)


def _apply_include_cons(m: Module, a: dict) -> Module:
    try:
        c = parse_consdecl_fragment(a["cons"])
    except SourceError as exc:
        refuse("BadArguments", f"cannot parse constructor declaration: {exc.message}")
    position = int(a["at"]) if a.get("at") else None
    m2 = typeops.include_cons(m, a["ty"], c, position)
    return lift.lift_include(m2, a["ty"], c)


def _apply_exclude_cons(m: Module, a: dict) -> Module:
    m2 = typeops.exclude_cons(m, a["ty"], a["cons"])
    return lift.lift_exclude(m2, a["ty"], a["cons"])


def _apply_insert_comp(m: Module, a: dict) -> Module:
    try:
        ctype = parse_type_fragment(a["type"])
    except SourceError as exc:
        refuse("BadArguments", f"cannot parse component type: {exc.message}")
    i = int(a["index"])
    owner = m.cons_owner(a["cons"])
    old_arity = owner[1].arity if owner else 0
    m2 = typeops.insert_component(m, a["cons"], i, ctype)
    return lift.lift_insert(m2, a["cons"], i, old_arity)


def _apply_delete_comp(m: Module, a: dict) -> Module:
    i = int(a["index"])
    owner = m.cons_owner(a["cons"])
    old_arity = owner[1].arity if owner else 0
    m2 = typeops.delete_component(m, a["cons"], i)
    return lift.lift_delete(m2, a["cons"], i, old_arity)


def _parse_fold_alias(rest: str) -> dict:
    mo = re.fullmatch(r"(alias:)?(\S+?)(?:\s+with\s+(\S+))?\s+at\s+(\S+)", rest.strip())
    if mo is None:
        refuse("BadArguments", "usage: fold-alias <alias> [with a=1.2,...] at <selector>")
    args = {"alias": mo.group(2), "at": mo.group(4)}
    if mo.group(3):
        args["argmap"] = mo.group(3)
    return args


def _parse_at(rest: str) -> dict:
    parts = rest.split()
    if parts and parts[0] == "at":
        parts = parts[1:]
    if len(parts) != 1:
        refuse("BadArguments", "expected exactly one selector")
    return {"at": parts[0]}


def _parse_swap_alias(rest: str) -> dict:
    mo = re.fullmatch(r"(\S+)\s+(\S+)\s+at\s+(\S+)", rest.strip())
    if mo is None:
        refuse("BadArguments", "usage: swap-alias <old> <new> at <selector>")
    return {"old": mo.group(1), "new": mo.group(2), "at": mo.group(3)}


def _parse_swap_data(rest: str) -> dict:
    mo = re.fullmatch(r"(.*?)\s+at\s+(\S+)", rest.strip())
    if mo is None:
        refuse("BadArguments", "usage: swap-data unifier(...) [unifier(...)] at <selector>")
    parse_unifiers(mo.group(1))  # validate shape early
    return {"unifiers": mo.group(1).strip(), "at": mo.group(2)}


def _parse_include(rest: str) -> dict:
    parts = _shlex(rest)
    if len(parts) >= 4 and parts[-2] == "at":
        if len(parts) != 4:
            refuse("BadArguments", "usage: include-cons <ty> \"<constructor>\" [at <position>]")
        return {"ty": parts[0], "cons": parts[1], "at": parts[3]}
    if len(parts) != 2:
        refuse("BadArguments", "usage: include-cons <ty> \"<constructor>\" [at <position>]")
    return {"ty": parts[0], "cons": parts[1]}


def _parse_insert(rest: str) -> dict:
    parts = _shlex(rest)
    if len(parts) != 3 or not parts[1].isdigit():
        refuse("BadArguments", "usage: insert-comp <cons> <position> \"<type>\"")
    return {"cons": parts[0], "index": parts[1], "type": parts[2]}


def _parse_delete(rest: str) -> dict:
    parts = rest.split()
    if len(parts) != 2 or not parts[1].isdigit():
        refuse("BadArguments", "usage: delete-comp <cons> <position>")
    return {"cons": parts[0], "index": parts[1]}


def _parse_introduce(rest: str) -> dict:
    parts = _shlex(rest)
    if len(parts) != 1:
        refuse("BadArguments", "usage: introduce \"<declarations>\"")
    return {"decls": parts[0]}


def _parse_compound_fold(rest: str) -> dict:
    parts = _shlex(rest)
    if len(parts) < 3:
        refuse("BadArguments", "usage: compound-fold <range> <name> <kind> [<cons>] [introduce|nointroduce]")
    args = {"range": parts[0], "name": parts[1], "kind": parts[2]}
    rest_parts = parts[3:]
    if rest_parts and rest_parts[-1] in ("introduce", "nointroduce"):
        args["introduce"] = "true" if rest_parts[-1] == "introduce" else "false"
        rest_parts = rest_parts[:-1]
    if rest_parts:
        args["cons"] = rest_parts[0]
    if args["kind"] not in ("type", "newtype", "data"):
        refuse("BadArguments", "kind must be type, newtype, or data")
    return args


CATALOGUE: dict[str, OpDef] = {}


def _op(name: str, parse, apply, render) -> None:
    CATALOGUE[name] = OpDef(name, parse, apply, render)


_op("rename-type", _two_names("rename-type", ("old", "new")), _apply_rename_type,
    lambda a: f"rename-type {a['old']} {a['new']}")
_op("rename-cons", _two_names("rename-cons", ("old", "new")), _apply_rename_cons,
    lambda a: f"rename-cons {a['old']} {a['new']}")
_op("permute-params", _two_names("permute-params", ("ty", "perm")), _apply_permute_params,
    lambda a: f"permute-params {a['ty']} {a['perm']}")
_op("permute-cons", _two_names("permute-cons", ("cons", "perm")), _apply_permute_cons,
    lambda a: f"permute-cons {a['cons']} {a['perm']}")
_op("introduce", _parse_introduce, _apply_introduce,
    lambda a: f"introduce {_quote(a['decls'])}")
_op("eliminate", lambda rest: {"names": rest.strip()} if rest.strip() else refuse("BadArguments", "eliminate needs names"),
    _apply_eliminate, lambda a: f"eliminate {a['names']}")
_op("fold-alias", _parse_fold_alias, _apply_fold_alias,
    lambda a: f"fold-alias alias:{a['alias']}" + (f" with {a['argmap']}" if a.get("argmap") else "") + f" at {a['at']}")
_op("unfold-alias", _parse_at, _apply_unfold_alias, lambda a: f"unfold-alias at {a['at']}")
_op("group", _one_name("group", "range"), _apply_group, lambda a: f"group {a['range']}")
_op("ungroup", _one_name("ungroup", "at"), _apply_ungroup, lambda a: f"ungroup {a['at']}")
_op("alias2newtype", _two_names("alias2newtype", ("ty", "cons")), _apply_alias2newtype,
    lambda a: f"alias2newtype {a['ty']} {a['cons']}")
_op("newtype2alias", _one_name("newtype2alias", "ty"), _apply_newtype2alias,
    lambda a: f"newtype2alias {a['ty']}")
_op("newtype2data", _one_name("newtype2data", "ty"), _apply_newtype2data,
    lambda a: f"newtype2data {a['ty']}")
_op("data2newtype", _one_name("data2newtype", "ty"), _apply_data2newtype,
    lambda a: f"data2newtype {a['ty']}")
_op("swap-alias", _parse_swap_alias, _apply_swap_alias,
    lambda a: f"swap-alias {a['old']} {a['new']} at {a['at']}")
_op("swap-data", _parse_swap_data, _apply_swap_data,
    lambda a: f"swap-data {a['unifiers']} at {a['at']}")
_op("include-cons", _parse_include, _apply_include_cons,
    lambda a: f"include-cons {a['ty']} {_quote(a['cons'])}" + (f" at {a['at']}" if a.get("at") else ""))
_op("exclude-cons", _two_names("exclude-cons", ("ty", "cons")), _apply_exclude_cons,
    lambda a: f"exclude-cons {a['ty']} {a['cons']}")
_op("insert-comp", _parse_insert, _apply_insert_comp,
    lambda a: f"insert-comp {a['cons']} {a['index']} {_quote(a['type'])}")
_op("delete-comp", _parse_delete, _apply_delete_comp,
    lambda a: f"delete-comp {a['cons']} {a['index']}")
_op("compound-fold", _parse_compound_fold, None,  # expanded by Session/apply_op
    lambda a: f"compound-fold {a['range']} {a['name']} {a['kind']}"
    + (f" {a['cons']}" if a.get("cons") else "")
    + (" introduce" if a.get("introduce", "true") == "true" else " nointroduce"))


# ---------------------------------------------------------------------------
# change summaries

def diff_modules(old: Module, new: Module) -> list[str]:
    def key(d: Decl):
        if isinstance(d, (AliasDecl, NewtypeDecl, DataDecl)):
            return ("type", d.name)
        if isinstance(d, Sig):
            return ("sig", d.fun)
        return ("fun", d.fun)

    def label(k) -> str:
        kind, name = k
        return {"type": f"decl:{name}", "sig": f"sig:{name}", "fun": f"fun:{name}"}[kind]

    old_map = {key(d): d for d in old.decls}
    new_map = {key(d): d for d in new.decls}
    changed: list[str] = []
    for k, d in new_map.items():
        if k not in old_map:
            changed.append(label(k))
        elif old_map[k] != d:
            if isinstance(d, FunDecl):
                before = old_map[k].equations
                after = d.equations
                for i in range(max(len(before), len(after))):
                    if i >= len(before) or i >= len(after) or before[i] != after[i]:
                        changed.append(f"eq:{d.fun}/{i + 1}")
            else:
                changed.append(label(k))
    for k in old_map:
        if k not in new_map:
            changed.append(label(k))
    return changed


# ---------------------------------------------------------------------------
# application

def parse_op_line(line: str) -> OpInvocation:
    line = line.strip()
    if not line:
        refuse("BadArguments", "empty operator line")
    name, _, rest = line.partition(" ")
    op = CATALOGUE.get(name)
    if op is None:
        refuse("BadArguments", f"unknown operator {name!r}")
    return OpInvocation(name, op.parse(rest.strip()))


def compound_fold_steps(m: Module, args: dict) -> list[OpInvocation]:
    """Expand the fold dialogue into its constituent operator invocations."""
    r = _range(args["range"])
    comps = resolve_range(m, r)
    name = args["name"]
    kind = args.get("kind", "data")
    cons = args.get("cons") or name
    exists = m.type_decl(name) is not None
    if "introduce" in args:
        intro = args["introduce"] == "true"
    else:
        intro = not exists  # the dialogue's auto-checked introduce box
    steps: list[OpInvocation] = []
    grouped = Tuple(tuple(comps)) if len(comps) > 1 else comps[0]
    if len(comps) > 1:
        steps.append(OpInvocation("group", {"range": format_selector(r)}))
    if intro:
        steps.append(OpInvocation("introduce", {"decls": f"type {name} = {type_text(grouped)}"}))
    target = format_selector(ConsComp(r.ty, r.cons, r.start))
    steps.append(OpInvocation("fold-alias", {"alias": name, "at": target}))
    if kind in ("newtype", "data"):
        steps.append(OpInvocation("alias2newtype", {"ty": name, "cons": cons}))
    if kind == "data":
        steps.append(OpInvocation("newtype2data", {"ty": name}))
    if len(comps) > 1 and kind in ("newtype", "data"):
        steps.append(OpInvocation("ungroup", {"at": format_selector(ConsComp(name, cons, 1))}))
    return steps


def apply_op(m: Module, inv: OpInvocation) -> TrafoResult:
    """One fused datatype-plus-program step; refusal returns the input
    untouched."""
    try:
        if inv.op == "compound-fold":
            steps = compound_fold_steps(strip_focus(m), inv.args)
            return run_steps(m, [(i + 1, s) for i, s in enumerate(steps)])
        op = CATALOGUE.get(inv.op)
        if op is None:
            refuse("BadArguments", f"unknown operator {inv.op!r}")
        m0 = strip_focus(m)
        new = op.apply(m0, inv.args)
        try:
            well_formed(new)
        except IllFormed as exc:  # postcondition: never emit an ill-formed module
            raise AssertionError(f"{inv.op} produced an ill-formed module: {exc}") from exc
        return Success(new, tuple(lift.scan_todos(new)), tuple(diff_modules(m0, new)))
    except Refusal as r:
        return r


def run_steps(m: Module, steps: list[tuple[int, OpInvocation]]) -> TrafoResult:
    changed: dict[str, None] = {}
    todos: tuple = ()
    current = m
    for idx, (lineno, inv) in enumerate(steps, start=1):
        result = apply_op(current, inv)
        if isinstance(result, Refusal):
            result.step = result.step if result.step is not None else lineno
            return result
        current = result.module
        todos = result.todos
        for c in result.changed:
            changed[c] = None
    return Success(current, todos, tuple(changed))


# ---------------------------------------------------------------------------
# scripts

def parse_script(text: str) -> Script:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            steps.append((lineno, parse_op_line(line)))
        except Refusal as r:
            r.step = lineno
            raise
    return Script(tuple(steps))


def run_script(m: Module, s: Script) -> TrafoResult:
    return run_steps(m, list(s.steps))


# ---------------------------------------------------------------------------
# sequential composition (the engine's composition primitive)

class Trafo:
    """A partial module transformation with a step count for attribution."""

    def __init__(self, fn: Callable[[Module], TrafoResult], size: int = 1):
        self.fn = fn
        self.size = size

    def __call__(self, m: Module) -> TrafoResult:
        return self.fn(m)


def as_trafo(inv: OpInvocation) -> Trafo:
    return Trafo(lambda m: apply_op(m, inv), 1)


def identity_trafo() -> Trafo:
    return Trafo(lambda m: Success(m, tuple(lift.scan_todos(m)), ()), 0)


def seq_trafo(t1: Trafo, t2: Trafo) -> Trafo:
    def run(m: Module) -> TrafoResult:
        r1 = t1(m)
        if isinstance(r1, Refusal):
            r1.step = r1.step if r1.step is not None else 1
            return r1
        r2 = t2(r1.module)
        if isinstance(r2, Refusal):
            r2.step = (r2.step if r2.step is not None else 1) + t1.size
            return r2
        merged = dict.fromkeys(r1.changed)
        merged.update(dict.fromkeys(r2.changed))
        return Success(r2.module, r2.todos, tuple(merged))

    return Trafo(run, t1.size + t2.size)


# ---------------------------------------------------------------------------
# sessions

class Session:
    """One module under transformation, with an undo history.

    Replaying the recorded invocations from the initial module always
    reproduces the current module.
    """

    def __init__(self, module: Module):
        well_formed(module)
        self.initial = module
        self.module = module
        self.history: list[tuple[Module, OpInvocation]] = []

    def apply(self, inv: OpInvocation) -> TrafoResult:
        if inv.op == "compound-fold":
            try:
                steps = compound_fold_steps(strip_focus(self.module), inv.args)
            except Refusal as r:
                return r
            staged: list[tuple[Module, OpInvocation]] = []
            current = self.module
            for i, step in enumerate(steps, start=1):
                result = apply_op(current, step)
                if isinstance(result, Refusal):
                    result.step = i
                    return result
                staged.append((current, step))
                current = result.module
            self.history.extend(staged)
            self.module = current
            return Success(current, tuple(lift.scan_todos(current)),
                           tuple(diff_modules(staged[0][0], current)) if staged else ())
        result = apply_op(self.module, inv)
        if isinstance(result, Success):
            self.history.append((self.module, inv))
            self.module = result.module
        return result

    def undo(self) -> Module:
        if not self.history:
            refuse("EmptyHistory", "nothing to undo")
        before, _ = self.history.pop()
        self.module = before
        return before

    def todos(self) -> list[lift.TodoMarker]:
        return lift.scan_todos(self.module)

    def replay(self) -> Module:
        current = self.initial
        for _, inv in self.history:
            result = apply_op(current, inv)
            assert isinstance(result, Success), "history must replay cleanly"
            current = result.module
        return current


# ---------------------------------------------------------------------------
# applicable operations at a focus

def applicable_ops(m: Module, focus: TypeSel | CompRangeSel | None) -> list[OpInvocation]:
    """Catalogue templates whose preconditions hold at the focus, with
    arguments pre-filled; every returned template applies successfully."""
    m = strip_focus(m)
    candidates: list[OpInvocation] = []
    taken_tys = {d.name for d in m.type_decls()} | {"Int", "String"}

    def fresh_ty(base: str) -> str:
        cand = base
        while cand in taken_tys:
            cand += "'"
        return cand

    def fresh_cons(base: str) -> str:
        cand = base
        while m.cons_owner(cand) is not None:
            cand += "'"
        return cand

    if focus is None:
        name = fresh_ty("T0")
        cons = fresh_cons("C0")
        candidates.append(OpInvocation("introduce", {"decls": f"data {name} = {cons}"}))
    elif isinstance(focus, CompRangeSel):
        try:
            resolve_range(m, focus)
        except Refusal:
            return []
        if focus.count >= 2:
            candidates.append(OpInvocation("group", {"range": format_selector(focus)}))
        name = fresh_ty("T0")
        candidates.append(
            OpInvocation(
                "compound-fold",
                {"range": format_selector(focus), "name": name, "kind": "data",
                 "cons": fresh_cons(name), "introduce": "true"},
            )
        )
    else:
        try:
            selected = resolve(m, focus)
        except Refusal:
            return []
        at = format_selector(focus)
        if isinstance(selected, App):
            d = m.type_decl(selected.name)
            candidates.append(OpInvocation("rename-type", {"old": selected.name, "new": fresh_ty(selected.name)}))
            if isinstance(d, AliasDecl):
                candidates.append(OpInvocation("unfold-alias", {"at": at}))
                for other in m.type_decls():
                    if (
                        isinstance(other, AliasDecl)
                        and other.name != d.name
                        and type_alpha_eq(d.rhs, other.rhs, d.params, other.params)
                    ):
                        candidates.append(
                            OpInvocation("swap-alias", {"old": d.name, "new": other.name, "at": at})
                        )
            if isinstance(d, (DataDecl, NewtypeDecl)):
                for other in m.type_decls():
                    u = _derive_unifier(m, d, other)
                    if u is not None:
                        candidates.append(
                            OpInvocation("swap-data", {"unifiers": render_unifier(u), "at": at})
                        )
        for alias in m.type_decls():
            if isinstance(alias, AliasDecl):
                subst: dict = {}
                if typeops._match_type(alias.rhs, selected, alias.params, subst) and all(
                    p in subst for p in alias.params
                ):
                    candidates.append(OpInvocation("fold-alias", {"alias": alias.name, "at": at}))
        if isinstance(focus, AliasRhs) and not focus.path:
            d = m.type_decl(focus.name)
            if isinstance(d, AliasDecl):
                candidates.append(
                    OpInvocation("alias2newtype", {"ty": focus.name, "cons": fresh_cons(focus.name)})
                )
        if isinstance(focus, NewtypeRhs) and not focus.path:
            candidates.append(OpInvocation("newtype2alias", {"ty": focus.name}))
            candidates.append(OpInvocation("newtype2data", {"ty": focus.name}))
        if isinstance(focus, ConsComp) and not focus.path:
            candidates.append(OpInvocation("delete-comp", {"cons": focus.cons, "index": str(focus.index)}))
            candidates.append(
                OpInvocation("insert-comp", {"cons": focus.cons, "index": str(focus.index), "type": "Int"})
            )
            if isinstance(selected, Tuple):
                candidates.append(OpInvocation("ungroup", {"at": at}))
            d = m.type_decl(focus.ty)
            if isinstance(d, DataDecl) and len(d.conss) >= 2:
                candidates.append(OpInvocation("exclude-cons", {"ty": focus.ty, "cons": focus.cons}))

    out = []
    for inv in candidates:
        if isinstance(apply_op(m, inv), Success):
            out.append(inv)
    return out


def _derive_unifier(m: Module, d, other) -> DataUnifier | None:
    """Positional structural correspondence between two datatypes, if any."""
    if other is d or isinstance(other, AliasDecl) or type(other) is not type(d):
        return None
    cons_d = m.constructors(d)
    cons_o = m.constructors(other)
    if len(d.params) != len(other.params) or len(cons_d) != len(cons_o):
        return None
    u = DataUnifier(d.name, other.name, tuple((a.name, b.name) for a, b in zip(cons_d, cons_o)))
    try:
        typeops.validate_unifiers(m, [u])
    except Refusal:
        return None
    return u
