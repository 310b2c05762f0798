"""Local HTTP service exposing refactoring sessions for the interactive UI.

Sessions are in-memory and single-writer: applies to one session are
serialized; different sessions are independent.  Every payload carries
pretty-printed text plus a span map, never raw AST.
"""
from __future__ import annotations

import os
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse

from .engine import OpInvocation, Session, applicable_ops, parse_op_line
from .errors import Refusal, SourceError
from .parser import parse_module, parse_type_fragment
from .printer import print_module_with_spans
from .select import (
    CompRangeSel,
    EqualsType,
    MentionsName,
    TopLevelIs,
    format_selector,
    parse_selector,
    resolve,
    resolve_range,
    selector_to_focus,
    selectors_matching,
)

MAX_SESSIONS = 128


class _LiveSession:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()
        self.focus = None  # TypeSel | CompRangeSel | None


def _refusal_body(r: Refusal) -> dict:
    return {"code": r.code, "detail": r.detail, "locations": list(r.locations),
            **({"step": r.step} if r.step is not None else {})}


def _todo_json(t) -> dict:
    return {"fun": t.fun, "equation": t.equation, "path": list(t.path), "loc": t.loc()}


def create_app() -> FastAPI:
    app = FastAPI(title="minifun refactoring service")
    sessions: dict[str, _LiveSession] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> _LiveSession:
        live = sessions.get(session_id)
        if live is None:
            raise _NotFound()
        return live

    class _NotFound(Exception):
        pass

    @app.exception_handler(_NotFound)
    async def _on_not_found(request: Request, exc: _NotFound):
        return JSONResponse(status_code=404, content={"detail": "unknown session"})

    @app.exception_handler(Refusal)
    async def _on_refusal(request: Request, exc: Refusal):
        return JSONResponse(status_code=409, content=_refusal_body(exc))

    def rendering(live: _LiveSession) -> dict:
        module = live.session.module
        if live.focus is not None:
            try:
                module = selector_to_focus(module, live.focus)
            except Refusal:
                live.focus = None
                module = live.session.module
        text, spans = print_module_with_spans(module)
        return {
            "text": text,
            "spans": [{"loc": s.loc, "start": s.start, "end": s.end} for s in spans],
            "focus": format_selector(live.focus) if live.focus is not None else None,
        }

    @app.post("/session")
    async def open_session(payload: dict):
        source = payload.get("source")
        if not isinstance(source, str):
            return JSONResponse(status_code=400, content={"detail": "payload needs a source string"})
        try:
            module = parse_module(source)
        except SourceError as exc:
            return JSONResponse(
                status_code=400,
                content={"diagnostics": [{"code": exc.code, "message": exc.message,
                                          "line": exc.line, "column": exc.column}]},
            )
        live = _LiveSession(Session(module))
        session_id = uuid.uuid4().hex
        with registry_lock:
            while len(sessions) >= MAX_SESSIONS:
                sessions.pop(next(iter(sessions)))
            sessions[session_id] = live
        return {"sessionId": session_id, **rendering(live), "diagnostics": []}

    @app.get("/session/{session_id}/source")
    async def get_source(session_id: str):
        live = get_session(session_id)
        with live.lock:
            return rendering(live)

    @app.post("/session/{session_id}/focus")
    async def set_focus(session_id: str, payload: dict):
        live = get_session(session_id)
        selector = payload.get("selector")
        with live.lock:
            if selector in (None, ""):
                live.focus = None
                return rendering(live)
            if not isinstance(selector, str):
                return JSONResponse(status_code=400, content={"detail": "selector must be a string"})
            sel = parse_selector(selector)
            if isinstance(sel, CompRangeSel):
                resolve_range(live.session.module, sel)
            else:
                resolve(live.session.module, sel)
            live.focus = sel
            return rendering(live)

    @app.get("/session/{session_id}/ops")
    async def list_ops(session_id: str):
        live = get_session(session_id)
        with live.lock:
            ops = applicable_ops(live.session.module, live.focus)
            return {
                "ops": [{"op": inv.op, "args": inv.args, "line": inv.line()} for inv in ops],
                "declaredTypes": [d.name for d in live.session.module.type_decls()],
                "focus": format_selector(live.focus) if live.focus is not None else None,
            }

    def _invocation_from(payload_part) -> OpInvocation:
        if isinstance(payload_part, str):
            return parse_op_line(payload_part)
        if isinstance(payload_part, dict):
            op = payload_part.get("op")
            args = payload_part.get("args", {})
            if isinstance(op, str) and isinstance(args, dict):
                return OpInvocation(op, {str(k): str(v) for k, v in args.items()})
        raise Refusal("BadArguments", "opInvocation must be an operator line or {op, args}")

    def _apply_and_render(live: _LiveSession, inv: OpInvocation):
        result = live.session.apply(inv)
        if isinstance(result, Refusal):
            return JSONResponse(status_code=409, content=_refusal_body(result))
        if live.focus is not None:
            try:
                module = live.session.module
                if isinstance(live.focus, CompRangeSel):
                    resolve_range(module, live.focus)
                else:
                    resolve(module, live.focus)
            except Refusal:
                live.focus = None
        return {
            **rendering(live),
            "changed": list(result.changed),
            "todos": [_todo_json(t) for t in result.todos],
        }

    @app.post("/session/{session_id}/apply")
    async def apply_invocation(session_id: str, payload: dict):
        live = get_session(session_id)
        if "opInvocation" not in payload:
            return JSONResponse(status_code=400, content={"detail": "payload needs opInvocation"})
        with live.lock:
            inv = _invocation_from(payload["opInvocation"])
            return _apply_and_render(live, inv)

    @app.post("/session/{session_id}/fold")
    async def fold_dialogue(session_id: str, payload: dict):
        live = get_session(session_id)
        range_str = payload.get("range")
        type_name = payload.get("typeName")
        if not isinstance(range_str, str) or not isinstance(type_name, str) or not type_name:
            return JSONResponse(status_code=400, content={"detail": "payload needs range and typeName"})
        kind = payload.get("kind", "data")
        if kind not in ("type", "newtype", "data"):
            return JSONResponse(status_code=400, content={"detail": "kind must be type, newtype, or data"})
        args = {"range": range_str, "name": type_name, "kind": kind}
        if payload.get("consName"):
            args["cons"] = str(payload["consName"])
        if "introduce" in payload:
            args["introduce"] = "true" if payload["introduce"] else "false"
        with live.lock:
            return _apply_and_render(live, OpInvocation("compound-fold", args))

    @app.get("/session/{session_id}/todos")
    async def list_todos(session_id: str):
        live = get_session(session_id)
        with live.lock:
            return {"todos": [_todo_json(t) for t in live.session.todos()]}

    @app.get("/session/{session_id}/history")
    async def history(session_id: str):
        live = get_session(session_id)
        with live.lock:
            return {"history": [inv.line() for _, inv in live.session.history]}

    @app.post("/session/{session_id}/undo")
    async def undo(session_id: str):
        live = get_session(session_id)
        with live.lock:
            live.session.undo()
            if live.focus is not None:
                try:
                    if isinstance(live.focus, CompRangeSel):
                        resolve_range(live.session.module, live.focus)
                    else:
                        resolve(live.session.module, live.focus)
                except Refusal:
                    live.focus = None
            return rendering(live)

    @app.get("/session/{session_id}/occurrences")
    async def occurrences(session_id: str, equalsType: str | None = None,
                          mentionsName: str | None = None, topLevelIs: str | None = None):
        live = get_session(session_id)
        given = [x for x in (equalsType, mentionsName, topLevelIs) if x is not None]
        if len(given) != 1:
            return JSONResponse(
                status_code=400,
                content={"detail": "exactly one of equalsType, mentionsName, topLevelIs"},
            )
        if equalsType is not None:
            try:
                from .syntax import strip_focus_type

                predicate = EqualsType(strip_focus_type(parse_type_fragment(equalsType)))
            except SourceError as exc:
                return JSONResponse(status_code=400, content={"detail": exc.format()})
        elif mentionsName is not None:
            predicate = MentionsName(mentionsName)
        else:
            predicate = TopLevelIs(topLevelIs)
        with live.lock:
            sels = selectors_matching(live.session.module, predicate)
            return {"selectors": [format_selector(s) for s in sels]}

    ui_dir = os.environ.get("MINIFUN_UI_DIR")
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    if ui_dir and Path(ui_dir).is_dir():
        base = Path(ui_dir)

        @app.get("/")
        async def index():
            return FileResponse(base / "index.html")

        @app.get("/ui/{asset:path}")
        async def ui_asset(asset: str):
            target = (base / asset).resolve()
            if not str(target).startswith(str(base.resolve())) or not target.is_file():
                return JSONResponse(status_code=404, content={"detail": "no such asset"})
            return FileResponse(target)

    return app


def serve(host: str = "127.0.0.1", port: int = 7878) -> None:
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
