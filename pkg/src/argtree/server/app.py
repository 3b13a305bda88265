"""The editor backend: one session, JSON over HTTP under /api/v1.

Mutations are serialized through the session lock and carry optimistic
revision numbers; reads always observe committed state. Running the tree
streams newline-delimited JSON log events.
"""

from __future__ import annotations

import copy
import json
import os
import queue
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..demo import build_demo_registry, run_tree
from ..errors import ArgTreeError
from ..registry import Registry
from ..render import to_dot
from .models import (
    AddChildRequest,
    ConfigResponse,
    LoadRequest,
    RegistryModel,
    RemoveChildRequest,
    ResetRequest,
    SaveRequest,
    SearchMatchModel,
    SearchResponse,
    SessionStateModel,
    SetArgRequest,
    TreeNodeModel,
    ViolationModel,
)
from .session import EditorSession, SessionError

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>argtree editor</title></head>
<body><h1>argtree editor backend</h1>
<p>The API lives under <code>/api/v1</code>. The browser frontend is not
built; see the README for build instructions.</p></body></html>
"""


def _session_state(session: EditorSession) -> SessionStateModel:
    return SessionStateModel(
        revision=session.revision,
        entry_req=session.entry_req,
        entry_kind=session.entry_kind,
        root=TreeNodeModel.from_node(session.root) if session.root is not None else None,
        violations=[ViolationModel.from_violation(v) for v in session.last_violations],
    )


def _error_response(err: SessionError) -> JSONResponse:
    return JSONResponse(
        status_code=err.status,
        content={
            "detail": err.detail,
            "violations": [
                ViolationModel.from_violation(v).model_dump() for v in err.violations
            ],
        },
    )


def create_app(
    registry: Optional[Registry] = None,
    env: Optional[dict[str, str]] = None,
    entry_req: str = "cls_task",
    frontend_dir: Optional[str] = None,
) -> FastAPI:
    registry = registry or build_demo_registry()
    session = EditorSession(registry, env=env, entry_req=entry_req)
    app = FastAPI(title="argtree editor", version="0.1.0")
    app.state.session = session

    @app.exception_handler(SessionError)
    async def session_error_handler(request: Request, err: SessionError):
        return _error_response(err)

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, err: RequestValidationError):
        # Malformed requests are the client's problem, not a value error.
        return JSONResponse(status_code=400, content={"detail": str(err), "violations": []})

    # -- registry and tree reads ----------------------------------------------

    @app.get("/api/v1/registry", response_model=RegistryModel)
    def api_registry() -> RegistryModel:
        return RegistryModel.from_registry(registry)

    @app.get("/api/v1/tree", response_model=SessionStateModel)
    def api_tree() -> SessionStateModel:
        with session.lock:
            return _session_state(session)

    @app.post("/api/v1/validate", response_model=SessionStateModel)
    def api_validate() -> SessionStateModel:
        session.revalidate()
        with session.lock:
            return _session_state(session)

    @app.get("/api/v1/search", response_model=SearchResponse)
    def api_search(q: str = "") -> SearchResponse:
        matches = session.search(q)
        return SearchResponse(
            query=q,
            matches=[
                SearchMatchModel(
                    node_path=[list(step) for step in m.node_path],
                    field=m.field,
                    matched_text=m.matched_text,
                )
                for m in matches
            ],
        )

    @app.get("/api/v1/dot")
    def api_dot() -> PlainTextResponse:
        with session.lock:
            if session.root is None:
                return PlainTextResponse("digraph argtree {\n}\n", media_type="text/vnd.graphviz")
            return PlainTextResponse(
                to_dot(session.root, include_violations=True), media_type="text/vnd.graphviz"
            )

    # -- mutations -------------------------------------------------------------

    @app.post("/api/v1/tree/children", response_model=SessionStateModel, status_code=200)
    def api_add_child(body: AddChildRequest) -> SessionStateModel:
        session.add_child(
            tuple(tuple(s) for s in body.path), body.req_key, body.class_name, body.revision
        )
        with session.lock:
            return _session_state(session)

    @app.delete("/api/v1/tree/children", response_model=SessionStateModel)
    def api_remove_child(body: RemoveChildRequest) -> SessionStateModel:
        session.remove_child(tuple(tuple(s) for s in body.path), body.revision)
        with session.lock:
            return _session_state(session)

    @app.patch("/api/v1/tree/args", response_model=SessionStateModel)
    def api_set_arg(body: SetArgRequest) -> SessionStateModel:
        session.set_arg(
            tuple(tuple(s) for s in body.path), body.arg_name, body.value, body.revision
        )
        with session.lock:
            return _session_state(session)

    @app.post("/api/v1/reset", response_model=SessionStateModel)
    def api_reset(body: ResetRequest) -> SessionStateModel:
        session.reset(body.revision)
        with session.lock:
            return _session_state(session)

    # -- persistence -----------------------------------------------------------

    @app.post("/api/v1/save", response_model=ConfigResponse)
    def api_save(body: SaveRequest) -> ConfigResponse:
        scope = tuple(tuple(s) for s in body.scope_path) if body.scope_path else None
        doc = session.save(scope)
        return ConfigResponse(config=doc.entries)

    @app.post("/api/v1/load", response_model=SessionStateModel)
    def api_load(body: LoadRequest) -> SessionStateModel:
        graft = tuple(tuple(s) for s in body.graft_path) if body.graft_path else None
        session.load(body.config, graft, body.revision)
        with session.lock:
            return _session_state(session)

    @app.post("/api/v1/generate", response_model=ConfigResponse)
    def api_generate() -> ConfigResponse:
        doc = session.save(None)
        return ConfigResponse(config=doc.entries)

    # -- execution ---------------------------------------------------------------

    @app.post("/api/v1/run")
    def api_run() -> StreamingResponse:
        with session.lock:
            if session.last_violations:
                raise SessionError(
                    409, "tree has violations; fix them before running", session.last_violations
                )
            # snapshot: later mutations must not race the running worker
            root = copy.deepcopy(session.root)

        events: "queue.Queue[Optional[dict]]" = queue.Queue()

        def worker() -> None:
            try:
                report, _ = run_tree(registry, root, line_callback=lambda line: events.put(
                    {"event": "log", "line": line}
                ))
                events.put(
                    {
                        "event": "report",
                        "epochs_run": report.epochs_run,
                        "final_loss": report.final_loss,
                        "checkpoint_path": report.checkpoint_path,
                        "structure_overview": report.structure_overview,
                    }
                )
            except ArgTreeError as err:
                events.put({"event": "error", "detail": str(err)})
            finally:
                events.put(None)

        threading.Thread(target=worker, daemon=True).start()

        def stream():
            while True:
                event = events.get()
                if event is None:
                    break
                yield json.dumps(event) + "\n"

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    # -- static frontend ---------------------------------------------------------

    dist = Path(
        frontend_dir
        or os.environ.get("ARGTREE_FRONTEND_DIR")
        or Path.cwd() / "frontend" / "dist"
    )
    if dist.is_dir():
        app.mount("/", StaticFiles(directory=str(dist), html=True), name="frontend")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return _PLACEHOLDER_PAGE

    return app
