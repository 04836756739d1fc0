"""HTTP session API exposing workspace operations.

Sessions are in-memory, one workspace each, serialized through a per-session
lock (one logical writer). Every endpoint is a thin façade over the library:
the response body is reproducible from the same workspace state.

Error envelope: ``{"code": ..., "message": ..., "location": ...?}``.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .export import serialize_shapes_graph, to_shacl, to_shex
from .infer import InferenceConfig, InferenceError
from .model import SchemaError
from .pattern import PatternError
from .scl_text import print_scl
from .stats import all_predicate_stats, cooccurrence, predicate_stats
from .targets import TargetSpec
from .turtle import RdfSyntaxError, load_graph, parse_graph
from .validate import ValidationReport
from .workspace import EditError, EditOp, GraphSource, Workspace, add_shape

from . import model


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, location: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.location = location


class Session:
    def __init__(self, workspace: Workspace):
        self.id = uuid.uuid4().hex
        self.workspace = workspace
        self.lock = threading.Lock()


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def add(self, workspace: Workspace) -> Session:
        session = Session(workspace)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise ServiceError(404, "session-not-found", f"no session {session_id!r}")
        return session


def _schema_ast(workspace: Workspace) -> dict:
    from .scl_text import object_text, value_constraint_text

    prefixes = workspace.schema.prefixes

    def tc_dict(tc) -> dict:
        return {
            "predicate": tc.predicate,
            "object": object_text(tc.object, prefixes),
            "cardinality": str(tc.card),
        }

    def conjunct_dict(conjunct) -> dict:
        if isinstance(conjunct, model.Choice):
            return {"choice": [tc_dict(b) for b in conjunct.branches]}
        return tc_dict(conjunct)

    shapes = {}
    for label, constraint in workspace.schema.defs.items():
        shapes[label] = {
            "values": [value_constraint_text(v, prefixes) for v in constraint.values],
            "conjuncts": [conjunct_dict(c) for c in constraint.neighbourhood.conjuncts],
        }
    return {"prefixes": dict(prefixes), "shapes": shapes}


def create_app(graph_path: str | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="shapekit service")
    store = SessionStore()
    app.state.sessions = store
    app.state.default_graph_path = graph_path

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, err: ServiceError):
        body = {"code": err.code, "message": err.message}
        if err.location:
            body["location"] = err.location
        return JSONResponse(status_code=err.status, content=body)

    def _load_workspace_graph(payload: dict) -> tuple:
        if payload.get("graph_content") is not None:
            fmt = payload.get("graph_format", "turtle")
            try:
                return parse_graph(payload["graph_content"], fmt), None
            except RdfSyntaxError as err:
                raise ServiceError(
                    400, "graph-parse-error", str(err), f"{err.line}:{err.column}"
                ) from None
        document_path = ((payload.get("document") or {}).get("graph") or {}).get("path")
        path = payload.get("graph_path") or document_path or app.state.default_graph_path
        if not path:
            raise ServiceError(400, "missing-graph", "provide graph_path or graph_content")
        if not Path(path).exists():
            raise ServiceError(400, "missing-graph", f"graph file {path!r} does not exist")
        try:
            return load_graph(path), GraphSource.of(path)
        except RdfSyntaxError as err:
            raise ServiceError(
                400, "graph-parse-error", str(err), f"{err.line}:{err.column}"
            ) from None

    def _config_from(payload: dict) -> InferenceConfig | None:
        raw = payload.get("config")
        if not raw:
            return None
        try:
            return InferenceConfig(
                error_rate=raw.get("error_rate", 0),
                neighbour_error_rate=raw.get("neighbour_error_rate"),
                shrink_warning_threshold=int(raw.get("shrink_warning_threshold", 5)),
            )
        except (InferenceError, ValueError) as err:
            raise ServiceError(400, "bad-config", str(err)) from None

    @app.post("/sessions")
    def create_session(payload: dict = Body(default_factory=dict)) -> dict:
        graph, source = _load_workspace_graph(payload)
        document = payload.get("document")
        if document is not None:
            try:
                workspace = Workspace.load(document, graph, source)
            except (ValueError, KeyError) as err:
                raise ServiceError(400, "bad-document", str(err)) from None
        else:
            workspace = Workspace(
                graph,
                source=source,
                namespaces=payload.get("namespaces", ()),
                datatype_order=[tuple(edge) for edge in payload.get("datatype_order", ())],
            )
            if payload.get("config"):
                workspace.config = _config_from(payload) or workspace.config
        session = store.add(workspace)
        return {
            "session_id": session.id,
            "triples": len(graph),
            "warnings": workspace.load_warnings,
        }

    @app.get("/sessions/{session_id}/schema")
    def get_schema(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            w = session.workspace
            return {
                "scl": print_scl(w.schema),
                "ast": _schema_ast(w),
                "targets": {label: spec.to_dict() for label, spec in w.targets.items()},
                "edit_count": len(w.edit_log),
            }

    @app.post("/sessions/{session_id}/edits")
    def post_edit(session_id: str, payload: dict = Body(...)) -> dict:
        session = store.get(session_id)
        with session.lock:
            try:
                op = EditOp.from_dict(payload)
                result = session.workspace.apply_edit(op)
            except (EditError, RdfSyntaxError, SchemaError, PatternError) as err:
                raise ServiceError(409, "invalid-edit", str(err)) from None
            return {
                "schema": print_scl(session.workspace.schema),
                "result": result.to_dict(),
            }

    @app.post("/sessions/{session_id}/infer")
    def post_infer(session_id: str, payload: dict = Body(...)) -> dict:
        session = store.get(session_id)
        with session.lock:
            w = session.workspace
            config = _config_from(payload)
            mode = payload.get("mode", "msc")
            try:
                target = TargetSpec.from_dict(payload.get("target", {}))
            except ValueError as err:
                raise ServiceError(400, "bad-target", str(err)) from None
            label = payload.get("label")
            if not label:
                raise ServiceError(400, "missing-label", "infer needs a shape label")
            op = add_shape(label, target, payload.get("pattern"), mode, config)
            try:
                result = w.apply_edit(op)
            except (EditError, PatternError, InferenceError, RdfSyntaxError, SchemaError) as err:
                raise ServiceError(400, "inference-failed", str(err)) from None
            return {
                "schema": print_scl(w.schema),
                "created": result.created_labels,
                "report": result.report.to_dict() if result.report else None,
            }

    @app.get("/sessions/{session_id}/validation")
    def get_validation(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            report: ValidationReport = session.workspace.validation()
            return report.to_dict()

    def _resolve_label(workspace: Workspace, label: str):
        try:
            return workspace.resolve_target(label)
        except EditError as err:
            raise ServiceError(404, "unknown-label", str(err)) from None

    # Declared before the {label:path} route so the suffix keeps precedence;
    # labels are IRIs and may contain slashes.
    @app.get("/sessions/{session_id}/stats/{label:path}/cooccurrence")
    def get_cooccurrence(session_id: str, label: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            w = session.workspace
            nodes = _resolve_label(w, label)
            return {"label": label, **cooccurrence(w.graph, nodes).to_dict()}

    @app.get("/sessions/{session_id}/stats/{label:path}")
    def get_stats(session_id: str, label: str, predicate: str | None = None) -> dict:
        session = store.get(session_id)
        with session.lock:
            w = session.workspace
            nodes = _resolve_label(w, label)
            if predicate:
                rows = [predicate_stats(w.graph, nodes, predicate, w.lattice, w.config)]
            else:
                rows = all_predicate_stats(w.graph, nodes, w.lattice, w.config)
            return {
                "label": label,
                "sample_size": len(nodes),
                "predicates": [r.to_dict() for r in rows],
            }

    @app.get("/sessions/{session_id}/export")
    def get_export(session_id: str, format: str = "shex", choice: str = "xone"):
        session = store.get(session_id)
        with session.lock:
            w = session.workspace
            if format == "shex":
                return PlainTextResponse(to_shex(w.schema, w.targets))
            if format == "shacl":
                if choice not in ("xone", "or"):
                    raise ServiceError(400, "bad-choice", f"unknown choice operator {choice!r}")
                graph = to_shacl(w.schema, w.targets, choice)
                return PlainTextResponse(
                    serialize_shapes_graph(graph), media_type="text/turtle"
                )
            raise ServiceError(400, "bad-format", f"unknown export format {format!r}")

    @app.put("/sessions/{session_id}")
    def save_session(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            return session.workspace.save()

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
