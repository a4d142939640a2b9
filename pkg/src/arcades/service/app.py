"""HTTP API over a loaded session, plus static hosting for the viewer."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ..analysis import metrics_to_doc, smells_to_doc
from ..grouping import grouping_to_doc
from .schemas import (
    ConfigPatch,
    GroupingResponse,
    ModelSummary,
    ReclusterRequest,
    RevisionResponse,
)
from .session import Session, SessionError

FALLBACK_PAGE = """<!doctype html>
<html><head><title>code city</title></head>
<body style="font-family: sans-serif">
<h1>Code city service</h1>
<p>The viewer bundle is not built. The API is live:</p>
<ul>
<li><a href="/api/model/summary">/api/model/summary</a></li>
<li><a href="/api/scene">/api/scene</a></li>
<li><a href="/api/metrics">/api/metrics</a></li>
<li><a href="/api/smells">/api/smells</a></li>
<li><a href="/api/grouping">/api/grouping</a></li>
</ul>
</body></html>
"""


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc if part != "body")


def create_app(session: Session, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="code city service", docs_url="/api/docs", openapi_url="/api/openapi.json")

    @app.exception_handler(RequestValidationError)
    async def config_error_handler(_request: Request, exc: RequestValidationError):
        detail = [
            {"path": _field_path(err["loc"]), "message": err["msg"]} for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.get("/api/model/summary", response_model=ModelSummary)
    def model_summary():
        model = session.model
        return ModelSummary(
            package_count=len(model.packages),
            class_count=len(model.classes),
            method_count=sum(len(c.methods) for c in model.classes),
            file_count=len({c.file_id for c in model.classes if c.file_id}),
            reference_time=model.reference_time,
            has_repo_stats=model.repo_stats is not None,
            revision=session.snapshot.revision,
        )

    @app.get("/api/metrics")
    def metrics():
        return metrics_to_doc(session.snapshot.analysis.table)

    @app.get("/api/smells")
    def smells():
        return smells_to_doc(session.snapshot.analysis.smells)

    @app.get("/api/grouping", response_model=GroupingResponse)
    def grouping():
        snapshot = session.snapshot
        doc = grouping_to_doc(snapshot.analysis.grouping)
        return GroupingResponse(revision=snapshot.revision, **doc)

    @app.get("/api/scene")
    def scene():
        # Serve the canonical bytes directly so responses are byte-stable.
        return Response(content=session.snapshot.scene_bytes, media_type="application/json")

    @app.post("/api/config", response_model=RevisionResponse)
    def update_config(patch: ConfigPatch):
        try:
            snapshot = session.apply_patch(patch)
        except (SessionError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return RevisionResponse(revision=snapshot.revision)

    @app.post("/api/recluster", response_model=RevisionResponse)
    def recluster(request: ReclusterRequest):
        snapshot = session.recluster(request.algorithm)
        return RevisionResponse(revision=snapshot.revision)

    @app.get("/api/entity/{entity_id}")
    def entity(entity_id: str):
        detail = _entity_detail(session, entity_id)
        if detail is None:
            raise HTTPException(status_code=404, detail=f"unknown entity '{entity_id}'")
        return detail

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="viewer")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return FALLBACK_PAGE

    return app


def _entity_detail(session: Session, entity_id: str) -> dict | None:
    model = session.model
    snapshot = session.snapshot
    table = snapshot.analysis.table
    smell_docs = smells_to_doc(snapshot.analysis.smells)

    for cls in model.classes:
        if cls.id == entity_id:
            metrics = table.classes[cls.id]
            return {
                "kind": "class",
                "id": cls.id,
                "name": cls.name,
                "qualified_name": model.qualified_name(cls),
                "package_id": cls.package_id,
                "file_id": cls.file_id,
                "group_id": table.group_of.get(cls.id),
                "metrics": metrics_to_doc(table)["classes"][cls.id],
                "methods": [m.id for m in cls.methods],
                "smells": [
                    s
                    for s in smell_docs
                    if s["subject"].get("class_id") == cls.id
                    or cls.id in s["subject"].get("pair", ())
                ],
            }
        for method in cls.methods:
            if method.id == entity_id:
                return {
                    "kind": "method",
                    "id": method.id,
                    "name": method.name,
                    "access": method.access.value,
                    "class_id": cls.id,
                    "class_name": model.qualified_name(cls),
                    "metrics": metrics_to_doc(table)["methods"][method.id],
                    "smells": [
                        s for s in smell_docs if s["subject"].get("method_id") == method.id
                    ],
                }

    for pkg in model.packages:
        if pkg.id == entity_id:
            return {
                "kind": "package",
                "id": pkg.id,
                "name": pkg.name,
                "file_ids": list(pkg.file_ids),
            }

    for group in snapshot.analysis.grouping.groups:
        if group.id == entity_id:
            doc = metrics_to_doc(table)["groups"].get(group.id, {})
            return {
                "kind": "group",
                "id": group.id,
                "label": group.label,
                "members": list(group.members),
                "metrics": doc,
                "smells": [
                    s for s in smell_docs if group.id in s["subject"].get("pair", ())
                ],
            }
    return None
