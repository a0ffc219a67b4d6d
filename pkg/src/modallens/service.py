"""Read-only query API over a completed analysis store.

Every endpoint serves from an immutable AnalysisBundle snapshot; responses
carry the analysis fingerprint and are byte-identical for equal queries.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import ArgumentError, NotFound, NotReady, RangeError
from .payloads import AnalysisBundle, BrushQuery
from .store import Store


class GroupQueryBody(BaseModel):
    group: str
    start: int | None = None
    end: int | None = None
    importance_ranges: dict[str, tuple[float, float]] = Field(default_factory=dict)
    prediction_range: tuple[float, float] | None = None


def _resolve_scope(bundle: AnalysisBundle, ids: str | None, group: str | None,
                   start: int | None, end: int | None) -> list[str] | None:
    if ids is not None:
        requested = [i for i in ids.split(",") if i]
        known = set(bundle.dataset.ids())
        unknown = [i for i in requested if i not in known]
        if unknown:
            raise NotFound(f"unknown instance ids: {unknown[:5]}")
        return requested
    if group is not None:
        return bundle.query_group(BrushQuery(group=group, start=start, end=end))
    return None


def create_app(store: Store) -> FastAPI:
    app = FastAPI(title="modallens", docs_url=None, redoc_url=None)
    state = {"bundle": None}

    def bundle() -> AnalysisBundle:
        if state["bundle"] is None:
            try:
                state["bundle"] = AnalysisBundle.load(store)
            except NotReady as exc:
                raise HTTPException(
                    status_code=409,
                    detail={"error": str(exc),
                            "completed_stages": store.completed_stages()},
                ) from exc
        return state["bundle"]

    @app.exception_handler(RangeError)
    @app.exception_handler(ArgumentError)
    def _bad_request(_, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(NotFound)
    def _not_found(_, exc):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.get("/summary")
    def get_summary():
        return bundle().summary_payload()

    @app.post("/groups/query")
    def post_group_query(body: GroupQueryBody):
        b = bundle()
        ids = b.query_group(BrushQuery(
            group=body.group, start=body.start, end=body.end,
            importance_ranges=body.importance_ranges,
            prediction_range=body.prediction_range,
        ))
        return {"fingerprint": b.fingerprint, "group": body.group, "ids": ids}

    @app.get("/templates")
    def get_templates(
        ids: str | None = None,
        group: str | None = None,
        start: int | None = None,
        end: int | None = None,
        sort: str = Query("support", pattern="^(support|importance|error)$"),
        min_support: float | None = None,
    ):
        b = bundle()
        scope = _resolve_scope(b, ids, group, start, end)
        return b.templates_payload(scope, sort_key=sort, min_support=min_support)

    @app.get("/projection")
    def get_projection(
        modality: str,
        heat_mode: str = "error",
        ids: str | None = None,
        group: str | None = None,
        start: int | None = None,
        end: int | None = None,
    ):
        b = bundle()
        scope = _resolve_scope(b, ids, group, start, end)
        return b.projection_payload(modality, scope, heat_mode=heat_mode)

    @app.get("/instances/{instance_id}")
    def get_instance(instance_id: str, top_k: int = 3):
        return bundle().instance_payload(instance_id, top_k=top_k)

    @app.get("/metrics")
    def get_metrics():
        return bundle().metrics_payload()

    @app.get("/meta")
    def get_meta():
        return bundle().meta_payload()

    return app


def serve(store: Store, port: int = 8765, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(store), host=host, port=port, log_level="warning")
