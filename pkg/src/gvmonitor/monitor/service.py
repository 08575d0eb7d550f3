"""HTTP service over the monitor pipeline.

Endpoints: GET /tabs/{name}, POST /interactions, GET /status,
PUT /config/keywords, GET /health. UTF-8 JSON bodies throughout.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..errors import ConflictError, GvmonitorError, NotFoundError, QueryParseError
from .pipeline import MonitorPipeline

MAX_PAGE_SIZE = 200


class InteractionRequest(BaseModel):
    post_id: str
    operator: str


class KeywordUpdateRequest(BaseModel):
    query: str


def create_app(pipeline: MonitorPipeline) -> FastAPI:
    app = FastAPI(title="gvmonitor", docs_url=None, redoc_url=None)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/status")
    def status():
        s = pipeline.status()
        return {
            "last_success_at": s.last_success_at.isoformat() if s.last_success_at else None,
            "last_batch_size": s.last_batch_size,
            "consecutive_failures": s.consecutive_failures,
            "poll_interval": pipeline.cfg.poll_interval,
        }

    @app.get("/tabs/{name}")
    def get_tab(
        name: str,
        cursor: str | None = None,
        limit: int = Query(default=50, ge=1, le=MAX_PAGE_SIZE),
    ):
        try:
            rows, next_cursor = pipeline.store.get_tab(name, cursor=cursor, limit=limit)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except GvmonitorError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        counts = pipeline.store.tab_counts()
        return {
            "tab": name,
            "rows": [
                {
                    "post_id": r.post_id,
                    "text": r.raw_text,
                    "created_at": r.created_at,
                    "author_location_text": r.author_location_text,
                    "author_bio": r.author_bio,
                    "author_handle": r.author_handle,
                    "score": r.score,
                    "matched_region": r.matched_region,
                    "url": r.url,
                    "interacted": r.interacted,
                }
                for r in rows
            ],
            "next_cursor": next_cursor,
            "total": counts.get(name, 0),
        }

    @app.post("/interactions", status_code=201)
    def post_interaction(body: InteractionRequest):
        try:
            record, rendered = pipeline.record_interaction(body.post_id, body.operator)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except GvmonitorError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "post_id": record.post_id,
            "region": record.region,
            "sent_at": record.sent_at.isoformat(),
            "template_id": record.template_id,
            "operator": record.operator,
            "rendered_text": rendered,
        }

    @app.put("/config/keywords")
    def put_keywords(body: KeywordUpdateRequest):
        try:
            new_cfg = pipeline.update_keywords(body.query)
        except QueryParseError as exc:
            return JSONResponse(
                status_code=400,
                content={"error": str(exc), "position": exc.position},
            )
        return {"query": new_cfg.keyword_query}

    return app
