"""HTTP service wrapping a multilingual sentence-embedding model.

Endpoints:
  POST /embed    {"texts": [...], "normalize": true} -> {model_id, dim, vectors}
  GET  /healthz  200 {"status": "ok"} once the model is loaded, 503 before
  GET  /info     {model_id, dim, max_tokens}

Configuration via environment: MODEL_ID (checkpoint name, or
``debug-hash-<dim>`` for the deterministic test backend) and PORT.
"""

from __future__ import annotations

import os
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backends import DEFAULT_MODEL_ID, ModelBackend, load_backend

MAX_BATCH = 64
MAX_TEXT_BYTES = 8192


class EmbedRequest(BaseModel):
    texts: list[str]
    normalize: bool = True


def create_app(model_id: str | None = None) -> FastAPI:
    resolved = model_id or os.environ.get("MODEL_ID", DEFAULT_MODEL_ID)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.backend = load_backend(resolved)
        yield
        app.state.backend = None

    app = FastAPI(title="embed-sidecar", lifespan=lifespan)
    app.state.backend = None

    @app.exception_handler(RequestValidationError)
    async def malformed_request(_, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed request"})

    def ready_backend() -> ModelBackend:
        backend = app.state.backend
        if backend is None:
            raise HTTPException(status_code=503, detail="model not ready")
        return backend

    @app.get("/healthz")
    async def healthz():
        if app.state.backend is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok"}

    @app.get("/info")
    async def info():
        backend = ready_backend()
        return {
            "model_id": backend.model_id,
            "dim": backend.dim,
            "max_tokens": backend.max_tokens,
        }

    @app.post("/embed")
    async def embed(request: EmbedRequest):
        backend = ready_backend()
        if not 1 <= len(request.texts) <= MAX_BATCH:
            raise HTTPException(
                status_code=400,
                detail=f"batch size must be 1..{MAX_BATCH}, got {len(request.texts)}",
            )
        for i, text in enumerate(request.texts):
            if len(text.encode("utf-8")) > MAX_TEXT_BYTES:
                raise HTTPException(
                    status_code=400,
                    detail=f"text {i} exceeds {MAX_TEXT_BYTES} UTF-8 bytes",
                )
        vectors = backend.encode(request.texts, request.normalize)
        return {"model_id": backend.model_id, "dim": backend.dim, "vectors": vectors}

    return app


def main() -> None:
    import uvicorn

    port = int(os.environ.get("PORT", "8601"))
    uvicorn.run(create_app(), host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
