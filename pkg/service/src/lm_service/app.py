"""FastAPI application exposing the three /v1 scoring routes."""

from __future__ import annotations

import os
import threading

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .backends import CausalBackend, MaskedBackend
from .schemas import (
    ConditionalRequest,
    ConditionalResponse,
    HealthResponse,
    MaskedTopkRequest,
    MaskedTopkResponse,
    WordScore,
)

DEFAULT_MASKED_MODEL = "roberta-base"
DEFAULT_CAUSAL_MODEL = "gpt2"

MASKED_MODEL_ENV = "LM_SERVICE_MASKED_MODEL"
CAUSAL_MODEL_ENV = "LM_SERVICE_CAUSAL_MODEL"


class ModelRegistry:
    """Holds both backends; inference is serialized behind one lock."""

    def __init__(self, masked_model: str, causal_model: str):
        self.masked_model = masked_model
        self.causal_model = causal_model
        self.masked: MaskedBackend | None = None
        self.causal: CausalBackend | None = None
        self.status = "loading"
        self.lock = threading.Lock()

    def load(self):
        masked = MaskedBackend(self.masked_model)
        causal = CausalBackend(self.causal_model)
        self.masked, self.causal = masked, causal
        self.status = "ok"

    def load_in_background(self):
        threading.Thread(target=self.load, daemon=True).start()

    def require_loaded(self):
        if self.status != "ok":
            raise HTTPException(status_code=503, detail="models not loaded yet")


def create_app(masked_model: str | None = None, causal_model: str | None = None,
               load: str = "eager") -> FastAPI:
    """Build the service; ``load`` is "eager", "background", or "defer"."""
    registry = ModelRegistry(
        masked_model or os.environ.get(MASKED_MODEL_ENV, DEFAULT_MASKED_MODEL),
        causal_model or os.environ.get(CAUSAL_MODEL_ENV, DEFAULT_CAUSAL_MODEL),
    )
    app = FastAPI(title="lm-service", version="0.1.0")
    app.state.registry = registry

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/v1/health", response_model=HealthResponse,
             response_model_exclude_none=True)
    def health():
        return HealthResponse(
            status=registry.status,
            masked_model=registry.masked_model,
            causal_model=registry.causal_model,
            masked_vocabulary_size=(
                registry.masked.vocabulary_size if registry.masked else None
            ),
        )

    @app.post("/v1/masked_topk", response_model=MaskedTopkResponse)
    def masked_topk(req: MaskedTopkRequest):
        registry.require_loaded()
        if not 0 <= req.mask_index < len(req.tokens):
            raise HTTPException(
                status_code=400,
                detail=f"mask_index {req.mask_index} out of range for "
                       f"{len(req.tokens)} tokens",
            )
        with registry.lock:
            candidates, included = registry.masked.topk(
                req.tokens, req.mask_index, req.k, req.include_words
            )
        return MaskedTopkResponse(
            candidates=[WordScore(word=w, logprob=lp) for w, lp in candidates],
            included=[WordScore(word=w, logprob=lp) for w, lp in included],
            model_identity=registry.masked.identity,
        )

    @app.post("/v1/conditional", response_model=ConditionalResponse)
    def conditional(req: ConditionalRequest):
        registry.require_loaded()
        with registry.lock:
            try:
                logprob, n_pieces = registry.causal.conditional_logprob(
                    req.context, req.target
                )
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        return ConditionalResponse(
            logprob=logprob, n_pieces=n_pieces,
            model_identity=registry.causal.identity,
        )

    if load == "eager":
        registry.load()
    elif load == "background":
        registry.load_in_background()
    return app
