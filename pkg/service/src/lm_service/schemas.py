"""Wire types for the /v1 routes. All log-probabilities are natural log."""

from typing import Literal, Optional

from pydantic import BaseModel, Field


class WordScore(BaseModel):
    word: str
    logprob: float


class MaskedTopkRequest(BaseModel):
    tokens: list[str] = Field(min_length=1)
    mask_index: int = Field(ge=0)
    k: int = Field(ge=1)
    # Extra words to score at the masked slot regardless of rank; lets a
    # client fetch the observed word's fill probability in one round trip.
    include_words: Optional[list[str]] = None


class MaskedTopkResponse(BaseModel):
    candidates: list[WordScore]
    included: list[WordScore] = []
    model_identity: str


class ConditionalRequest(BaseModel):
    context: list[str]
    target: str = Field(min_length=1)


class ConditionalResponse(BaseModel):
    logprob: float
    n_pieces: int = Field(ge=1)
    model_identity: str


class HealthResponse(BaseModel):
    status: Literal["ok", "loading"]
    masked_model: str
    causal_model: str
    masked_vocabulary_size: Optional[int] = None
