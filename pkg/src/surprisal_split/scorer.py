"""Language-model scoring boundary.

One contract, two implementations: an add-alpha n-gram model for offline
desk-scale runs and tests, and a client for the remote transformer service
(see the service package's /v1 JSON routes).
"""

from __future__ import annotations

import hashlib
import math
import os
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import requests

from .errors import ConfigError, EmptyCorpusError, ScorerUnavailableError

LOGPROB_FLOOR = math.log(1e-12)
UNK = "<unk>"

ENDPOINT_ENV_VAR = "SURPRISAL_SPLIT_LM_URL"


@dataclass(frozen=True)
class ScoredWord:
    word: str
    logprob: float  # natural log, floored to keep it finite


@dataclass(frozen=True)
class ScorerDescriptor:
    """Reproducibility key recorded in all reports."""

    kind: str  # "ngram" or "remote"
    identity: str  # model name(s) or corpus fingerprint
    vocabulary_size: int


class Scorer(Protocol):
    """Scoring contract consumed by the noisy-channel pipeline.

    ``masked_topk`` ranks fills for a masked slot; ``masked_logprob``
    returns the masked-fill logprob of one specific word (needed to force
    the veridical word into the candidate set); ``conditional_logprob``
    is the left-to-right conditional used for surprisal.
    """

    @property
    def descriptor(self) -> ScorerDescriptor: ...

    def masked_topk(
        self, tokens: Sequence[str], mask_index: int, k: int
    ) -> list[ScoredWord]: ...

    def masked_logprob(
        self, tokens: Sequence[str], mask_index: int, word: str
    ) -> float: ...

    def conditional_logprob(self, context: Sequence[str], target: str) -> float: ...


def _check_mask_args(tokens: Sequence[str], mask_index: int, k: int | None = None) -> None:
    if not 0 <= mask_index < len(tokens):
        raise ValueError(f"mask_index {mask_index} out of range for {len(tokens)} tokens")
    if k is not None and k < 1:
        raise ValueError(f"k must be >= 1, got {k}")


class NgramScorer:
    """Add-alpha n-gram model with backoff to shorter contexts.

    Masked ranking uses the left context only: an n-gram model has no
    bidirectional prior, so this is a documented approximation for the
    offline harness; the remote scorer provides the faithful masked prior.
    Immutable after training, safe for concurrent use.
    """

    def __init__(
        self,
        order: int,
        alpha: float,
        counts: dict[int, Counter],
        context_totals: dict[int, Counter],
        total_tokens: int,
        vocab: frozenset[str],
        identity: str,
        logprob_floor: float = LOGPROB_FLOOR,
    ):
        self.order = order
        self.alpha = alpha
        self._counts = counts
        self._context_totals = context_totals
        self._total_tokens = total_tokens
        self._words = tuple(sorted(vocab))  # without UNK, for ranking
        self._vocab_size = len(vocab) + 1  # corpus types plus UNK
        self._floor = logprob_floor
        self.descriptor = ScorerDescriptor("ngram", identity, self._vocab_size)

    def conditional_logprob(self, context: Sequence[str], target: str) -> float:
        target = target.casefold()
        ctx = tuple(w.casefold() for w in context)
        k = min(self.order - 1, len(ctx))
        # Back off until the context has attested continuations.
        while k > 0 and self._context_totals[k + 1][ctx[len(ctx) - k:]] == 0:
            k -= 1
        if k == 0:
            count = self._counts[1][(target,)]
            total = self._total_tokens
        else:
            suffix = ctx[len(ctx) - k:]
            count = self._counts[k + 1][suffix + (target,)]
            total = self._context_totals[k + 1][suffix]
        p = (count + self.alpha) / (total + self.alpha * self._vocab_size)
        return max(math.log(p), self._floor)

    def masked_topk(self, tokens: Sequence[str], mask_index: int, k: int) -> list[ScoredWord]:
        _check_mask_args(tokens, mask_index, k)
        context = tokens[:mask_index]
        scored = [
            ScoredWord(w, self.conditional_logprob(context, w)) for w in self._words
        ]
        scored.sort(key=lambda sw: (-sw.logprob, sw.word))
        return scored[:k]

    def masked_logprob(self, tokens: Sequence[str], mask_index: int, word: str) -> float:
        _check_mask_args(tokens, mask_index)
        return self.conditional_logprob(tokens[:mask_index], word)


def train_ngram(corpus: Iterable[str], order: int, smoothing_alpha: float) -> NgramScorer:
    """Train an add-alpha n-gram scorer on whitespace-tokenized sentences.

    ``corpus`` is one sentence per element; sentences are case-folded.
    Vocabulary is the corpus types plus an unknown-word type.
    """
    if order < 1:
        raise ConfigError(f"n-gram order must be >= 1, got {order}")
    if smoothing_alpha <= 0:
        raise ConfigError(f"smoothing alpha must be > 0, got {smoothing_alpha}")
    counts: dict[int, Counter] = {n: Counter() for n in range(1, order + 1)}
    context_totals: dict[int, Counter] = {n: Counter() for n in range(2, order + 1)}
    vocab: set[str] = set()
    total_tokens = 0
    digest = hashlib.sha256()
    for sentence in corpus:
        words = [w.casefold() for w in sentence.split()]
        digest.update((" ".join(words) + "\n").encode("utf-8"))
        vocab.update(words)
        total_tokens += len(words)
        for n in range(1, order + 1):
            for i in range(len(words) - n + 1):
                gram = tuple(words[i : i + n])
                counts[n][gram] += 1
                if n >= 2:
                    context_totals[n][gram[:-1]] += 1
    if total_tokens == 0:
        raise EmptyCorpusError("corpus contains no tokens")
    identity = f"ngram-{order}-a{smoothing_alpha:g}-{digest.hexdigest()[:12]}"
    return NgramScorer(
        order, smoothing_alpha, counts, context_totals, total_tokens,
        frozenset(vocab), identity,
    )


class RemoteScorer:
    """Client for the LM service's JSON protocol.

    Keeps at most ``max_in_flight`` requests outstanding; otherwise
    stateless, so concurrent pipeline workers can share one instance.
    Transport and protocol failures surface as ScorerUnavailableError.
    """

    def __init__(
        self,
        base_url: str | None = None,
        max_in_flight: int = 4,
        timeout: float = 120.0,
        session: requests.Session | None = None,
        logprob_floor: float = LOGPROB_FLOOR,
    ):
        base_url = base_url or os.environ.get(ENDPOINT_ENV_VAR)
        if not base_url:
            raise ConfigError(
                f"no service endpoint: pass base_url or set {ENDPOINT_ENV_VAR}"
            )
        self._base = base_url.rstrip("/")
        self._sem = threading.BoundedSemaphore(max_in_flight)
        self._session = session or requests.Session()
        self._timeout = timeout
        self._floor = logprob_floor
        self._descriptor: ScorerDescriptor | None = None
        self._descriptor_lock = threading.Lock()

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        url = self._base + path
        try:
            with self._sem:
                if method == "GET":
                    resp = self._session.get(url, timeout=self._timeout)
                else:
                    resp = self._session.post(url, json=payload, timeout=self._timeout)
        except requests.RequestException as exc:
            raise ScorerUnavailableError(f"{url}: {exc}") from exc
        if resp.status_code != 200:
            raise ScorerUnavailableError(f"{url}: HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise ScorerUnavailableError(f"{url}: non-JSON response") from exc

    @property
    def descriptor(self) -> ScorerDescriptor:
        with self._descriptor_lock:
            if self._descriptor is None:
                health = self._request("GET", "/v1/health")
                try:
                    identity = f"{health['masked_model']}+{health['causal_model']}"
                    vocab_size = int(health.get("masked_vocabulary_size") or 0)
                except KeyError as exc:
                    raise ScorerUnavailableError(f"malformed health payload: {health}") from exc
                self._descriptor = ScorerDescriptor("remote", identity, vocab_size)
            return self._descriptor

    def masked_topk(self, tokens: Sequence[str], mask_index: int, k: int) -> list[ScoredWord]:
        _check_mask_args(tokens, mask_index, k)
        body = self._request(
            "POST", "/v1/masked_topk",
            {"tokens": list(tokens), "mask_index": mask_index, "k": k},
        )
        try:
            return [
                ScoredWord(c["word"], max(float(c["logprob"]), self._floor))
                for c in body["candidates"]
            ]
        except (KeyError, TypeError) as exc:
            raise ScorerUnavailableError(f"malformed masked_topk payload: {body}") from exc

    def masked_logprob(self, tokens: Sequence[str], mask_index: int, word: str) -> float:
        _check_mask_args(tokens, mask_index)
        body = self._request(
            "POST", "/v1/masked_topk",
            {
                "tokens": list(tokens),
                "mask_index": mask_index,
                "k": 1,
                "include_words": [word],
            },
        )
        try:
            return max(float(body["included"][0]["logprob"]), self._floor)
        except (KeyError, TypeError, IndexError) as exc:
            raise ScorerUnavailableError(f"malformed included payload: {body}") from exc

    def conditional_logprob(self, context: Sequence[str], target: str) -> float:
        body = self._request(
            "POST", "/v1/conditional", {"context": list(context), "target": target}
        )
        try:
            return max(float(body["logprob"]), self._floor)
        except (KeyError, TypeError) as exc:
            raise ScorerUnavailableError(f"malformed conditional payload: {body}") from exc
