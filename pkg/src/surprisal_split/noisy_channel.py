"""Candidate generation and the Bayesian posterior over heuristic words.

For an observed target word x, candidate corrections w are the masked-LM
top-k fills. The posterior combines the masked prior with an exponential
edit-distance noise likelihood:

    p(w | x)  propto  exp(prior_logprob(w) - lam * d(x, w))

evaluated as a max-subtracted softmax in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import ConfigError, DataError
from .lexdist import EditDistance, levenshtein
from .scorer import Scorer
from .textnorm import normalize_word

DISTANCE_MODES = ("raw", "normalized")


@dataclass(frozen=True)
class NoiseParams:
    """Noise-model settings.

    ``lam`` is the edit-distance penalty rate (0 disables correction
    pressure entirely; very large values recover plain surprisal).
    ``distance_mode`` selects which Levenshtein value the exponent uses;
    normalized is the default because raw character counts make the
    penalty scale per-word-length.
    """

    lam: float
    distance_mode: str = "normalized"
    top_k: int = 100
    force_include_veridical: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        if self.distance_mode not in DISTANCE_MODES:
            raise ConfigError(
                f"distance_mode must be one of {DISTANCE_MODES}, got {self.distance_mode!r}"
            )


@dataclass(frozen=True)
class Candidate:
    """A heuristic-word hypothesis for one target position.

    ``word`` is the normalized form used for scoring and deduplication;
    ``surface`` keeps the scorer's raw form for reporting.
    """

    word: str
    prior_logprob: float
    distance: EditDistance
    surface: str = ""
    posterior_prob: float | None = None


@dataclass(frozen=True)
class Posterior:
    """Normalized correction posterior, ranked best-first.

    ``veridical_rank`` is 1-based; None when the veridical word is not in
    the candidate set. Ties in posterior probability are broken by
    lexicographic word order so reports are deterministic.
    """

    candidates: tuple[Candidate, ...]
    veridical_word: str
    veridical_rank: int | None

    @property
    def veridical_prob(self) -> float:
        if self.veridical_rank is None:
            return 0.0
        return self.candidates[self.veridical_rank - 1].posterior_prob

    @property
    def entropy(self) -> float:
        return -sum(
            c.posterior_prob * math.log(c.posterior_prob)
            for c in self.candidates
            if c.posterior_prob > 0.0
        )


def generate_candidates(
    sentence: Sequence[str],
    target_index: int,
    scorer: Scorer,
    params: NoiseParams,
) -> list[Candidate]:
    """Top-k masked fills paired with priors and distances to the target.

    Fills are normalized and deduplicated (keeping the best prior); when
    ``force_include_veridical`` is set and the veridical word is missing,
    it is appended with its separately queried masked-fill logprob and
    distance 0.
    """
    if not 0 <= target_index < len(sentence):
        raise DataError(
            f"target_index {target_index} out of range for {len(sentence)} tokens"
        )
    veridical = normalize_word(sentence[target_index])
    best: dict[str, tuple[float, str]] = {}
    for sw in scorer.masked_topk(sentence, target_index, params.top_k):
        word = normalize_word(sw.word)
        if not word:
            continue
        if word not in best or sw.logprob > best[word][0]:
            best[word] = (sw.logprob, sw.word)
    candidates = [
        Candidate(word, logprob, levenshtein(word, veridical), surface)
        for word, (logprob, surface) in best.items()
    ]
    if params.force_include_veridical and veridical not in best:
        logprob = scorer.masked_logprob(sentence, target_index, veridical)
        candidates.append(
            Candidate(veridical, logprob, EditDistance(0, 0.0), veridical)
        )
    return candidates


def posterior(
    candidates: Sequence[Candidate],
    params: NoiseParams,
    veridical_word: str | None = None,
) -> Posterior:
    """Softmax posterior over candidates under the edit-distance penalty.

    When ``veridical_word`` is omitted it is inferred from the (unique)
    zero-distance candidate, if any.
    """
    if not candidates:
        raise DataError("posterior over an empty candidate set")
    if veridical_word is None:
        veridical_word = next(
            (c.word for c in candidates if c.distance.raw == 0), ""
        )
    if params.distance_mode == "raw":
        dist = [c.distance.raw for c in candidates]
    else:
        dist = [c.distance.normalized for c in candidates]
    scores = [c.prior_logprob - params.lam * d for c, d in zip(candidates, dist)]
    peak = max(scores)
    weights = [math.exp(s - peak) for s in scores]
    total = sum(weights)
    ranked = sorted(
        zip(candidates, scores, weights),
        key=lambda t: (-t[1], t[0].word),
    )
    out = tuple(replace(c, posterior_prob=w / total) for c, _, w in ranked)
    rank = next(
        (i + 1 for i, c in enumerate(out) if c.word == veridical_word), None
    )
    return Posterior(out, veridical_word, rank)
