"""Split one word's surprisal into heuristic surprise and discrepancy signal.

For a target word x_t with veridical context x_<t:

    S = -ln p(x_t | x_<t)
    A = sum_w  q(w) * -ln p(w | x_<t)      (q = correction posterior)
    B = S - A

The context is taken veridically: only the target word is corrected, so
the expectation in B collapses and B = S - A holds as an algebraic
identity (tests also evaluate the expectation directly).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import SurprisalSplitError
from .noisy_channel import Candidate, NoiseParams, Posterior, generate_candidates, posterior
from .scorer import Scorer
from .textnorm import normalize_word


@dataclass(frozen=True)
class Decomposition:
    """Per-stimulus record of S, A, B plus posterior diagnostics (nats)."""

    item_id: str
    condition: str
    surprisal_S: float
    heuristic_A: float
    discrepancy_B: float
    posterior_entropy: float
    veridical_posterior: float
    veridical_rank: int | None


@dataclass(frozen=True)
class StimulusProfile:
    """Lambda-independent scoring work for one stimulus.

    Candidate priors, distances, and autoregressive surprisals do not
    depend on the noise penalty, so a lambda sweep computes this once.
    """

    veridical_word: str
    surprisal_S: float
    candidates: tuple[Candidate, ...]
    candidate_surprisals: dict[str, float]  # word -> -ln p(word | x_<t)


def build_profile(
    sentence: Sequence[str],
    target_index: int,
    scorer: Scorer,
    params: NoiseParams,
) -> StimulusProfile:
    context = list(sentence[:target_index])
    target = normalize_word(sentence[target_index])
    surprisal = -scorer.conditional_logprob(context, target)
    candidates = tuple(generate_candidates(sentence, target_index, scorer, params))
    cand_surprisals = {
        c.word: -scorer.conditional_logprob(context, c.word) for c in candidates
    }
    return StimulusProfile(target, surprisal, candidates, cand_surprisals)


def decompose_profile(
    profile: StimulusProfile,
    params: NoiseParams,
    item_id: str = "",
    condition: str = "",
) -> Decomposition:
    post = posterior(profile.candidates, params, profile.veridical_word)
    heuristic = sum(
        c.posterior_prob * profile.candidate_surprisals[c.word]
        for c in post.candidates
    )
    return Decomposition(
        item_id=item_id,
        condition=condition,
        surprisal_S=profile.surprisal_S,
        heuristic_A=heuristic,
        discrepancy_B=profile.surprisal_S - heuristic,
        posterior_entropy=post.entropy,
        veridical_posterior=post.veridical_prob,
        veridical_rank=post.veridical_rank,
    )


def decompose(
    sentence: Sequence[str],
    target_index: int,
    scorer: Scorer,
    params: NoiseParams,
    item_id: str = "",
    condition: str = "",
) -> Decomposition:
    """Compute S, A, B for one stimulus; scorer errors carry the item id."""
    try:
        profile = build_profile(sentence, target_index, scorer, params)
        return decompose_profile(profile, params, item_id, condition)
    except SurprisalSplitError as exc:
        if item_id and not str(exc).startswith(f"item {item_id}"):
            raise type(exc)(f"item {item_id}: {exc}") from exc
        raise


def discrepancy_bracket(profile: StimulusProfile, post: Posterior) -> float:
    """The discrepancy expectation evaluated directly, not as S - A.

    sum_w q(w) * [ln p(w | x_<t) - ln p(x_t | x_<t)]; used by tests to
    confirm the residual form equals the expectation form.
    """
    return sum(
        c.posterior_prob
        * (profile.surprisal_S - profile.candidate_surprisals[c.word])
        for c in post.candidates
    )
