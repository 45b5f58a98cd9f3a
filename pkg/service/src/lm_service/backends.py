"""Model wrappers: masked fills and autoregressive conditionals.

Scoring only, no sampling; inference runs under no_grad on whatever
device transformers picks (CPU by default), serialized by the caller.
"""

from __future__ import annotations

import math

import torch
from transformers import AutoModelForCausalLM, AutoModelForMaskedLM, AutoTokenizer

LOGPROB_FLOOR = math.log(1e-12)

_PIECE_MARKERS = ("Ġ", "▁")  # BPE/sentencepiece word-start markers


def _token_surface(token: str) -> str | None:
    """Word form of a single vocabulary token, or None if not word-like."""
    for marker in _PIECE_MARKERS:
        if token.startswith(marker):
            token = token[len(marker):]
            break
    else:
        if token.startswith("##"):
            token = token[2:]
    return token if token.isalpha() else None


class MaskedBackend:
    """Masked-LM top-k fills restricted to alphabetic single-piece words."""

    def __init__(self, model_name_or_path: str):
        self.identity = str(model_name_or_path)
        self.tokenizer = AutoTokenizer.from_pretrained(model_name_or_path)
        self.model = AutoModelForMaskedLM.from_pretrained(model_name_or_path)
        self.model.eval()
        if self.tokenizer.mask_token_id is None:
            raise ValueError(f"{self.identity} has no mask token")
        # Vocabulary ids that decode to standalone alphabetic words, grouped
        # by surface form (marker variants of one word collapse together).
        words: dict[str, list[int]] = {}
        for token, idx in self.tokenizer.get_vocab().items():
            surface = _token_surface(token)
            if surface:
                words.setdefault(surface, []).append(idx)
        self.words = sorted(words)
        self._word_index = {w: i for i, w in enumerate(self.words)}
        flat_ids, flat_groups = [], []
        for i, w in enumerate(self.words):
            flat_ids.extend(words[w])
            flat_groups.extend([i] * len(words[w]))
        self._pool_ids = torch.tensor(flat_ids, dtype=torch.long)
        self._pool_groups = torch.tensor(flat_groups, dtype=torch.long)
        self.vocabulary_size = len(self.words)

    def _mask_logprobs(self, tokens: list[str], mask_index: int) -> torch.Tensor:
        """Per-word log-probabilities at the masked slot (max over variants)."""
        text = " ".join(
            list(tokens[:mask_index]) + [self.tokenizer.mask_token]
            + list(tokens[mask_index + 1:])
        )
        enc = self.tokenizer(text, return_tensors="pt")
        positions = (enc["input_ids"][0] == self.tokenizer.mask_token_id).nonzero()
        if len(positions) == 0:
            raise ValueError("mask token lost in encoding")
        with torch.no_grad():
            logits = self.model(**enc).logits[0, positions[0, 0]]
        token_logprobs = torch.log_softmax(logits.float(), dim=-1)
        per_word = torch.full((len(self.words),), -float("inf"))
        per_word.scatter_reduce_(
            0, self._pool_groups, token_logprobs[self._pool_ids], reduce="amax"
        )
        return per_word

    def topk(self, tokens: list[str], mask_index: int, k: int,
             include_words: list[str] | None = None):
        per_word = self._mask_logprobs(tokens, mask_index)
        k_eff = min(k, len(self.words))
        values, indices = torch.topk(per_word, k_eff)
        candidates = sorted(
            ((self.words[i], float(v)) for v, i in zip(values, indices)),
            key=lambda wv: (-wv[1], wv[0]),
        )
        included = []
        for word in include_words or []:
            matches = [
                self._word_index[w] for w in (word, word.casefold(), word.capitalize())
                if w in self._word_index
            ]
            logprob = max((float(per_word[i]) for i in matches), default=LOGPROB_FLOOR)
            included.append((word, max(logprob, LOGPROB_FLOOR)))
        return candidates, included


class CausalBackend:
    """Autoregressive conditional log-probability of a word continuation."""

    def __init__(self, model_name_or_path: str):
        self.identity = str(model_name_or_path)
        self.tokenizer = AutoTokenizer.from_pretrained(model_name_or_path)
        self.model = AutoModelForCausalLM.from_pretrained(model_name_or_path)
        self.model.eval()
        self._start_id = self.tokenizer.bos_token_id
        if self._start_id is None:
            self._start_id = self.tokenizer.eos_token_id
        if self._start_id is None:
            raise ValueError(f"{self.identity} has no BOS/EOS token to anchor context")

    def conditional_logprob(self, context: list[str], target: str):
        prefix = [self._start_id]
        if context:
            prefix += self.tokenizer(" ".join(context),
                                     add_special_tokens=False)["input_ids"]
        # Non-initial targets keep their leading space so BPE pieces match
        # how the word appears mid-sentence.
        target_text = (" " + target) if context else target
        target_ids = self.tokenizer(target_text, add_special_tokens=False)["input_ids"]
        if not target_ids:
            raise ValueError(f"target {target!r} produced no pieces")
        ids = torch.tensor([prefix + target_ids], dtype=torch.long)
        with torch.no_grad():
            logits = self.model(ids).logits[0].float()
        logprobs = torch.log_softmax(logits, dim=-1)
        total = 0.0
        for j, piece in enumerate(target_ids):
            total += float(logprobs[len(prefix) - 1 + j, piece])
        return max(total, LOGPROB_FLOOR), len(target_ids)
