import math

import pytest

from surprisal_split.scorer import LOGPROB_FLOOR, ScoredWord, ScorerDescriptor


class TableScorer:
    """Scorer with fixed masked and conditional word distributions.

    Context-independent by design: tests construct items whose conditions
    share the same left context, so a single table per role suffices.
    """

    def __init__(self, masked, conditional, default_prob=1e-9, identity="table"):
        self.masked = dict(masked)
        self.conditional = dict(conditional)
        self.default_prob = default_prob
        self.descriptor = ScorerDescriptor("ngram", identity, len(self.masked))
        self.calls = []

    def masked_topk(self, tokens, mask_index, k):
        self.calls.append(("masked_topk", tuple(tokens), mask_index, k))
        ranked = sorted(self.masked.items(), key=lambda kv: (-kv[1], kv[0]))
        return [ScoredWord(w, max(math.log(p), LOGPROB_FLOOR)) for w, p in ranked[:k]]

    def masked_logprob(self, tokens, mask_index, word):
        self.calls.append(("masked_logprob", tuple(tokens), mask_index, word))
        return max(math.log(self.masked.get(word, self.default_prob)), LOGPROB_FLOOR)

    def conditional_logprob(self, context, target):
        p = self.conditional.get(target, self.default_prob)
        return max(math.log(p), LOGPROB_FLOOR)


@pytest.fixture
def table_scorer():
    return TableScorer(
        masked={"anecdote": 0.7, "antidote": 0.2, "hearse": 0.1},
        conditional={"anecdote": 0.5, "antidote": 0.01, "hearse": 0.001},
    )


def write_stimuli(path, rows, with_cloze=False):
    header = "item_id,condition,sentence,target_index"
    if with_cloze:
        header += ",human_cloze"
    lines = [header]
    for row in rows:
        sentence = '"' + row[2] + '"' if "," in row[2] else row[2]
        lines.append(",".join([str(row[0]), row[1], sentence, str(row[3])]
                             + ([str(row[4])] if with_cloze else [])))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
