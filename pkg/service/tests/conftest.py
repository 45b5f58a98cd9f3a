import pytest
import torch
from tokenizers import Tokenizer
from tokenizers.models import WordLevel
from tokenizers.pre_tokenizers import WhitespaceSplit
from transformers import (
    GPT2Config,
    GPT2LMHeadModel,
    PreTrainedTokenizerFast,
    RobertaConfig,
    RobertaForMaskedLM,
)

# Word-level vocabulary so every word is a single piece; includes the
# reference sentence's words plus a few fillers.
WORDS = [
    "the", "storyteller", "could", "turn", "any", "incident", "into", "an",
    "amusing", "anecdote", "antidote", "anecdotes", "hearse", "a", "dog",
    "cat", "runs", "garden", "quiet",
]
SPECIALS = ["<s>", "</s>", "<pad>", "<unk>", "<mask>"]


def build_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {w: i for i, w in enumerate(SPECIALS + WORDS)}
    tok = Tokenizer(WordLevel(vocab, unk_token="<unk>"))
    tok.pre_tokenizer = WhitespaceSplit()
    return PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="<unk>", pad_token="<pad>",
        mask_token="<mask>", bos_token="<s>", eos_token="</s>",
    )


@pytest.fixture(scope="session")
def model_dirs(tmp_path_factory):
    """Tiny randomly initialized masked and causal models on disk."""
    torch.manual_seed(20240810)
    root = tmp_path_factory.mktemp("tiny-models")
    masked_dir, causal_dir = root / "masked", root / "causal"
    tokenizer = build_tokenizer()

    tokenizer.save_pretrained(masked_dir)
    masked_cfg = RobertaConfig(
        vocab_size=len(tokenizer), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=64,
        pad_token_id=tokenizer.pad_token_id, bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
    )
    RobertaForMaskedLM(masked_cfg).save_pretrained(masked_dir)

    tokenizer.save_pretrained(causal_dir)
    causal_cfg = GPT2Config(
        vocab_size=len(tokenizer), n_embd=32, n_layer=2, n_head=2,
        n_positions=64, bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
    )
    GPT2LMHeadModel(causal_cfg).save_pretrained(causal_dir)
    return str(masked_dir), str(causal_dir)
