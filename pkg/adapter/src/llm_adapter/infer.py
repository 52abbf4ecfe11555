"""Greedy decoding of completions for inference prompts."""
from __future__ import annotations

from typing import List, Sequence

import torch

from .model import CausalLM
from .vocab import Vocab

MAX_NEW_TOKENS = 32


@torch.no_grad()
def complete(model: CausalLM, vocab: Vocab, prompt_tokens: Sequence[str]) -> str:
    """Greedy completion for one prompt, stopping at ``</s>`` or the cap.

    The prompt is left-truncated so that the prompt plus the full generation
    budget fits in the model's block.
    """
    model.eval()
    budget = model.cfg.block_size - MAX_NEW_TOKENS
    ids = vocab.encode(prompt_tokens)[-budget:]
    generated: List[int] = []
    for _ in range(MAX_NEW_TOKENS):
        window = torch.tensor([ids + generated], dtype=torch.long)[:, -model.cfg.block_size :]
        logits = model(window)
        next_id = int(logits[0, -1].argmax())
        generated.append(next_id)
        if next_id == vocab.eos_id:
            break
    return " ".join(vocab.decode(generated))


def complete_all(
    model: CausalLM, vocab: Vocab, prompts: Sequence[Sequence[str]]
) -> List[str]:
    """One completion per prompt, input order preserved."""
    return [complete(model, vocab, p) for p in prompts]
