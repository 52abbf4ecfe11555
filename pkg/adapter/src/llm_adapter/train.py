"""Fine-tuning loop: next-token prediction over whole prompt records."""
from __future__ import annotations

import logging
from typing import List, Sequence

import torch
from torch import nn

from .config import FinetuneConfig
from .model import CausalLM
from .vocab import Vocab

log = logging.getLogger(__name__)


def encode_record(tokens: Sequence[str], vocab: Vocab, block_size: int) -> List[int]:
    """Token ids for one record, left-truncated to fit the block.

    Records longer than the block lose material from the front (the start of
    the code listing) so the trailing scanpath supervision stays intact.
    """
    ids = vocab.encode(tokens)
    if len(ids) > block_size:
        log.warning(
            "record of %d tokens exceeds block size %d; truncating from the left",
            len(ids),
            block_size,
        )
        ids = ids[-block_size:]
    return ids


def _batch(records: List[List[int]], picks: torch.Tensor, pad_id: int) -> torch.Tensor:
    chosen = [records[int(i)] for i in picks]
    width = max(len(r) for r in chosen)
    out = torch.full((len(chosen), width), pad_id, dtype=torch.long)
    for row, ids in enumerate(chosen):
        out[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
    return out


def _step_loss(model: CausalLM, batch: torch.Tensor, pad_id: int) -> torch.Tensor:
    inputs, targets = batch[:, :-1], batch[:, 1:]
    logits = model(inputs)
    return nn.functional.cross_entropy(
        logits.reshape(-1, logits.shape[-1]),
        targets.reshape(-1),
        ignore_index=pad_id,
    )


def finetune(
    model: CausalLM,
    vocab: Vocab,
    prompt_records: Sequence[Sequence[str]],
    cfg: FinetuneConfig,
) -> List[float]:
    """Train in place for cfg.finetune_iterations steps; returns per-step loss.

    Each step averages the loss over cfg.accumulation_steps micro-batches of
    cfg.batch_size records before a single optimizer update.
    """
    records = [encode_record(r, vocab, cfg.block_size) for r in prompt_records]
    records = [r for r in records if len(r) >= 2]
    if not records:
        raise ValueError("no trainable records (all shorter than two tokens)")

    generator = torch.Generator().manual_seed(cfg.seed)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    losses: List[float] = []
    model.train()
    for step in range(cfg.finetune_iterations):
        optimizer.zero_grad()
        step_loss = 0.0
        for _ in range(cfg.accumulation_steps):
            picks = torch.randint(0, len(records), (cfg.batch_size,), generator=generator)
            loss = _step_loss(model, _batch(records, picks, vocab.pad_id), vocab.pad_id)
            (loss / cfg.accumulation_steps).backward()
            step_loss += float(loss.detach()) / cfg.accumulation_steps
        optimizer.step()
        losses.append(step_loss)
        log.info("step %d/%d loss %.4f", step + 1, cfg.finetune_iterations, step_loss)
    model.eval()
    return losses
