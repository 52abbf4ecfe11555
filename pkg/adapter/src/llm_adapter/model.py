"""A minimal causal transformer language model over word tokens."""
from __future__ import annotations

from pathlib import Path
from typing import Tuple

import torch
from torch import nn

from .config import FinetuneConfig
from .vocab import Vocab


class CausalLM(nn.Module):
    """Decoder-only transformer: token + position embeddings, causal blocks."""

    def __init__(self, vocab_size: int, cfg: FinetuneConfig):
        super().__init__()
        self.cfg = cfg
        self.token_emb = nn.Embedding(vocab_size, cfg.embedding_dim)
        self.pos_emb = nn.Embedding(cfg.block_size, cfg.embedding_dim)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.embedding_dim,
            nhead=cfg.heads,
            dim_feedforward=4 * cfg.embedding_dim,
            dropout=0.0,
            activation="gelu",
            batch_first=True,
            norm_first=True,
        )
        self.blocks = nn.TransformerEncoder(
            layer, num_layers=cfg.layers, enable_nested_tensor=False
        )
        self.norm = nn.LayerNorm(cfg.embedding_dim)
        self.head = nn.Linear(cfg.embedding_dim, vocab_size, bias=False)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        """Logits of shape (batch, time, vocab) for token ids (batch, time)."""
        _, t = ids.shape
        if t > self.cfg.block_size:
            raise ValueError(f"sequence length {t} exceeds block size {self.cfg.block_size}")
        pos = torch.arange(t, device=ids.device)
        x = self.token_emb(ids) + self.pos_emb(pos)
        mask = nn.Transformer.generate_square_subsequent_mask(t, device=ids.device)
        x = self.blocks(x, mask=mask, is_causal=True)
        return self.head(self.norm(x))


def save_checkpoint(path: Path, model: CausalLM, vocab: Vocab) -> None:
    torch.save(
        {
            "config": model.cfg.to_dict(),
            "vocab": list(vocab.words),
            "state_dict": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path: Path) -> Tuple[CausalLM, Vocab]:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    cfg = FinetuneConfig.from_dict(payload["config"])
    vocab = Vocab(words=tuple(payload["vocab"]))
    model = CausalLM(len(vocab), cfg)
    model.load_state_dict(payload["state_dict"])
    return model, vocab


def init_model(vocab: Vocab, cfg: FinetuneConfig) -> CausalLM:
    """Randomly initialized base model, reproducible for a given seed."""
    torch.manual_seed(cfg.seed)
    return CausalLM(len(vocab), cfg)
