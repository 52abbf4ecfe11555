"""Training configuration for the adapter."""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class FinetuneConfig:
    """Hyperparameters for fine-tuning a small causal LM on prompt files.

    The defaults describe the full-size run; tests and desk-scale CPU runs
    shrink the width/depth fields while keeping the schedule (block size,
    batch size, learning rate, iteration count) fixed.
    """

    block_size: int = 256
    batch_size: int = 4
    embedding_dim: int = 768
    layers: int = 12
    heads: int = 12
    accumulation_steps: int = 32
    learning_rate: float = 3e-5
    pretrained_iterations: int = 27200
    finetune_iterations: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        for field in (
            "block_size",
            "batch_size",
            "embedding_dim",
            "layers",
            "heads",
            "accumulation_steps",
        ):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be >= 1")
        if self.embedding_dim % self.heads != 0:
            raise ValueError("embedding_dim must be divisible by heads")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.finetune_iterations < 0:
            raise ValueError("finetune_iterations must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "FinetuneConfig":
        return cls(**data)
