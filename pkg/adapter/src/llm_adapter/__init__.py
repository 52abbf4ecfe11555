"""Small causal-LM adapter for scanpath prompt files.

Consumes fine-tuning and inference prompt files, fine-tunes a word-level
causal transformer, and writes one greedy completion per prompt in manifest
order.
"""
from .config import FinetuneConfig
from .infer import MAX_NEW_TOKENS, complete, complete_all
from .model import CausalLM, init_model, load_checkpoint, save_checkpoint
from .train import finetune
from .vocab import (
    Vocab,
    build_vocab,
    read_finetune_prompts,
    read_inference_prompts,
)

__version__ = "0.1.0"

__all__ = [
    "CausalLM",
    "FinetuneConfig",
    "MAX_NEW_TOKENS",
    "Vocab",
    "build_vocab",
    "complete",
    "complete_all",
    "finetune",
    "init_model",
    "load_checkpoint",
    "read_finetune_prompts",
    "read_inference_prompts",
    "save_checkpoint",
    "__version__",
]
