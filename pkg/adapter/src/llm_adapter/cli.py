"""Command-line interface: init a base model, fine-tune it, run inference."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import FinetuneConfig
from .infer import complete_all
from .model import init_model, load_checkpoint, save_checkpoint
from .train import finetune
from .vocab import build_vocab, read_finetune_prompts, read_inference_prompts

log = logging.getLogger(__name__)


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    defaults = FinetuneConfig()
    parser.add_argument("--block-size", type=int, default=defaults.block_size)
    parser.add_argument("--embedding-dim", type=int, default=defaults.embedding_dim)
    parser.add_argument("--layers", type=int, default=defaults.layers)
    parser.add_argument("--heads", type=int, default=defaults.heads)


def _add_train_args(parser: argparse.ArgumentParser) -> None:
    defaults = FinetuneConfig()
    parser.add_argument("--iterations", type=int, default=defaults.finetune_iterations)
    parser.add_argument("--batch-size", type=int, default=defaults.batch_size)
    parser.add_argument(
        "--accumulation-steps", type=int, default=defaults.accumulation_steps
    )
    parser.add_argument("--learning-rate", type=float, default=defaults.learning_rate)


def cmd_init(args: argparse.Namespace) -> int:
    records = read_finetune_prompts(Path(args.prompts))
    vocab = build_vocab(records)
    cfg = FinetuneConfig(
        block_size=args.block_size,
        embedding_dim=args.embedding_dim,
        layers=args.layers,
        heads=args.heads,
        seed=args.seed,
    )
    model = init_model(vocab, cfg)
    save_checkpoint(Path(args.out), model, vocab)
    log.info("wrote base checkpoint with %d-word vocabulary to %s", len(vocab), args.out)
    return 0


def cmd_finetune(args: argparse.Namespace) -> int:
    model, vocab = load_checkpoint(Path(args.base))
    cfg = FinetuneConfig(
        **{
            **model.cfg.to_dict(),
            "batch_size": args.batch_size,
            "accumulation_steps": args.accumulation_steps,
            "learning_rate": args.learning_rate,
            "finetune_iterations": args.iterations,
            "seed": args.seed,
        }
    )
    records = read_finetune_prompts(Path(args.prompts))
    losses = finetune(model, vocab, records, cfg)
    save_checkpoint(Path(args.out), model, vocab)
    if losses:
        log.info("loss %.4f -> %.4f over %d steps", losses[0], losses[-1], len(losses))
    return 0


def cmd_infer(args: argparse.Namespace) -> int:
    model, vocab = load_checkpoint(Path(args.ckpt))
    prompts = read_inference_prompts(Path(args.prompts))
    completions = complete_all(model, vocab, prompts)
    Path(args.out).write_text("\n".join(completions) + "\n", encoding="utf-8")
    log.info("wrote %d completions to %s", len(completions), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="llm-adapter")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a randomly initialized base checkpoint")
    p.add_argument("--prompts", required=True, help="fine-tuning prompt file (vocabulary source)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_model_args(p)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("finetune", help="fine-tune a checkpoint on a prompt file")
    p.add_argument("--prompts", required=True)
    p.add_argument("--base", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_train_args(p)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("infer", help="greedy completions for inference prompts")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--prompts", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_infer)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
