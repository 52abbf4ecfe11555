from __future__ import annotations

import copy

import pytest
import torch

from conftest import TINY
from llm_adapter import FinetuneConfig, build_vocab, finetune, init_model
from llm_adapter.train import encode_record


def test_zero_iterations_leaves_model_unchanged(tiny_model_and_vocab):
    model, vocab, cfg, records = tiny_model_and_vocab
    before = copy.deepcopy(model.state_dict())
    losses = finetune(model, vocab, records, FinetuneConfig(**{**cfg.to_dict(), "finetune_iterations": 0}))
    assert losses == []
    after = model.state_dict()
    assert all(torch.equal(before[k], after[k]) for k in before)


def test_loss_decreases_over_full_schedule(tiny_model_and_vocab):
    # Full 200-iteration schedule at the stock batch size and learning rate.
    _, vocab, _, records = tiny_model_and_vocab
    cfg = FinetuneConfig(seed=3, **TINY)
    model = init_model(vocab, cfg)
    losses = finetune(model, vocab, records, cfg)
    assert len(losses) == cfg.finetune_iterations == 200
    assert losses[-1] < losses[0]


def test_single_prompt_overfit_memorizes(tiny_model_and_vocab):
    from llm_adapter import complete

    _, _, _, records = tiny_model_and_vocab
    record = records[0]
    vocab = build_vocab([record])
    cfg = FinetuneConfig(
        seed=5, learning_rate=1e-3, finetune_iterations=300, **TINY
    )
    model = init_model(vocab, cfg)
    finetune(model, vocab, [record], cfg)

    seq_start = record.index("SEQ:")
    prompt, expected = record[: seq_start + 1], record[seq_start + 1 :]
    completion = complete(model, vocab, prompt)
    assert completion.split() == expected


def test_left_truncation_keeps_tail():
    vocab = build_vocab([[str(i) for i in range(20)] + ["<s>", "</s>"]])
    record = [str(i) for i in range(20)]
    ids = encode_record(record, vocab, block_size=8)
    assert len(ids) == 8
    assert vocab.decode(ids) == record[-8:]


def test_empty_training_set_rejected(tiny_model_and_vocab):
    model, vocab, cfg, _ = tiny_model_and_vocab
    with pytest.raises(ValueError):
        finetune(model, vocab, [["x"]], cfg)


def test_training_is_seed_reproducible(tiny_model_and_vocab):
    _, vocab, _, records = tiny_model_and_vocab
    runs = []
    for _ in range(2):
        cfg = FinetuneConfig(seed=7, finetune_iterations=5, **TINY)
        model = init_model(vocab, cfg)
        runs.append(finetune(model, vocab, records, cfg))
    assert runs[0] == runs[1]
