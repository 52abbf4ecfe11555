from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from llm_adapter import FinetuneConfig, build_vocab, init_model

# A configuration that keeps the training schedule (block size, batch size,
# learning rate, iteration count) at full scale while shrinking the model so
# the suite runs quickly on CPU.
TINY = dict(embedding_dim=32, layers=2, heads=2, accumulation_steps=1)


@pytest.fixture(scope="session")
def harness_split(tmp_path_factory):
    """A split directory emitted by the scanpath harness on a synthetic corpus.

    The adapter only ever sees the files: train_prompts.txt,
    test_inference_prompts.txt, and manifest.json.
    """
    from gazepath.dataset import Corpus, make_splits, write_split, PARTICIPANT_HOLDOUT
    from gazepath.scanpath import Scanpath
    from gazepath.stimulus import CodePane
    from gazepath.synth import demo_method_sources
    from gazepath.stimulus import build_layout

    pane = CodePane()
    sources = demo_method_sources(12, seed=21)
    layouts = {mid: build_layout(mid, src, pane) for mid, src in sources.items()}
    method_ids = sorted(layouts)
    rng = np.random.default_rng(33)
    scanpaths = []
    for p in range(10):
        for mid in method_ids[:5]:
            tokens = [t for t in layouts[mid].tokens if t.kind != "punctuation"]
            picks = rng.choice(len(tokens), size=3, replace=False)
            words = tuple(tokens[int(i)].lexeme for i in picks)
            scanpaths.append(Scanpath(f"p{p:02d}", mid, words))
    corpus = Corpus(layouts=layouts, scanpaths=scanpaths)
    split = make_splits(corpus, PARTICIPANT_HOLDOUT)[0]
    out = tmp_path_factory.mktemp("split")
    write_split(corpus, split, out)
    return {"dir": out, "corpus": corpus, "split": split}


@pytest.fixture(scope="session")
def tiny_model_and_vocab(harness_split):
    from llm_adapter import read_finetune_prompts

    records = read_finetune_prompts(harness_split["dir"] / "train_prompts.txt")
    vocab = build_vocab(records)
    cfg = FinetuneConfig(seed=1, **TINY)
    return init_model(vocab, cfg), vocab, cfg, records
