from __future__ import annotations

import pytest

from llm_adapter.vocab import (
    BOS,
    EOS,
    PAD,
    SEQ_MARK,
    UNK,
    Vocab,
    build_vocab,
    read_finetune_prompts,
    read_inference_prompts,
)


def test_build_vocab_has_specials_first():
    vocab = build_vocab([["a", "b"], ["b", "c"]])
    assert vocab.words[:4] == (PAD, UNK, BOS, EOS)
    assert set(vocab.words[4:]) == {"a", "b", "c"}


def test_encode_unknown_maps_to_unk():
    vocab = build_vocab([["a"]])
    assert vocab.encode(["a", "zzz"]) == [vocab.encode(["a"])[0], vocab.unk_id]


def test_decode_inverts_encode_on_known_words():
    vocab = build_vocab([["x", "y", BOS, EOS]])
    tokens = [BOS, "x", "y", EOS]
    assert vocab.decode(vocab.encode(tokens)) == tokens


def test_vocab_requires_specials():
    with pytest.raises(ValueError):
        Vocab(words=("a", "b"))


def test_read_finetune_prompts_splits_on_eos(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("TDAT: int x ;\n SEQ: <s> x </s>\n\nTDAT: int y ;\n SEQ: <s> y </s>\n")
    records = read_finetune_prompts(path)
    assert len(records) == 2
    assert records[0][-1] == EOS
    assert records[1][0] == "TDAT:"


def test_read_inference_prompts_splits_on_seq_marker(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("TDAT: int x ;\n SEQ:\n\nTDAT: int y ;\n SEQ:")
    records = read_inference_prompts(path)
    assert len(records) == 2
    assert all(r[-1] == SEQ_MARK for r in records)


def test_empty_prompt_file_rejected(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("")
    with pytest.raises(ValueError):
        read_finetune_prompts(path)
    with pytest.raises(ValueError):
        read_inference_prompts(path)
