"""Whitespace word-level vocabulary and prompt-file parsing.

Prompts are plain text. A fine-tuning record is everything up to and
including a ``</s>`` token; an inference record ends at a bare ``SEQ:``
token. Splitting the whitespace token stream on those sentinels keeps the
parser independent of how records are separated on disk.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence

log = logging.getLogger(__name__)

PAD = "<pad>"
UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"
SEQ_MARK = "SEQ:"


@dataclass(frozen=True)
class Vocab:
    """Bidirectional word <-> id mapping with fixed special tokens."""

    words: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.words)})
        for special in (PAD, UNK, BOS, EOS):
            if special not in self._index:
                raise ValueError(f"vocabulary missing special token {special!r}")

    def __len__(self) -> int:
        return len(self.words)

    @property
    def pad_id(self) -> int:
        return self._index[PAD]

    @property
    def unk_id(self) -> int:
        return self._index[UNK]

    @property
    def eos_id(self) -> int:
        return self._index[EOS]

    def encode(self, tokens: Sequence[str]) -> List[int]:
        idx = self._index
        unk = self.unk_id
        return [idx.get(t, unk) for t in tokens]

    def decode(self, ids: Iterable[int]) -> List[str]:
        return [self.words[i] for i in ids]


def build_vocab(token_streams: Iterable[Sequence[str]]) -> Vocab:
    """Word vocabulary over the streams, specials first, then sorted words."""
    seen = set()
    for stream in token_streams:
        seen.update(stream)
    seen.difference_update({PAD, UNK, BOS, EOS})
    return Vocab(words=(PAD, UNK, BOS, EOS) + tuple(sorted(seen)))


def _split_records(tokens: List[str], sentinel: str) -> List[List[str]]:
    records: List[List[str]] = []
    current: List[str] = []
    for tok in tokens:
        current.append(tok)
        if tok == sentinel:
            records.append(current)
            current = []
    if current:
        log.warning(
            "prompt file has %d trailing tokens after the last %r; ignored",
            len(current),
            sentinel,
        )
    return records


def read_finetune_prompts(path: Path) -> List[List[str]]:
    """Tokenized fine-tuning records (each ends with ``</s>``)."""
    records = _split_records(path.read_text(encoding="utf-8").split(), EOS)
    if not records:
        raise ValueError(f"no fine-tuning records in {path}")
    return records


def read_inference_prompts(path: Path) -> List[List[str]]:
    """Tokenized inference records (each ends with a bare ``SEQ:``)."""
    tokens = path.read_text(encoding="utf-8").split()
    records = _split_records(tokens, SEQ_MARK)
    if not records:
        raise ValueError(f"no inference records in {path}")
    return records
