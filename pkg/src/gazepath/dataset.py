"""Leave-one-out split construction and TDAT/SEQ prompt serialization.

Two split families: hold out all trials of one participant, or all trials
of one method. Each split carries a deterministic validation id (the
lexicographically smallest id on the train side). Prompts serialize as

    TDAT: {source}\\n SEQ: <s> {words} </s>\\n

with the source verbatim; inference prompts stop right after ``SEQ:``.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from .scanpath import Scanpath
from .stimulus import StimulusLayout

log = logging.getLogger(__name__)

PARTICIPANT_HOLDOUT = "participant_holdout"
METHOD_HOLDOUT = "method_holdout"
SPLIT_KINDS = (PARTICIPANT_HOLDOUT, METHOD_HOLDOUT)

_SEQ_MARKER = "\n SEQ: "


@dataclass
class Corpus:
    """All layouts and extracted scanpaths of one study."""

    layouts: Dict[str, StimulusLayout]
    scanpaths: List[Scanpath]

    def __post_init__(self) -> None:
        for sp in self.scanpaths:
            if sp.method_id not in self.layouts:
                raise ValueError(f"scanpath references unknown method_id {sp.method_id!r}")
        n_participants = len(self.participant_ids())
        n_methods = len(self.layouts)
        if self.scanpaths and (n_participants, n_methods) != (27, 68):
            log.warning(
                "corpus shape %d participants x %d methods differs from the "
                "expected 27 x 68 study shape",
                n_participants,
                n_methods,
            )

    def participant_ids(self) -> List[str]:
        return sorted({sp.participant_id for sp in self.scanpaths})

    def method_ids(self) -> List[str]:
        return sorted(self.layouts)


@dataclass(frozen=True)
class SplitSpec:
    kind: str
    test_id: str
    validation_id: str
    train_ids: Tuple[str, ...]  # train-side ids, validation_id included


@dataclass(frozen=True)
class PromptRecord:
    participant_id: str
    method_id: str
    tdat: str
    seq: Tuple[str, ...]
    n: int


def make_splits(corpus: Corpus, kind: str) -> List[SplitSpec]:
    """One leave-one-out split per id, deterministic validation choice."""
    if kind == PARTICIPANT_HOLDOUT:
        ids = corpus.participant_ids()
    elif kind == METHOD_HOLDOUT:
        ids = corpus.method_ids()
    else:
        raise ValueError(f"unknown split kind {kind!r}")
    if len(ids) < 3:
        raise ValueError(f"need at least 3 ids to split, got {len(ids)}")
    splits = []
    for test_id in ids:
        train_ids = tuple(i for i in ids if i != test_id)
        splits.append(
            SplitSpec(kind=kind, test_id=test_id, validation_id=train_ids[0], train_ids=train_ids)
        )
    return splits


def materialize_split(
    corpus: Corpus, split: SplitSpec, n: int | None = None
) -> Tuple[List[PromptRecord], List[PromptRecord], List[PromptRecord]]:
    """Route every trial into (train, val, test) prompt records.

    seq is truncated to the first n words when n is given, else kept whole.
    Trials with empty scanpaths are excluded with a warning.
    """
    train: List[PromptRecord] = []
    val: List[PromptRecord] = []
    test: List[PromptRecord] = []
    for sp in corpus.scanpaths:
        if not sp.words:
            log.warning(
                "excluding empty scanpath participant=%s method=%s",
                sp.participant_id,
                sp.method_id,
            )
            continue
        seq = sp.words[:n] if n is not None else sp.words
        rec = PromptRecord(
            participant_id=sp.participant_id,
            method_id=sp.method_id,
            tdat=corpus.layouts[sp.method_id].source,
            seq=tuple(seq),
            n=len(seq),
        )
        key = sp.participant_id if split.kind == PARTICIPANT_HOLDOUT else sp.method_id
        if key == split.test_id:
            test.append(rec)
        elif key == split.validation_id:
            val.append(rec)
        else:
            train.append(rec)
    return train, val, test


def render_finetune_prompt(rec: PromptRecord) -> str:
    """Byte-exact fine-tuning serialization of one record."""
    if not rec.seq:
        raise ValueError("cannot render a prompt with an empty seq")
    return f"TDAT: {rec.tdat}{_SEQ_MARKER}<s> {' '.join(rec.seq)} </s>\n"


def render_inference_prompt(rec: PromptRecord) -> str:
    """Fine-tuning serialization stopped right after 'SEQ:'."""
    return f"TDAT: {rec.tdat}\n SEQ:"


def parse_prompt(text: str, participant_id: str = "", method_id: str = "") -> PromptRecord:
    """Inverse of render_finetune_prompt (ids are not part of the wire form)."""
    if text.endswith("\n"):
        text = text[:-1]
    head, sep, tail = text.rpartition(_SEQ_MARKER)
    if not sep or not head.startswith("TDAT: "):
        raise ValueError("not a TDAT/SEQ finetune prompt")
    if not (tail.startswith("<s> ") and tail.endswith(" </s>")):
        raise ValueError("SEQ line missing <s> ... </s> tags")
    words = tuple(tail[len("<s> ") : -len(" </s>")].split(" "))
    return PromptRecord(
        participant_id=participant_id,
        method_id=method_id,
        tdat=head[len("TDAT: ") :],
        seq=words,
        n=len(words),
    )


def parse_prediction(completion: str) -> List[str]:
    """Extract predicted words from an untrusted model completion.

    Lenient: a missing close tag takes everything to the end (with a
    warning); a missing open tag yields no words (with a warning).
    """
    start = completion.find("<s>")
    if start < 0:
        log.warning("completion has no <s> tag: %r", completion[:80])
        return []
    body = completion[start + len("<s>") :]
    end = body.find("</s>")
    if end < 0:
        log.warning("completion truncated (no </s> tag): %r", completion[:80])
    else:
        body = body[:end]
    return body.split()


def write_prompt_file(records: Sequence[PromptRecord], path: str | Path, inference: bool = False) -> None:
    """Write one rendered prompt per record, blank-line separated."""
    render = render_inference_prompt if inference else render_finetune_prompt
    Path(path).write_text("\n".join(render(r) for r in records), encoding="utf-8", newline="")


def split_dir_name(split: SplitSpec) -> str:
    return f"{split.kind}__{split.test_id}"


def write_split(
    corpus: Corpus, split: SplitSpec, out_dir: str | Path, n: int | None = None
) -> dict:
    """Materialize one split on disk: manifest plus prompt files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train, val, test = materialize_split(corpus, split, n)
    manifest = {
        "kind": split.kind,
        "test_id": split.test_id,
        "validation_id": split.validation_id,
        "train_ids": list(split.train_ids),
        "train": [[r.participant_id, r.method_id] for r in train],
        "val": [[r.participant_id, r.method_id] for r in val],
        "test": [[r.participant_id, r.method_id] for r in test],
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    write_prompt_file(train, out_dir / "train_prompts.txt")
    write_prompt_file(val, out_dir / "val_prompts.txt")
    write_prompt_file(test, out_dir / "test_inference_prompts.txt", inference=True)
    with (out_dir / "test_reference.jsonl").open("w", encoding="utf-8", newline="\n") as fh:
        for r in test:
            fh.write(
                json.dumps(
                    {
                        "participant_id": r.participant_id,
                        "method_id": r.method_id,
                        "words": list(r.seq),
                    }
                )
                + "\n"
            )
    return manifest
