"""Baseline scanpath predictors and external-prediction ingestion.

The baselines establish floors: source reading order, method-name-first,
and a first-order Markov model over token categories (kind x line-position
decile) that transfers to unseen methods. External predictors (LLMs) plug
in through a predictions JSONL or a raw-completions file paired with a
split manifest.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .dataset import Corpus, parse_prediction
from .scanpath import Scanpath
from .stimulus import KIND_IDENTIFIER, KIND_PUNCTUATION, StimulusLayout, Token

log = logging.getLogger(__name__)

SOURCE_READING_ORDER = "reading_order"
SOURCE_NAME_FIRST = "name_first"
SOURCE_MARKOV = "markov"
SOURCE_EXTERNAL = "external"

Category = Tuple[str, int]


@dataclass(frozen=True)
class PredictionRecord:
    participant_id: str
    method_id: str
    n: int
    words: Tuple[str, ...]
    source: str

    def __post_init__(self) -> None:
        if len(self.words) > self.n:
            raise ValueError("prediction longer than its n")


def _substantive(layout: StimulusLayout) -> List[Token]:
    return [t for t in layout.tokens if t.kind != KIND_PUNCTUATION]


def reading_order_predict(layout: StimulusLayout, n: int) -> List[str]:
    """First n non-punctuation lexemes in source order, duplicates collapsed."""
    tokens = _substantive(layout)
    if not tokens:
        raise ValueError(f"method {layout.method_id!r} has no substantive tokens")
    words: List[str] = []
    for t in tokens:
        if words and words[-1] == t.lexeme:
            continue
        words.append(t.lexeme)
        if len(words) == n:
            break
    return words


def find_method_name(layout: StimulusLayout) -> Optional[int]:
    """Index of the first identifier immediately followed by '(' in token order."""
    tokens = layout.tokens
    for i, t in enumerate(tokens[:-1]):
        if t.kind == KIND_IDENTIFIER and tokens[i + 1].lexeme == "(":
            return i
    return None


def name_first_predict(layout: StimulusLayout, n: int) -> List[str]:
    """Method name first, then source reading order around it."""
    name_idx = find_method_name(layout)
    if name_idx is None:
        log.warning(
            "method %s: no method name detected, falling back to reading order",
            layout.method_id,
        )
        return reading_order_predict(layout, n)
    name = layout.tokens[name_idx].lexeme
    words = [name]
    for i, t in enumerate(layout.tokens):
        if len(words) == n:
            break
        if i == name_idx or t.kind == KIND_PUNCTUATION:
            continue
        if words[-1] == t.lexeme:
            continue
        words.append(t.lexeme)
    return words


def token_category(token: Token, layout: StimulusLayout) -> Category:
    """Token kind plus the decile of its line within the method."""
    total_lines = max(t.line for t in layout.tokens) + 1
    decile = min(9, token.line * 10 // total_lines)
    return (token.kind, decile)


@dataclass
class MarkovModel:
    """First-order transition counts over token categories, add-one smoothed."""

    initial: Dict[Category, int] = field(default_factory=dict)
    transitions: Dict[Category, Dict[Category, int]] = field(default_factory=dict)
    categories: List[Category] = field(default_factory=list)

    def initial_prob(self, cat: Category) -> float:
        total = sum(self.initial.values()) + len(self.categories)
        return (self.initial.get(cat, 0) + 1) / total

    def transition_prob(self, prev: Category, cat: Category) -> float:
        row = self.transitions.get(prev, {})
        total = sum(row.values()) + len(self.categories)
        return (row.get(cat, 0) + 1) / total


def _word_token(lexeme: str, layout: StimulusLayout) -> Optional[Token]:
    for t in layout.tokens:
        if t.lexeme == lexeme:
            return t
    return None


def markov_train(
    train_scanpaths: Sequence[Scanpath], layouts: Dict[str, StimulusLayout]
) -> MarkovModel:
    """Count initial and transition category frequencies over scanpath words."""
    if not train_scanpaths:
        raise ValueError("cannot train a Markov model on an empty training set")
    all_cats = sorted(
        {
            (kind, decile)
            for kind in (
                "identifier",
                "keyword",
                "literal",
                "operator",
                "punctuation",
                "comment",
            )
            for decile in range(10)
        }
    )
    model = MarkovModel(categories=all_cats)
    for sp in train_scanpaths:
        layout = layouts.get(sp.method_id)
        if layout is None:
            continue
        cats: List[Category] = []
        for word in sp.words:
            token = _word_token(word, layout)
            if token is not None:
                cats.append(token_category(token, layout))
        if not cats:
            continue
        model.initial[cats[0]] = model.initial.get(cats[0], 0) + 1
        for prev, cur in zip(cats, cats[1:]):
            row = model.transitions.setdefault(prev, {})
            row[cur] = row.get(cur, 0) + 1
    return model


def markov_predict(model: MarkovModel, layout: StimulusLayout, n: int) -> List[str]:
    """Greedy category decode, realized as earliest matching tokens.

    At each step the highest-probability category with an available token
    in this method wins (ties by category sort order); the emitted token is
    the earliest source-order token of that category not chosen in the
    previous step.
    """
    by_cat: Dict[Category, List[Token]] = {}
    for t in _substantive(layout):
        by_cat.setdefault(token_category(t, layout), []).append(t)
    if not by_cat:
        return []
    words: List[str] = []
    prev_token: Optional[Token] = None
    prev_cat: Optional[Category] = None
    for _ in range(n):
        candidates = []
        for cat in sorted(by_cat):
            tokens = [t for t in by_cat[cat] if t is not prev_token]
            if not tokens:
                continue
            p = (
                model.initial_prob(cat)
                if prev_cat is None
                else model.transition_prob(prev_cat, cat)
            )
            candidates.append((p, cat, tokens[0]))
        if not candidates:
            break
        # max() keeps the first of equal-probability candidates, which are
        # already in category sort order.
        _, cat, token = max(candidates, key=lambda c: c[0])
        if words and words[-1] == token.lexeme:
            break
        words.append(token.lexeme)
        prev_token = token
        prev_cat = cat
    return words


def load_external_predictions(
    path: str | Path,
    corpus: Corpus,
    manifest_path: str | Path | None = None,
) -> List[PredictionRecord]:
    """Load predictions from JSONL or from raw completions plus a manifest.

    JSONL records carry their own trial keys. Raw completions are one
    completion per line, paired with the manifest's test trials in order.
    """
    path = Path(path)
    known = {(sp.participant_id, sp.method_id) for sp in corpus.scanpaths}
    records: List[PredictionRecord] = []
    if manifest_path is None:
        bad_lines: List[int] = []
        with path.open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = (str(rec["participant_id"]), str(rec["method_id"]))
                if key not in known:
                    bad_lines.append(line_no)
                    continue
                words = tuple(rec["words"])
                records.append(
                    PredictionRecord(
                        participant_id=key[0],
                        method_id=key[1],
                        n=int(rec["n"]),
                        words=words,
                        source=SOURCE_EXTERNAL,
                    )
                )
        if bad_lines:
            raise ValueError(f"{path}: unknown trial keys on lines {bad_lines}")
        return records
    manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    test_keys = [(str(p), str(m)) for p, m in manifest["test"]]
    completions = path.read_text(encoding="utf-8").splitlines()
    if len(completions) != len(test_keys):
        raise ValueError(
            f"{path}: {len(completions)} completions but manifest lists "
            f"{len(test_keys)} test trials"
        )
    unknown = [k for k in test_keys if k not in known]
    if unknown:
        raise ValueError(f"{manifest_path}: unknown trial keys {unknown}")
    for key, completion in zip(test_keys, completions):
        words = tuple(parse_prediction(completion))
        records.append(
            PredictionRecord(
                participant_id=key[0],
                method_id=key[1],
                n=max(len(words), 1),
                words=words,
                source=SOURCE_EXTERNAL,
            )
        )
    return records
