"""Scanpath similarity metrics and score aggregation.

Both metrics compare the space-joined word sequences at character level
and report similarity in [0, 1]:

* Levenshtein ratio: (|a| + |b| - D) / (|a| + |b|) with insert/delete
  cost 1 and substitution cost 2 (the classic fuzzy-matching ``ratio``
  normalization).
* Gestalt (Ratcliff/Obershelp): 2 * matched / (|a| + |b|), matches found
  by recursively taking the longest common substring, ties broken by the
  leftmost occurrence in the first string.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple


@dataclass(frozen=True)
class ScorePair:
    participant_id: str
    method_id: str
    n: int
    levenshtein: float
    gestalt: float


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    n: int
    mean_levenshtein: float
    mean_gestalt: float
    count: int


def serialize_words(words: Sequence[str]) -> str:
    """Single-space join: the character-level comparison substrate."""
    return " ".join(words)


def levenshtein_similarity(a: str, b: str) -> float:
    """Normalized edit similarity with substitution cost 2."""
    if not a and not b:
        return 1.0
    # Two-row DP over edit distance with insert/delete 1, substitute 2.
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(
                min(
                    prev[j] + 1,
                    cur[j - 1] + 1,
                    prev[j - 1] + (0 if ca == cb else 2),
                )
            )
        prev = cur
    total = len(a) + len(b)
    return (total - prev[-1]) / total


def _longest_common_substring(a: str, b: str) -> Tuple[int, int, int]:
    """(start_a, start_b, length) of the longest common substring.

    Ties resolve to the leftmost start in `a`, then the leftmost in `b`.
    """
    best = (0, 0, 0)
    prev_row = [0] * (len(b) + 1)
    for i in range(len(a)):
        row = [0] * (len(b) + 1)
        for j in range(len(b)):
            if a[i] == b[j]:
                length = prev_row[j] + 1
                row[j + 1] = length
                if length > best[2]:
                    best = (i - length + 1, j - length + 1, length)
        prev_row = row
    return best


def _gestalt_matches(a: str, b: str) -> int:
    if not a or not b:
        return 0
    ia, ib, length = _longest_common_substring(a, b)
    if length == 0:
        return 0
    return (
        length
        + _gestalt_matches(a[:ia], b[:ib])
        + _gestalt_matches(a[ia + length :], b[ib + length :])
    )


def gestalt_similarity(a: str, b: str) -> float:
    """Ratcliff/Obershelp pattern-matching similarity.

    Tie-breaking between equal-length longest common substrings depends on
    argument order, which would make the raw recursion asymmetric. We match
    on a canonical ordering (lexicographically smaller string first) so the
    similarity is symmetric by construction.
    """
    if not a and not b:
        return 1.0
    if b < a:
        a, b = b, a
    return 2.0 * _gestalt_matches(a, b) / (len(a) + len(b))


def score(
    pred: Sequence[str],
    ref: Sequence[str],
    n: int,
    participant_id: str = "",
    method_id: str = "",
) -> ScorePair:
    """Score a prediction against its reference at prefix length n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = serialize_words(pred[:n])
    b = serialize_words(ref[:n])
    return ScorePair(
        participant_id=participant_id,
        method_id=method_id,
        n=n,
        levenshtein=levenshtein_similarity(a, b),
        gestalt=gestalt_similarity(a, b),
    )


def aggregate(scores_by_experiment: Mapping[str, Sequence[ScorePair]]) -> List[ReportRow]:
    """Mean scores per (experiment, n), in a fixed deterministic order."""
    rows: List[ReportRow] = []
    for experiment in sorted(scores_by_experiment):
        by_n: Dict[int, List[ScorePair]] = {}
        for sp in scores_by_experiment[experiment]:
            by_n.setdefault(sp.n, []).append(sp)
        for n in sorted(by_n):
            group = by_n[n]
            rows.append(
                ReportRow(
                    experiment=experiment,
                    n=n,
                    mean_levenshtein=sum(s.levenshtein for s in group) / len(group),
                    mean_gestalt=sum(s.gestalt for s in group) / len(group),
                    count=len(group),
                )
            )
    return rows


#: (bin_low, bin_high, count) triples; the final (1.0, 1.0) bin isolates
#: perfect matches.
HistogramBins = List[Tuple[float, float, int]]


def histogram(scores: Iterable[float], bin_width: float = 0.1) -> HistogramBins:
    """Frequency bins over [0, 1] with a dedicated exact-1.0 bin."""
    n_bins = round(1.0 / bin_width)
    counts = [0] * n_bins
    perfect = 0
    for s in scores:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"score {s} outside [0, 1]")
        if s == 1.0:
            perfect += 1
        else:
            # Epsilon guards boundary scores against float division error
            # (0.3 / 0.1 is 2.999...96 in binary floating point).
            counts[min(int(s / bin_width + 1e-9), n_bins - 1)] += 1
    bins: HistogramBins = [
        (round(i * bin_width, 10), round((i + 1) * bin_width, 10), counts[i])
        for i in range(n_bins)
    ]
    bins.append((1.0, 1.0, perfect))
    return bins
