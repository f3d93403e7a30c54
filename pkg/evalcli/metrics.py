"""
Letter error rate and confusion statistics.

Edit operations turn the hypothesis into the reference, with uniform costs: a wrong
hypothesis letter is a substitution, an extra hypothesis letter is a deletion and a
reference letter the hypothesis lacks is an insertion. The alignment behind every EditOps
is canonical: when several minimum-cost paths exist, the backtrace prefers a diagonal step
(match or substitution), then a deletion, then an insertion.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from common.config import ALPHABET
from common.errors import DataError

GAP = "-"

Pair = Tuple[Optional[str], Optional[str]]


@dataclass(frozen=True)
class EditOps:
    substitutions: int
    deletions: int
    insertions: int
    # (reference symbol, hypothesis symbol); None marks the gap side of a deletion or insertion.
    alignment: Tuple[Pair, ...] = ()

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def edit_distance(hypothesis: Sequence[str], reference: Sequence[str]) -> EditOps:
    """Levenshtein distance from hypothesis to reference with one canonical alignment."""
    n, m = len(reference), len(hypothesis)
    cost = np.zeros((n + 1, m + 1), dtype=np.int64)
    cost[:, 0] = np.arange(n + 1)
    cost[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            diag = cost[i - 1, j - 1] + (reference[i - 1] != hypothesis[j - 1])
            cost[i, j] = min(diag, cost[i - 1, j] + 1, cost[i, j - 1] + 1)

    pairs: List[Pair] = []
    subs = dels = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and cost[i, j] == cost[i - 1, j - 1] + (reference[i - 1] != hypothesis[j - 1]):
            subs += reference[i - 1] != hypothesis[j - 1]
            pairs.append((reference[i - 1], hypothesis[j - 1]))
            i, j = i - 1, j - 1
        elif j > 0 and cost[i, j] == cost[i, j - 1] + 1:
            dels += 1
            pairs.append((None, hypothesis[j - 1]))
            j -= 1
        else:
            ins += 1
            pairs.append((reference[i - 1], None))
            i -= 1
    return EditOps(int(subs), dels, ins, tuple(reversed(pairs)))


def letter_error_rate(pairs: Iterable[Tuple[Sequence[str], Sequence[str]]], per_word: bool = False) -> float:
    """
    LER in percent over (hypothesis, reference) pairs.

    Pooled by default: 100 * total edits / total reference letters. With per_word,
    each pair's rate is computed first and the rates are averaged.

    Raises:
        ValueError: no pairs.
        DataError: total reference length 0 (or, with per_word, any empty reference).
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("letter_error_rate needs at least one pair")
    if per_word:
        if any(len(ref) == 0 for _, ref in pairs):
            raise DataError("per-word LER is undefined for an empty reference")
        return float(np.mean([100.0 * edit_distance(hyp, ref).distance / len(ref) for hyp, ref in pairs]))
    total = sum(len(ref) for _, ref in pairs)
    if total == 0:
        raise DataError("total reference length is 0")
    return 100.0 * sum(edit_distance(hyp, ref).distance for hyp, ref in pairs) / total


@dataclass
class ConfusionMatrix:
    """
    Counts over (reference, hypothesis) letters. The last row and column stand for the gap:
    counts[r, GAP] are insertions of reference letter r (the gap column), counts[GAP, h] are
    deletions of hypothesis letter h (the gap row).
    """
    labels: str
    counts: np.ndarray

    @property
    def axis_labels(self) -> List[str]:
        return list(self.labels) + [GAP]

    def index(self, symbol: Optional[str]) -> int:
        return len(self.labels) if symbol is None else self.labels.index(symbol)

    def count(self, reference: Optional[str], hypothesis: Optional[str]) -> int:
        return int(self.counts[self.index(reference), self.index(hypothesis)])

    @property
    def insertions(self) -> np.ndarray:
        return self.counts[:-1, -1]

    @property
    def deletions(self) -> np.ndarray:
        return self.counts[-1, :-1]

    def normalized(self) -> np.ndarray:
        """Per reference letter, the empirical distribution over hypothesized letters and the gap."""
        rows = self.counts[:-1].astype(np.float64)
        totals = rows.sum(axis=1, keepdims=True)
        return np.divide(rows, totals, out=np.zeros_like(rows), where=totals > 0)


def confusion_matrix(alignments: Iterable, labels: str = ALPHABET) -> ConfusionMatrix:
    """Tally aligned pairs from EditOps (or raw pair sequences) into a ConfusionMatrix."""
    matrix = ConfusionMatrix(labels, np.zeros((len(labels) + 1, len(labels) + 1), dtype=np.int64))
    for item in alignments:
        for ref, hyp in (item.alignment if isinstance(item, EditOps) else item):
            matrix.counts[matrix.index(ref), matrix.index(hyp)] += 1
    return matrix
