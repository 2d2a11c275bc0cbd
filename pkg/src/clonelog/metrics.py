"""Confusion statistics and BLEU / ROUGE-N / ROUGE-L over token sequences.

All text scores are percentages in [0, 100]. Statistics whose denominator
vanishes come back as ``None`` rather than a silent zero.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

EOS = "<eos>"

BLEU_PRESETS: dict[int, tuple[float, ...]] = {
    1: (1.0, 0.0, 0.0, 0.0),
    2: (0.5, 0.5, 0.0, 0.0),
    3: (1 / 3, 1 / 3, 1 / 3, 0.0),
    4: (0.25, 0.25, 0.25, 0.25),
}


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)


def _ratio(num: int, den: int) -> float | None:
    return num / den if den > 0 else None


def confusion_stats(m: ConfusionMatrix) -> dict[str, float | None]:
    """Precision, recall, F-measure and balanced accuracy as percentages."""
    p = _ratio(m.tp, m.tp + m.fp)
    r = _ratio(m.tp, m.tp + m.fn)
    tnr = _ratio(m.tn, m.tn + m.fp)
    f = None
    if p is not None and r is not None and p + r > 0:
        f = 2 * p * r / (p + r)
    ba = (r + tnr) / 2 if r is not None and tnr is not None else None
    pct = lambda x: None if x is None else 100.0 * x  # noqa: E731
    return {"precision": pct(p), "recall": pct(r), "f_measure": pct(f), "balanced_accuracy": pct(ba)}


@dataclass(frozen=True)
class BleuConfig:
    weights: tuple[float, ...] = BLEU_PRESETS[4]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValueError("BLEU weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("BLEU weights must sum to 1")

    @classmethod
    def cumulative(cls, n: int) -> "BleuConfig":
        return cls(BLEU_PRESETS[n])

    @property
    def max_order(self) -> int:
        return max((i + 1 for i, w in enumerate(self.weights) if w > 0), default=0)


def _clean(tokens: Sequence[str]) -> list[str]:
    return [t for t in tokens if t != EOS]


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def modified_precision(candidate: Sequence[str], reference: Sequence[str], n: int) -> float:
    cand = ngrams(candidate, n)
    total = sum(cand.values())
    if total == 0:
        return 0.0
    ref = ngrams(reference, n)
    return sum(min(c, ref[g]) for g, c in cand.items()) / total


def brevity_penalty(c: int, r: int) -> float:
    if c > r:
        return 1.0
    if c == 0:
        return 0.0
    return math.exp(1 - r / c)


def bleu(candidate: Sequence[str], reference: Sequence[str], cfg: BleuConfig = BleuConfig()) -> float:
    cand, ref = _clean(candidate), _clean(reference)
    if not ref:
        raise ValueError("BLEU needs a non-empty reference")
    if not cand:
        return 0.0
    log_sum = 0.0
    for n, w in enumerate(cfg.weights, start=1):
        if w == 0:
            continue
        p = modified_precision(cand, ref, n)
        if p == 0:
            return 0.0
        log_sum += w * math.log(p)
    return 100.0 * brevity_penalty(len(cand), len(ref)) * math.exp(log_sum)


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> float | None:
    """Reference-oriented n-gram recall; ``None`` when the reference has no n-gram."""
    cand, ref = ngrams(_clean(candidate), n), ngrams(_clean(reference), n)
    total = sum(ref.values())
    if total == 0:
        return None
    return 100.0 * sum(min(c, cand[g]) for g, c in ref.items()) / total


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str], f_measure: bool = False, beta: float = 1.0) -> float:
    cand, ref = _clean(candidate), _clean(reference)
    if not ref:
        raise ValueError("ROUGE-L needs a non-empty reference")
    if not cand:
        return 0.0
    lcs = lcs_length(cand, ref)
    recall = lcs / len(ref)
    if not f_measure:
        return 100.0 * recall
    precision = lcs / len(cand)
    if lcs == 0:
        return 0.0
    return 100.0 * (1 + beta**2) * precision * recall / (recall + beta**2 * precision)
