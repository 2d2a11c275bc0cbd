"""Count-based n-gram model over LSD tokens (the oracle for the recurrent model)."""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Iterable, Sequence

import numpy as np

from clonelog.corpus import EOS, START, UNK, LsdSequence, Vocabulary


class NgramModel:
    """Add-k smoothed n-gram model.

    ``P(t | ctx) = (count(ctx t) + k) / (count(ctx) + k |V|)`` where
    ``count(ctx)`` is how often ``ctx`` was followed by any token. With
    ``k == 0`` an unseen context backs off to its longest seen suffix.
    """

    kind = "ngram"

    def __init__(self, order: int, k: float, tokens: Sequence[str]):
        if order < 1:
            raise ValueError("n-gram order must be >= 1")
        if k < 0:
            raise ValueError("smoothing constant must be >= 0")
        self.order = order
        self.k = float(k)
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        self.tables: dict[tuple[str, ...], Counter] = defaultdict(Counter)

    @property
    def vocab_size(self) -> int:
        return len(self.tokens)

    def _map(self, tokens: Iterable[str]) -> list[str]:
        unk = UNK if UNK in self.index else None
        return [t if t in self.index or t == START else (unk or t) for t in tokens]

    def fit(self, train: Iterable[LsdSequence]) -> "NgramModel":
        for seq in train:
            if seq.is_empty:
                continue
            padded = [START] * (self.order - 1) + self._map(seq.tokens)
            for pos in range(self.order - 1, len(padded)):
                target = padded[pos]
                for m in range(self.order):
                    self.tables[tuple(padded[pos - m : pos])][target] += 1
        return self

    def context_key(self, context: Sequence[str]) -> tuple[str, ...]:
        ctx = [START] * (self.order - 1) + self._map(context)
        return tuple(ctx[len(ctx) - (self.order - 1) :]) if self.order > 1 else ()

    def next_token_distribution(self, context: Sequence[str]) -> np.ndarray:
        key = self.context_key(context)
        if self.k == 0:
            while key and key not in self.tables:
                key = key[1:]
        table = self.tables.get(key, Counter())
        counts = np.array([table.get(t, 0) for t in self.tokens], dtype=np.float64)
        total = counts.sum() + self.k * self.vocab_size
        if total == 0:
            return np.full(self.vocab_size, 1.0 / self.vocab_size)
        return (counts + self.k) / total

    def prob(self, token: str, context: Sequence[str]) -> float:
        return float(self.next_token_distribution(context)[self.index[token]])


def train_ngram(
    train: Iterable[LsdSequence], order: int = 2, k: float = 0.0, vocab: Vocabulary | None = None
) -> NgramModel:
    """Fit an n-gram model; without ``vocab`` the support is the observed token set."""
    train = [s for s in train if not s.is_empty]
    if not train:
        raise ValueError("n-gram training set is empty")
    if vocab is not None:
        tokens = vocab.tokens
    else:
        tokens = sorted({t for s in train for t in s.tokens} | {EOS})
    return NgramModel(order, k, tokens).fit(train)
