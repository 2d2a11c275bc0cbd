"""Seeded beam decoding of LSD candidates.

The borrowed description (the seed) is rewritten position by position: the
first token is kept, and each following position is predicted from the last
``context_width`` tokens of the seed. Past the seed's end the context comes
from the tokens generated so far. End-of-sequence is not offered before the
seed length is reached, so a rewrite is never shorter than what it rewrites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from clonelog.corpus import EOS, START, UNK, LsdSequence

DEFAULT_MAX_LEN = 32
_ZERO_LOGP = -1e9  # stands in for log(0) so rankings stay finite


class LanguageModel(Protocol):
    tokens: list[str]

    def next_token_distribution(self, context: Sequence[str]) -> np.ndarray: ...


def padded_context(history: Sequence[str], width: int) -> list[str]:
    ctx = list(history[-width:]) if width > 0 else []
    return [START] * (width - len(ctx)) + ctx


def next_token_distribution(model: LanguageModel, context: Sequence[str], width: int | None = None) -> np.ndarray:
    if width is not None:
        context = padded_context(context, width)
    return model.next_token_distribution(context)


def _logp(p: float) -> float:
    return math.log(p) if p > 0 else _ZERO_LOGP


def sequence_logprob(model: LanguageModel, tokens: Sequence[str], width: int) -> float:
    """Sum of stepwise conditional log-probabilities, from the start of the sequence."""
    index = {t: i for i, t in enumerate(model.tokens)}
    total = 0.0
    for t, tok in enumerate(tokens):
        p = next_token_distribution(model, tokens[:t], width)
        total += _logp(float(p[index.get(tok, index.get(UNK, 0))]))
    return total


@dataclass(frozen=True)
class Candidate:
    tokens: tuple[str, ...]  # without the end marker
    score: float  # total log-probability of the generated positions
    finished: bool = True

    def as_lsd(self) -> LsdSequence:
        return LsdSequence(self.tokens + (EOS,))


def _history(seed: Sequence[str], out: Sequence[str]) -> list[str]:
    t = len(out)
    if t <= len(seed):
        return list(seed[:t])
    return list(seed) + list(out[len(seed) :])


def generate(
    model: LanguageModel,
    seed: Sequence[str] | LsdSequence,
    context_width: int = 1,
    beam_width: int = 1,
    max_len: int = DEFAULT_MAX_LEN,
) -> list[Candidate]:
    if beam_width < 1:
        raise ValueError("beam width must be >= 1")
    seed = list(seed.words if isinstance(seed, LsdSequence) else [t for t in seed if t != EOS])
    if not seed:
        raise ValueError("generation needs a non-empty seed")
    tokens = model.tokens
    banned = {i for i, t in enumerate(tokens) if t in (UNK, START)}
    eos = tokens.index(EOS)

    beams: list[tuple[float, list[str], bool]] = [(0.0, [seed[0]], False)]
    while any(not done for _, _, done in beams):
        grown = []
        for score, out, done in beams:
            if done or len(out) >= max_len:
                grown.append((score, out, True))
                continue
            pos = len(out)
            p = next_token_distribution(model, _history(seed, out), context_width)
            allowed = [i for i in range(len(tokens)) if i not in banned and (i != eos or pos >= len(seed))]
            ranked = sorted(allowed, key=lambda i: (-p[i], tokens[i]))[:beam_width]
            if p[ranked[0]] <= 0 and pos < len(seed):
                # nothing the model knows fits here; keep the borrowed token
                ranked = [tokens.index(seed[pos])] if seed[pos] in tokens else ranked[:1]
            for i in ranked:
                tok = tokens[i]
                grown.append((score + _logp(float(p[i])), out + [tok], i == eos))
        grown.sort(key=lambda b: (-b[0], b[1]))
        beams = []
        seen = set()
        for b in grown:
            key = tuple(b[1])
            if key not in seen:
                seen.add(key)
                beams.append(b)
            if len(beams) == beam_width:
                break
    cands = [
        Candidate(tuple(t for t in out if t != EOS), score, out[-1] == EOS)
        for score, out, _ in beams
    ]
    cands.sort(key=lambda c: (-c.score, c.tokens))
    return cands


def suggest_lsd(test_case, model: LanguageModel | None, mode: str) -> list[LsdSequence]:
    """Candidate descriptions for one test case: verbatim seed, NLP-1, or NLP-3."""
    seed = test_case.seed
    if mode == "no_nlp":
        return [LsdSequence(seed.words + (EOS,))]
    if model is None:
        raise ValueError(f"mode {mode} needs a trained model")
    if mode == "nlp_1":
        return [c.as_lsd() for c in generate(model, seed, context_width=1, beam_width=1)]
    if mode == "nlp_3":
        return [c.as_lsd() for c in generate(model, seed, context_width=3, beam_width=3)]
    raise ValueError(f"unknown suggestion mode {mode!r}")
