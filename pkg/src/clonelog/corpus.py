"""Log statement description (LSD) corpus: preprocessing, train/test splits, vocabulary."""

from __future__ import annotations

import hashlib
import json
import re
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from clonelog.clones import ClonePair
from clonelog.ingest import LogStatement, MethodDefinition

EOS = "<eos>"
UNK = "<unk>"
START = "<s>"  # input-side padding only; never predicted

_ESCAPE_RE = re.compile(r"\\u[0-9a-fA-F]{4}|\\[0-7]{1,3}|\\.")
_PLACEHOLDER_RE = re.compile(r"\{\d*\}|%[-#+ 0,(]*\d*(?:\.\d+)?[a-zA-Z%]")
_PRINTABLE = frozenset(string.printable) - frozenset("\t\n\r\x0b\x0c")


@dataclass(frozen=True)
class CorpusConfig:
    lowercase: bool = True
    min_count: int = 1
    keep_duplicates: bool = True  # identical LSD strings are kept; frequency drives the LM

    def __post_init__(self):
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")


DEFAULT_CORPUS = CorpusConfig()


@dataclass(frozen=True)
class LsdSequence:
    tokens: tuple[str, ...]  # ends with EOS
    origin_method: str = ""
    origin_level: str = "unknown"
    ordinal: int = 0  # position of the statement inside its method

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(t for t in self.tokens if t != EOS)

    @property
    def is_empty(self) -> bool:
        return not self.words

    @property
    def identity(self) -> tuple[str, int]:
        return (self.origin_method, self.ordinal)


def tokenize_description(text: str, cfg: CorpusConfig = DEFAULT_CORPUS) -> list[str]:
    text = _ESCAPE_RE.sub(" ", text)
    text = _PLACEHOLDER_RE.sub(" ", text)
    text = "".join(ch if ch in _PRINTABLE else " " for ch in text)
    if cfg.lowercase:
        text = text.lower()
    return re.findall(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]", text)


def extract_lsd(
    stmt: LogStatement, cfg: CorpusConfig = DEFAULT_CORPUS, origin_method: str = "", ordinal: int = 0
) -> LsdSequence:
    """Static description tokens of one logging statement; dynamic parts are dropped."""
    words = tokenize_description(stmt.description_raw, cfg)
    return LsdSequence(tuple(words) + (EOS,), origin_method, stmt.level, ordinal)


def method_lsds(method: MethodDefinition, cfg: CorpusConfig = DEFAULT_CORPUS) -> list[LsdSequence]:
    base = method.id.rstrip("'")
    return [extract_lsd(s, cfg, base, k) for k, s in enumerate(method.log_statements)]


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    query_id: str
    candidate_id: str
    ordinal: int
    seed: LsdSequence
    reference: LsdSequence

    def to_record(self) -> dict:
        return {
            "query_id": self.query_id,
            "candidate_id": self.candidate_id,
            "ordinal": self.ordinal,
            "seed": list(self.seed.words),
            "reference": list(self.reference.words),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TestCase":
        seed = LsdSequence(tuple(rec["seed"]) + (EOS,), rec["query_id"])
        ref = LsdSequence(tuple(rec["reference"]) + (EOS,), rec["candidate_id"], ordinal=rec["ordinal"])
        return cls(rec["query_id"], rec["candidate_id"], rec["ordinal"], seed, ref)


@dataclass
class CorpusSplit:
    train: list[LsdSequence] = field(default_factory=list)
    test_cases: list[TestCase] = field(default_factory=list)

    def check_exclusive(self) -> None:
        seen = {s.identity for s in self.train}
        for case in self.test_cases:
            if case.reference.identity in seen:
                raise AssertionError(f"reference {case.reference.identity} also appears in training")


def build_splits(
    pairs: Iterable[ClonePair],
    methods: Mapping[str, MethodDefinition],
    cfg: CorpusConfig = DEFAULT_CORPUS,
) -> CorpusSplit:
    """Queries' LSDs train the model; candidates' LSDs become references.

    A method keeps the first role it is given (train or test) so the two
    sides stay disjoint when clone pairs chain or repeat in both directions.
    Test case k of a candidate is seeded by the query's k-th LSD, or its first
    when the query has fewer statements.
    """
    split = CorpusSplit()
    role: dict[str, str] = {}
    in_train: set[tuple[str, int]] = set()
    for pair in sorted(pairs, key=lambda p: (p.query_id, p.candidate_id)):
        mi, mj = methods[pair.query_id], methods[pair.candidate_id]
        if not mi.log_statements:
            continue
        bi, bj = mi.id.rstrip("'"), mj.id.rstrip("'")
        if bi == bj or role.get(bi, "train") != "train":
            continue
        if mj.log_statements and role.get(bj, "test") != "test":
            continue
        role[bi] = "train"
        seeds = method_lsds(mi, cfg)
        for lsd in seeds:
            if not lsd.is_empty and lsd.identity not in in_train:
                in_train.add(lsd.identity)
                split.train.append(lsd)
        if not mj.log_statements:
            continue
        role[bj] = "test"
        for k, ref in enumerate(method_lsds(mj, cfg)):
            seed = seeds[k] if k < len(seeds) else seeds[0]
            if ref.is_empty or seed.is_empty:
                continue
            split.test_cases.append(TestCase(pair.query_id, pair.candidate_id, k, seed, ref))
    if not cfg.keep_duplicates:
        uniq, seen_words = [], set()
        for s in split.train:
            if s.words not in seen_words:
                seen_words.add(s.words)
                uniq.append(s)
        split.train = uniq
    split.check_exclusive()
    return split


class Vocabulary:
    """Dense token indices; EOS and UNK are reserved at 0 and 1."""

    def __init__(self, tokens: Sequence[str], counts: Mapping[str, int] | None = None):
        if list(tokens[:2]) != [EOS, UNK]:
            raise ValueError("vocabulary must start with the reserved tokens")
        self.tokens = list(tokens)
        self.counts = dict(counts or {})
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("duplicate vocabulary entries")

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def lookup(self, token: str) -> int:
        return self.index.get(token, 1)

    def map(self, tokens: Iterable[str]) -> list[str]:
        return [t if t in self.index else UNK for t in tokens]

    def to_tsv(self) -> str:
        return "".join(f"{t}\t{i}\t{self.counts.get(t, 0)}\n" for i, t in enumerate(self.tokens))

    @classmethod
    def from_tsv(cls, lines: Iterable[str]) -> "Vocabulary":
        tokens, counts = [], {}
        for line in lines:
            if not line.strip():
                continue
            tok, idx, cnt = line.rstrip("\n").split("\t")
            if int(idx) != len(tokens):
                raise ValueError("vocabulary indices must be dense and ordered")
            tokens.append(tok)
            counts[tok] = int(cnt)
        return cls(tokens, counts)

    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.tokens).encode("utf-8")).hexdigest()[:16]


def build_vocabulary(train: Iterable[LsdSequence], min_count: int = 1) -> Vocabulary:
    freq: Counter = Counter()
    n_seq = 0
    for seq in train:
        if seq.is_empty:
            continue
        n_seq += 1
        freq.update(seq.words)
    if n_seq == 0:
        raise ValueError("cannot build a vocabulary from an empty training set")
    kept = sorted((t for t, c in freq.items() if c >= min_count), key=lambda t: (-freq[t], t))
    counts = {t: freq[t] for t in kept}
    counts[EOS] = n_seq
    counts[UNK] = sum(c for t, c in freq.items() if c < min_count)
    return Vocabulary([EOS, UNK] + kept, counts)


def write_train_txt(train: Iterable[LsdSequence], fh) -> None:
    for seq in train:
        fh.write(" ".join(seq.words) + "\n")


def read_train_txt(lines: Iterable[str]) -> list[LsdSequence]:
    out = []
    for line in lines:
        words = line.split()
        if words:
            out.append(LsdSequence(tuple(words) + (EOS,)))
    return out


def write_test_jsonl(cases: Iterable[TestCase], fh) -> None:
    for c in cases:
        fh.write(json.dumps(c.to_record(), ensure_ascii=False) + "\n")


def read_test_jsonl(lines: Iterable[str]) -> list[TestCase]:
    return [TestCase.from_record(json.loads(line)) for line in lines if line.strip()]
