"""Feature-similarity clone detection in three log-awareness modes.

``raw``      features and token bags as written (a log-oblivious detector).
``si_only``  log-aware features, but token bags still carry log tokens.
``full``     log-aware features and log-stripped token bags on both sides,
             so decisions are invariant to logging statements.
"""

from __future__ import annotations

import bisect
import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping

from clonelog.features import NUMERIC_FEATURES, FeatureVector, extract_features, token_bag
from clonelog.ingest import MethodDefinition, local_method_names, strip_logs

logger = logging.getLogger(__name__)

DetectMode = Literal["raw", "si_only", "full"]
MODES: tuple[str, ...] = ("raw", "si_only", "full")
WEIGHT_KEYS = NUMERIC_FEATURES + ("bag",)


def _equal_weights() -> dict[str, float]:
    return {k: 1.0 / len(WEIGHT_KEYS) for k in WEIGHT_KEYS}


@dataclass(frozen=True)
class DetectorConfig:
    threshold: float = 0.85
    weights: Mapping[str, float] = field(default_factory=_equal_weights)
    sloc_ratio_filter: float = 3.0

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must lie in (0, 1], got {self.threshold}")
        if set(self.weights) != set(WEIGHT_KEYS):
            raise ValueError(f"weights must cover exactly {WEIGHT_KEYS}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights.values()) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if self.sloc_ratio_filter < 1:
            raise ValueError("sloc_ratio_filter must be >= 1")


DEFAULT_DETECTOR = DetectorConfig()


@dataclass(frozen=True)
class ClonePair:
    query_id: str
    candidate_id: str
    score: float
    mode: str
    is_clone: bool
    evidence: Mapping[str, float] = field(default_factory=dict, compare=False)


def count_term(x: float, y: float) -> float:
    return 1.0 - abs(x - y) / max(x, y, 1)


def bag_jaccard(a: Mapping[str, int], b: Mapping[str, int]) -> float:
    """Multiset Jaccard: sum of minima over sum of maxima."""
    keys = set(a) | set(b)
    if not keys:
        return 1.0
    lo = sum(min(a.get(k, 0), b.get(k, 0)) for k in sorted(keys))
    hi = sum(max(a.get(k, 0), b.get(k, 0)) for k in sorted(keys))
    return lo / hi


def similarity_terms(a: FeatureVector, b: FeatureVector, bag_a, bag_b) -> dict[str, float]:
    terms = {k: count_term(getattr(a, k), getattr(b, k)) for k in NUMERIC_FEATURES}
    terms["bag"] = bag_jaccard(bag_a, bag_b)
    return terms


def similarity(
    a: FeatureVector, b: FeatureVector, bag_a, bag_b, cfg: DetectorConfig = DEFAULT_DETECTOR
) -> float:
    terms = similarity_terms(a, b, bag_a, bag_b)
    return math.fsum(cfg.weights[k] * terms[k] for k in WEIGHT_KEYS)


@dataclass(frozen=True)
class MethodProfile:
    """Everything the detector needs about one method, computed once."""

    method: MethodDefinition
    raw: FeatureVector
    aware: FeatureVector
    raw_bag: dict
    stripped_bag: dict

    @property
    def id(self) -> str:
        return self.method.id

    def view(self, mode: str) -> tuple[FeatureVector, dict]:
        if mode == "raw":
            return self.raw, self.raw_bag
        if mode == "si_only":
            return self.aware, self.raw_bag
        if mode == "full":
            return self.aware, self.stripped_bag
        raise ValueError(f"unknown detection mode {mode!r}")


def profile(method: MethodDefinition, local_names: Iterable[str] = ()) -> MethodProfile:
    names = frozenset(local_names) | {method.name}
    return MethodProfile(
        method,
        extract_features(method, names, "raw"),
        extract_features(method, names, "log_aware"),
        token_bag(method),
        token_bag(strip_logs(method)),
    )


def _as_profile(m, names: Mapping[str, frozenset[str]] | None) -> MethodProfile:
    if isinstance(m, MethodProfile):
        return m
    local = (names or {}).get(m.source_file.path, frozenset())
    return profile(m, local)


def compare(q: MethodProfile, c: MethodProfile, mode: str, cfg: DetectorConfig) -> ClonePair:
    va, ba = q.view(mode)
    vb, bb = c.view(mode)
    terms = similarity_terms(va, vb, ba, bb)
    score = math.fsum(cfg.weights[k] * terms[k] for k in WEIGHT_KEYS)
    return ClonePair(q.id, c.id, score, mode, score >= cfg.threshold, terms)


def is_clone_pair(
    q: MethodDefinition | MethodProfile,
    c: MethodDefinition | MethodProfile,
    mode: DetectMode = "full",
    cfg: DetectorConfig = DEFAULT_DETECTOR,
    local_names: Mapping[str, frozenset[str]] | None = None,
) -> ClonePair:
    if local_names is None:
        raw = [x.method if isinstance(x, MethodProfile) else x for x in (q, c)]
        local_names = local_method_names(raw)
    return compare(_as_profile(q, local_names), _as_profile(c, local_names), mode, cfg)


def _base_id(method_id: str) -> str:
    return method_id.rstrip("'")


class CloneIndex:
    """Immutable candidate index; methods sorted by SLOC for band queries."""

    def __init__(self, methods: Iterable[MethodDefinition], local_names: Mapping[str, frozenset[str]] | None = None):
        methods = sorted(methods, key=lambda m: m.id)
        self.local_names = dict(local_names) if local_names is not None else local_method_names(methods)
        self.profiles = [_as_profile(m, self.local_names) for m in methods]
        self.by_id = {p.id: p for p in self.profiles}
        self._bands = {}
        for kind, key in (("raw", lambda p: p.raw.sloc), ("aware", lambda p: p.aware.sloc)):
            order = sorted(self.profiles, key=lambda p: (key(p), p.id))
            self._bands[kind] = ([key(p) for p in order], order)

    def __len__(self) -> int:
        return len(self.profiles)

    def profile_for(self, m: MethodDefinition) -> MethodProfile:
        if m.id in self.by_id:
            return self.by_id[m.id]
        names = self.local_names.get(m.source_file.path, frozenset())
        return profile(m, names)

    def band(self, sloc: int, mode: str, ratio: float) -> list[MethodProfile]:
        keys, order = self._bands["raw" if mode == "raw" else "aware"]
        lo = bisect.bisect_left(keys, sloc / ratio - 1e-9)
        hi = bisect.bisect_right(keys, sloc * ratio + 1e-9)
        return order[lo:hi]


def find_clones(
    q: MethodDefinition | MethodProfile,
    index: CloneIndex,
    mode: DetectMode = "full",
    cfg: DetectorConfig = DEFAULT_DETECTOR,
) -> list[ClonePair]:
    qp = q if isinstance(q, MethodProfile) else index.profile_for(q)
    vec, _ = qp.view(mode)
    hits = []
    for cp in index.band(vec.sloc, mode, cfg.sloc_ratio_filter):
        if _base_id(cp.id) == _base_id(qp.id):
            continue
        pair = compare(qp, cp, mode, cfg)
        if pair.is_clone:
            hits.append(pair)
    hits.sort(key=lambda p: (-p.score, p.candidate_id))
    return hits


@dataclass
class LocationSuggestion:
    needs_log: bool
    evidence: list[ClonePair]


def suggest_log_location(
    q: MethodDefinition,
    index: CloneIndex,
    mode: DetectMode = "full",
    cfg: DetectorConfig = DEFAULT_DETECTOR,
) -> LocationSuggestion:
    if q.has_logs:
        logger.warning("%s already has logging statements; suggesting for its stripped form", q.id)
        q = strip_logs(q)
    evidence = [p for p in find_clones(q, index, mode, cfg) if index.by_id[p.candidate_id].method.has_logs]
    return LocationSuggestion(bool(evidence), evidence)


PAIRS_HEADER = ("query_id", "candidate_id", "mode", "score", "is_clone")


def write_pairs_csv(pairs: Iterable[ClonePair], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(PAIRS_HEADER)
    for p in pairs:
        w.writerow([p.query_id, p.candidate_id, p.mode, f"{p.score:.6f}", "true" if p.is_clone else "false"])


def read_pairs_csv(lines: Iterable[str]) -> list[ClonePair]:
    rows = csv.DictReader(lines)
    return [
        ClonePair(r["query_id"], r["candidate_id"], float(r["score"]), r["mode"], r["is_clone"] == "true")
        for r in rows
    ]
