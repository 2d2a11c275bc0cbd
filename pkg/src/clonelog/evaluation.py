"""Experiment protocol: ground truth, location and description experiments, reports."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from clonelog import metrics
from clonelog.clones import DEFAULT_DETECTOR, ClonePair, CloneIndex, DetectorConfig, compare, profile
from clonelog.corpus import CorpusSplit
from clonelog.ingest import MethodDefinition, local_method_names, strip_logs
from clonelog.lm.decode import suggest_lsd
from clonelog.metrics import ConfusionMatrix

logger = logging.getLogger(__name__)

VARIANTS = ("no_nlp", "nlp_1", "nlp_3")
TEXT_METRICS = ("B-1", "B-2", "B-3", "B-4", "R-1", "R-2", "R-3", "R-L")
STAT_KEYS = ("precision", "recall", "f_measure", "balanced_accuracy")


@dataclass
class GroundTruthSet:
    positive_pairs: list[tuple[str, str]] = field(default_factory=list)
    negative_pairs: list[tuple[str, str]] = field(default_factory=list)
    detector: dict = field(default_factory=dict)

    def labeled(self) -> list[tuple[str, str, bool]]:
        return sorted([(a, b, True) for a, b in self.positive_pairs] + [(a, b, False) for a, b in self.negative_pairs])

    def __len__(self) -> int:
        return len(self.positive_pairs) + len(self.negative_pairs)


def build_ground_truth(
    methods: Iterable[MethodDefinition],
    cfg: DetectorConfig = DEFAULT_DETECTOR,
    max_negatives: int | None = None,
) -> GroundTruthSet:
    """Label every pair of logged methods by full-mode detection on their stripped forms.

    Negatives are all undetected pairs whose stripped sizes fall in the same
    SLOC band (optionally capped, in id order).
    """
    methods = list(methods)
    logged = sorted((m for m in methods if m.has_logs), key=lambda m: m.id)
    gt = GroundTruthSet(detector={"threshold": cfg.threshold, "weights": dict(cfg.weights),
                                  "sloc_ratio_filter": cfg.sloc_ratio_filter})
    if len(logged) < 2:
        logger.warning("ground truth needs at least two logged methods, got %d", len(logged))
        return gt
    names = local_method_names(methods)
    stripped = {m.id: strip_logs(m) for m in logged}
    index = CloneIndex(stripped.values(), names)
    for m in logged:
        qp = index.by_id[stripped[m.id].id]
        for cp in index.band(qp.aware.sloc, "full", cfg.sloc_ratio_filter):
            other = cp.id.rstrip("'")
            if other <= m.id:
                continue
            pair = compare(qp, cp, "full", cfg)
            if pair.is_clone:
                gt.positive_pairs.append((m.id, other))
            else:
                gt.negative_pairs.append((m.id, other))
    gt.positive_pairs.sort()
    gt.negative_pairs.sort()
    if max_negatives is not None:
        gt.negative_pairs = gt.negative_pairs[:max_negatives]
    return gt


def run_location_experiment(
    gt: GroundTruthSet,
    methods: Mapping[str, MethodDefinition],
    modes: Sequence[str] = ("raw", "si_only", "full"),
    cfg: DetectorConfig = DEFAULT_DETECTOR,
) -> dict[str, ConfusionMatrix]:
    """Score each labeled pair as (logged MD_i, stripped MD_j) under every mode."""
    if len(gt) == 0:
        raise ValueError("ground truth is empty")
    names = local_method_names(methods.values())
    profiles = {}

    def prof(m: MethodDefinition):
        if m.id not in profiles:
            profiles[m.id] = profile(m, names.get(m.source_file.path, frozenset()))
        return profiles[m.id]

    tallies = {}
    for mode in modes:
        tp = tn = fp = fn = 0
        for a, b, label in gt.labeled():
            pred = compare(prof(methods[a]), prof(strip_logs(methods[b])), mode, cfg).is_clone
            if label and pred:
                tp += 1
            elif label:
                fn += 1
            elif pred:
                fp += 1
            else:
                tn += 1
        tallies[mode] = ConfusionMatrix(tp, tn, fp, fn)
    return tallies


def score_candidate(candidate: Sequence[str], reference: Sequence[str]) -> dict[str, float | None]:
    scores: dict[str, float | None] = {}
    for n in range(1, 5):
        scores[f"B-{n}"] = metrics.bleu(candidate, reference, metrics.BleuConfig.cumulative(n))
    for n in range(1, 4):
        scores[f"R-{n}"] = metrics.rouge_n(candidate, reference, n)
    scores["R-L"] = metrics.rouge_l(candidate, reference)
    return scores


def best_scores(candidates: Sequence[Sequence[str]], reference: Sequence[str]) -> dict[str, float | None]:
    """Per-metric maximum over the candidates."""
    per = [score_candidate(c, reference) for c in candidates]
    best = {}
    for k in TEXT_METRICS:
        vals = [s[k] for s in per if s[k] is not None]
        best[k] = max(vals) if vals else None
    return best


@dataclass
class ScoreReport:
    location: dict[str, ConfusionMatrix] = field(default_factory=dict)
    description: dict[str, dict[str, float | None]] = field(default_factory=dict)
    case_counts: dict[str, int] = field(default_factory=dict)
    per_case: dict[str, list[dict]] = field(default_factory=dict)
    lvl_match: float | None = None
    metadata: dict = field(default_factory=dict)

    def location_stats(self) -> dict[str, dict[str, float | None]]:
        return {mode: metrics.confusion_stats(m) for mode, m in self.location.items()}

    def improvements(self, base: str = "no_nlp") -> dict[str, dict[str, float | None]]:
        out = {}
        if base not in self.description:
            return out
        for variant, row in self.description.items():
            if variant == base:
                continue
            out[f"{variant}_over_{base}"] = {
                k: (None if row[k] is None or not self.description[base][k]
                    else 100.0 * (row[k] - self.description[base][k]) / self.description[base][k])
                for k in TEXT_METRICS
            }
        return out

    @property
    def is_empty(self) -> bool:
        return not self.location and not self.description


def run_description_experiment(
    split: CorpusSplit,
    models: Mapping[str, object],
    variants: Sequence[str] = VARIANTS,
) -> ScoreReport:
    if not split.test_cases:
        raise ValueError("description experiment has no test cases")
    report = ScoreReport()
    for variant in variants:
        model = models.get(variant) if variant != "no_nlp" else None
        rows = []
        for case in split.test_cases:
            cands = [c.words for c in suggest_lsd(case, model, variant)]
            row = best_scores(cands, case.reference.words)
            row["case"] = f"{case.query_id}->{case.candidate_id}#{case.ordinal}"
            row["candidates"] = [" ".join(c) for c in cands]
            rows.append(row)
        report.per_case[variant] = rows
        report.case_counts[variant] = len(rows)
        avgs = {}
        for k in TEXT_METRICS:
            vals = [r[k] for r in rows if r[k] is not None]
            avgs[k] = fmean(vals) if vals else None
        report.description[variant] = avgs
    return report


def lvl_match_rate(pairs: Iterable[ClonePair], methods: Mapping[str, MethodDefinition]) -> float | None:
    """Share of clone pairs whose first logging statements use the same verbosity level."""
    total = same = 0
    for p in pairs:
        a, b = methods[p.query_id], methods[p.candidate_id]
        if not a.log_statements or not b.log_statements:
            raise ValueError(f"pair {p.query_id} / {p.candidate_id} lacks logging statements")
        total += 1
        same += a.log_statements[0].level == b.log_statements[0].level
    if total == 0:
        return None
    return same / total


def _fmt(x: float | int | None) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, int):
        return str(x)
    return f"{x:.2f}"


def _tables(r: ScoreReport) -> list[tuple[str, list[str], list[list[str]]]]:
    tables = []
    if r.location:
        stats = r.location_stats()
        rows = []
        for mode, m in r.location.items():
            s = stats[mode]
            rows.append([mode, *(_fmt(v) for v in (m.tp, m.tn, m.fp, m.fn)), *(_fmt(s[k]) for k in STAT_KEYS)])
        tables.append(("Log location", ["mode", "tp", "tn", "fp", "fn", "P", "R", "F", "BA"], rows))
    if r.description:
        rows = [
            [v, _fmt(r.case_counts.get(v, 0)), *(_fmt(r.description[v][k]) for k in TEXT_METRICS)]
            for v in r.description
        ]
        tables.append(("Log description", ["variant", "cases", *TEXT_METRICS], rows))
        imp = r.improvements()
        if imp:
            rows = [[name, *(_fmt(vals[k]) for k in TEXT_METRICS)] for name, vals in imp.items()]
            tables.append(("Improvement %", ["comparison", *TEXT_METRICS], rows))
    if r.lvl_match is not None:
        tables.append(("Verbosity level match", ["pairs", "match_rate"],
                       [[_fmt(r.metadata.get("lvl_pairs", 0)), _fmt(100.0 * r.lvl_match)]]))
    return tables


def render_report(r: ScoreReport, fmt: str = "csv") -> str:
    if r.is_empty:
        raise ValueError("refusing to render an empty report")
    out = io.StringIO()
    tables = _tables(r)
    if fmt == "csv":
        import csv

        w = csv.writer(out, lineterminator="\n")
        for n, (title, header, rows) in enumerate(tables):
            if n:
                out.write("\n")
            w.writerow([f"# {title}"])
            w.writerow(header)
            w.writerows(rows)
    elif fmt == "markdown":
        for n, (title, header, rows) in enumerate(tables):
            if n:
                out.write("\n")
            out.write(f"## {title}\n\n")
            out.write("| " + " | ".join(header) + " |\n")
            out.write("|" + "|".join("---" for _ in header) + "|\n")
            for row in rows:
                out.write("| " + " | ".join(row) + " |\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return out.getvalue()
