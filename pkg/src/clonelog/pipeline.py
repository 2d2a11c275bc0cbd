"""Stage runners shared by the command line and the experiment scripts.

Every stage reads the previous stage's files from the output directory,
checks their config hash and writes its own files with a fresh header.
"""

from __future__ import annotations

import io
import json
import logging
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from clonelog import artifacts, evaluation
from clonelog.clones import CloneIndex, find_clones, read_pairs_csv, suggest_log_location, write_pairs_csv
from clonelog.config import RunConfig
from clonelog.corpus import (
    CorpusSplit,
    build_splits,
    build_vocabulary,
    method_lsds,
    read_test_jsonl,
    read_train_txt,
    write_test_jsonl,
    write_train_txt,
    Vocabulary,
)
from clonelog.features import extract_features, write_features_jsonl
from clonelog.ingest import (
    MethodDefinition,
    SourceFile,
    extract_methods,
    extract_tree,
    local_method_names,
    read_methods_jsonl,
    scan_tree,
    write_methods_jsonl,
)
from clonelog.lm import modelio
from clonelog.lm.decode import generate
from clonelog.lm.ngram import train_ngram
from clonelog.lm.recurrent import train_recurrent

logger = logging.getLogger(__name__)

METHODS = "methods.jsonl"
FEATURES = "features.jsonl"
PAIRS = "pairs.csv"
TRAIN = "lsd_train.txt"
TEST = "lsd_test.jsonl"
VOCAB = "vocab.tsv"
REPORT_CSV = "report.csv"
REPORT_MD = "report.md"
RUN_JSON = "run.json"
WINDOWS = {"nlp_1": 1, "nlp_3": 3}


def model_path(out: Path, variant: str) -> Path:
    return out / "models" / f"{variant}.model"


@dataclass
class Workspace:
    cfg: RunConfig
    out: Path
    timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.out = Path(self.out)
        self.hash = self.cfg.hash()
        self.lwk = self.cfg.lwk.build()
        self.detector = self.cfg.detector.build()

    def read(self, name: str) -> list[str]:
        return artifacts.read_lines(self.out / name, self.hash)

    def write(self, name: str, stage: str, body: str) -> Path:
        return artifacts.write_text(self.out / name, stage, self.hash, body)

    def methods(self) -> list[MethodDefinition]:
        return list(read_methods_jsonl(self.read(METHODS), self.lwk))

    def _timed(self, stage: str, t0: float) -> None:
        self.timings[stage] = round(time.perf_counter() - t0, 4)

    # stages -------------------------------------------------------------

    def ingest(self, root: str | Path) -> list[MethodDefinition]:
        t0 = time.perf_counter()
        diagnostics: list[dict] = []
        files = scan_tree(root, self.cfg.include_globs, self.cfg.project_id, diagnostics)
        methods = extract_tree(files, self.lwk, diagnostics)
        buf = io.StringIO()
        write_methods_jsonl(methods, buf)
        self.write(METHODS, "ingest", buf.getvalue())
        for d in diagnostics:
            logger.warning(json.dumps({"diagnostic": d}))
        self._timed("ingest", t0)
        return methods

    def features(self) -> None:
        t0 = time.perf_counter()
        methods = self.methods()
        names = local_method_names(methods)
        buf = io.StringIO()
        vecs = []
        for m in methods:
            local = names.get(m.source_file.path, frozenset()) | {m.name}
            vecs += [extract_features(m, local, "raw"), extract_features(m, local, "log_aware")]
        write_features_jsonl(vecs, buf)
        self.write(FEATURES, "features", buf.getvalue())
        self._timed("features", t0)

    def detect(self, mode: str | None = None) -> list:
        """Clone pairs among logged methods, each query against every other logged method."""
        t0 = time.perf_counter()
        self.read(FEATURES)  # stage order check
        mode = mode or self.cfg.experiment.detect_mode
        methods = self.methods()
        logged = [m for m in methods if m.has_logs]
        index = CloneIndex(logged, local_method_names(methods))
        pairs = [p for q in index.profiles for p in find_clones(q, index, mode, self.detector)]
        pairs.sort(key=lambda p: (p.query_id, p.candidate_id))
        buf = io.StringIO()
        write_pairs_csv(pairs, buf)
        self.write(PAIRS, "detect", buf.getvalue())
        self._timed("detect", t0)
        return pairs

    def corpus(self) -> CorpusSplit:
        t0 = time.perf_counter()
        methods = {m.id: m for m in self.methods()}
        pairs = read_pairs_csv(self.read(PAIRS))
        ccfg = self.cfg.corpus.build()
        split = build_splits(pairs, methods, ccfg)
        vocab = build_vocabulary(split.train, ccfg.min_count)
        buf = io.StringIO()
        write_train_txt(split.train, buf)
        self.write(TRAIN, "corpus", buf.getvalue())
        buf = io.StringIO()
        write_test_jsonl(split.test_cases, buf)
        self.write(TEST, "corpus", buf.getvalue())
        self.write(VOCAB, "corpus", vocab.to_tsv())
        self._timed("corpus", t0)
        return split

    def split(self) -> CorpusSplit:
        return CorpusSplit(read_train_txt(self.read(TRAIN)), read_test_jsonl(self.read(TEST)))

    def vocab(self) -> Vocabulary:
        return Vocabulary.from_tsv(self.read(VOCAB))

    def train(self, variant: str):
        if variant not in WINDOWS:
            raise ValueError(f"variant {variant!r} has no model to train")
        t0 = time.perf_counter()
        train = self.split().train
        vocab = self.vocab()
        window = WINDOWS[variant]
        if self.cfg.lm.model_kind == "ngram":
            model = train_ngram(train, window + 1, self.cfg.lm.ngram_k, vocab)
        else:
            model = train_recurrent(train, vocab, self.cfg.lm.hyperparams(window, self.cfg.seed))
        path = model_path(self.out, variant)
        path.parent.mkdir(parents=True, exist_ok=True)
        modelio.save(model, path, self.hash)
        self._timed(f"train_{variant}", t0)
        return model

    def load_model(self, variant: str):
        path = model_path(self.out, variant)
        if not path.exists():
            raise FileNotFoundError(f"missing model {path}; run the train stage first")
        head = modelio.read_header(path.read_bytes())
        if head.get("config_hash") != self.hash:
            raise artifacts.StaleArtifactError(f"{path} was trained under config {head.get('config_hash')}")
        return modelio.load(path)

    def evaluate(self) -> evaluation.ScoreReport:
        t0 = time.perf_counter()
        exp = self.cfg.experiment
        methods = self.methods()
        by_id = {m.id: m for m in methods}
        report = evaluation.ScoreReport()
        gt = evaluation.build_ground_truth(methods, self.detector, exp.max_negatives)
        if len(gt):
            report.location = evaluation.run_location_experiment(gt, by_id, exp.modes, self.detector)
        split = self.split()
        if split.test_cases:
            models = {v: self.load_model(v) for v in exp.variants if v in WINDOWS}
            desc = evaluation.run_description_experiment(split, models, exp.variants)
            report.description, report.case_counts, report.per_case = desc.description, desc.case_counts, desc.per_case
        pairs = read_pairs_csv(self.read(PAIRS))
        report.lvl_match = evaluation.lvl_match_rate(pairs, by_id)
        report.metadata = {"lvl_pairs": len(pairs), "gt_positive": len(gt.positive_pairs),
                           "gt_negative": len(gt.negative_pairs)}
        self.write(REPORT_CSV, "evaluate", evaluation.render_report(report, "csv"))
        self.write(REPORT_MD, "evaluate", evaluation.render_report(report, "markdown"))
        self._timed("evaluate", t0)
        self.write_run_json(report)
        return report

    def write_run_json(self, report: evaluation.ScoreReport | None = None) -> None:
        doc = {
            "config_hash": self.hash,
            "config": self.cfg.to_dict(),
            "seed": self.cfg.seed,
            "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "timings_s": self.timings,
            "python": platform.python_version(),
            "numpy": np.__version__,
        }
        if report is not None:
            doc["report"] = report.metadata
        (self.out / RUN_JSON).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def pipeline(self, root: str | Path) -> evaluation.ScoreReport:
        self.ingest(root)
        self.features()
        self.detect()
        split = self.corpus()
        if split.train:
            for v in self.cfg.experiment.variants:
                if v in WINDOWS:
                    self.train(v)
        return self.evaluate()

    # single-snippet suggestion ------------------------------------------

    def suggest(self, snippet: str, variant: str = "nlp_1", beam_width: int | None = None) -> dict:
        """Location verdict and candidate descriptions for each method in a Java snippet."""
        methods = self.methods()
        logged = [m for m in methods if m.has_logs]
        index = CloneIndex(logged, local_method_names(methods))
        src = SourceFile("<snippet>", snippet if "class " in snippet else f"class Snippet {{\n{snippet}\n}}\n", "snippet")
        queries = extract_methods(src, self.lwk)
        if not queries:
            raise ValueError("no method definition found in the snippet")
        model = self.load_model(variant) if variant in WINDOWS else None
        ccfg = self.cfg.corpus.build()
        results = []
        for q in queries:
            verdict = suggest_log_location(q, index, self.cfg.experiment.detect_mode, self.detector)
            entry = {"method": q.name, "needs_log": verdict.needs_log, "evidence": [], "candidates": []}
            for p in verdict.evidence:
                entry["evidence"].append({"clone": p.candidate_id, "score": round(p.score, 6)})
                for lsd in method_lsds(index.by_id[p.candidate_id].method, ccfg):
                    if lsd.is_empty:
                        continue
                    if model is None:
                        texts = [" ".join(lsd.words)]
                    else:
                        w = WINDOWS[variant]
                        cands = generate(model, lsd.words, w, beam_width or w)
                        texts = [" ".join(c.tokens) for c in cands]
                    entry["candidates"].append({"from": p.candidate_id, "ordinal": lsd.ordinal, "lsd": texts})
            results.append(entry)
        return {"variant": variant, "methods": results}

