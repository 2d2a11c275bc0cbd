#!/usr/bin/env python3
"""Score the three detection modes against log-stripped ground truth on a source tree.

    python scripts/run_location_experiment.py --root path/to/java --out out/loc
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from clonelog import evaluation
from clonelog.config import load_config
from clonelog.fixtures import corpus_path
from clonelog.pipeline import Workspace


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--root", type=Path, default=None, help="Java tree (default: bundled fixture corpus)")
    ap.add_argument("--out", type=Path, default=Path("out/location"))
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--max-negatives", type=int, default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    ws = Workspace(cfg, args.out)
    methods = ws.ingest(args.root or corpus_path())
    gt = evaluation.build_ground_truth(methods, ws.detector, args.max_negatives)
    if not len(gt):
        raise SystemExit("no labeled pairs: the tree needs at least two logged methods")
    res = evaluation.run_location_experiment(gt, {m.id: m for m in methods}, cfg.experiment.modes, ws.detector)
    report = evaluation.ScoreReport(location=res)
    print(evaluation.render_report(report, "markdown"))
    summary = {
        "positives": len(gt.positive_pairs),
        "negatives": len(gt.negative_pairs),
        "modes": {m: {"tp": c.tp, "tn": c.tn, "fp": c.fp, "fn": c.fn} for m, c in res.items()},
        "stats": report.location_stats(),
    }
    (args.out / "location.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
