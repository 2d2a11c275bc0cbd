#!/usr/bin/env python3
"""Full pipeline plus the description experiment, repeated over several seeds.

Prints per-seed macro BLEU/ROUGE and the mean over seeds so the variance of
the recurrent model can be judged. Use ``--model-kind ngram`` for a fast run.
"""

from __future__ import annotations

import argparse
import json
import statistics
from dataclasses import replace
from pathlib import Path

from clonelog.config import load_config
from clonelog.evaluation import TEXT_METRICS
from clonelog.fixtures import corpus_path
from clonelog.pipeline import Workspace


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--root", type=Path, default=None, help="Java tree (default: bundled fixture corpus)")
    ap.add_argument("--out", type=Path, default=Path("out/description"))
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--model-kind", choices=["lstm", "ngram"], default=None)
    args = ap.parse_args()

    base = load_config(args.config)
    if args.model_kind:
        base = replace(base, lm=replace(base.lm, model_kind=args.model_kind))
    per_seed = {}
    for seed in args.seeds:
        ws = Workspace(replace(base, seed=seed), args.out / f"seed{seed}")
        rep = ws.pipeline(args.root or corpus_path())
        per_seed[seed] = rep.description
        row = "  ".join(f"{v}: B-1 {d['B-1']:.2f} R-L {d['R-L']:.2f}" for v, d in rep.description.items())
        print(f"seed {seed}  {row}")

    variants = next(iter(per_seed.values())).keys()
    mean = {}
    for v in variants:
        mean[v] = {}
        for k in TEXT_METRICS:
            xs = [d[v][k] for d in per_seed.values() if d[v][k] is not None]
            mean[v][k] = statistics.fmean(xs) if xs else None
    print("mean over seeds")
    for v, d in mean.items():
        print(f"  {v:7s} " + " ".join(f"{k} {'n/a' if x is None else f'{x:.2f}'}" for k, x in d.items()))
    (args.out / "summary.json").write_text(json.dumps({"per_seed": per_seed, "mean": mean}, indent=2) + "\n")


if __name__ == "__main__":
    main()
