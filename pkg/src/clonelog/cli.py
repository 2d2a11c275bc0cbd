"""Command line entry point: one subcommand per pipeline stage."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from clonelog import artifacts, evaluation
from clonelog.config import ConfigError, load_config
from clonelog.lm.modelio import ModelFormatError
from clonelog.lm.recurrent import DivergenceError
from clonelog.pipeline import Workspace

EXIT_USAGE = 2
EXIT_FAILURE = 1

_EXPECTED = (
    ConfigError,
    artifacts.StaleArtifactError,
    FileNotFoundError,
    NotADirectoryError,
    ModelFormatError,
    DivergenceError,
    ValueError,
)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or YAML run configuration")
    common.add_argument("--out", default="out", help="directory holding stage files")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--profile", choices=("desk", "paper"), help="LSTM size and training budget")
    common.add_argument("--model-kind", choices=("lstm", "ngram"), help="language model family")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="clonelog", description="Log suggestion from code clones.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("ingest", parents=[common], help="extract methods and logging statements")
    s.add_argument("--root", required=True)
    sub.add_parser("features", parents=[common], help="feature vectors for every method")
    s = sub.add_parser("detect", parents=[common], help="clone pairs among logged methods")
    s.add_argument("--mode", choices=("raw", "si_only", "full"))
    sub.add_parser("corpus", parents=[common], help="train/test LSD split and vocabulary")
    s = sub.add_parser("train", parents=[common], help="fit a language model")
    s.add_argument("--variant", choices=("nlp_1", "nlp_3"), default="nlp_1")
    s = sub.add_parser("suggest", parents=[common], help="suggest logs for a Java snippet")
    s.add_argument("--snippet", required=True, help="file with a method or class, '-' for stdin")
    s.add_argument("--variant", choices=("no_nlp", "nlp_1", "nlp_3"), default="nlp_1")
    s.add_argument("--beam", type=int)
    sub.add_parser("evaluate", parents=[common], help="run both experiments and write the report")
    s = sub.add_parser("pipeline", parents=[common], help="every stage from ingest to evaluate")
    s.add_argument("--root", required=True)
    return p


def _config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.profile:
        cfg.lm.profile = args.profile
    if args.model_kind:
        cfg.lm.model_kind = args.model_kind
    return cfg.validate()


def _error(exc: BaseException, code: int) -> int:
    rec = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(rec), file=sys.stderr)
    return code


def run(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        ws = Workspace(_config(args), Path(args.out))
        cmd = args.command
        if cmd == "ingest":
            methods = ws.ingest(args.root)
            print(json.dumps({"methods": len(methods), "logged": sum(m.has_logs for m in methods)}))
        elif cmd == "features":
            ws.features()
        elif cmd == "detect":
            print(json.dumps({"pairs": len(ws.detect(args.mode))}))
        elif cmd == "corpus":
            split = ws.corpus()
            print(json.dumps({"train": len(split.train), "test_cases": len(split.test_cases)}))
        elif cmd == "train":
            model = ws.train(args.variant)
            print(json.dumps({"variant": args.variant, "kind": model.kind,
                              "final_loss": getattr(model, "loss_curve", [None])[-1:]}))
        elif cmd == "suggest":
            text = sys.stdin.read() if args.snippet == "-" else Path(args.snippet).read_text(encoding="utf-8")
            print(json.dumps(ws.suggest(text, args.variant, args.beam), indent=2))
        elif cmd == "evaluate":
            sys.stdout.write(evaluation.render_report(ws.evaluate(), "markdown"))
        elif cmd == "pipeline":
            sys.stdout.write(evaluation.render_report(ws.pipeline(args.root), "markdown"))
        if cmd != "evaluate" and cmd != "pipeline":
            ws.write_run_json()
    except ConfigError as e:
        return _error(e, EXIT_USAGE)
    except _EXPECTED as e:
        return _error(e, EXIT_FAILURE)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
