"""Stage files carry a one-line header naming the producing stage and config hash."""

from __future__ import annotations

import json
from pathlib import Path

TEXT_PREFIX = "#!clonelog "


class StaleArtifactError(RuntimeError):
    pass


def header_line(path: Path, stage: str, config_hash: str) -> str:
    if path.suffix == ".jsonl":
        return json.dumps({"_header": {"stage": stage, "config_hash": config_hash}}, sort_keys=True)
    return f"{TEXT_PREFIX}config_hash={config_hash} stage={stage}"


def parse_header(line: str) -> dict | None:
    line = line.rstrip("\n")
    if line.startswith(TEXT_PREFIX):
        return dict(kv.split("=", 1) for kv in line[len(TEXT_PREFIX) :].split())
    if line.startswith('{"_header"'):
        return json.loads(line)["_header"]
    return None


def write_text(path: str | Path, stage: str, config_hash: str, body: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(header_line(path, stage, config_hash) + "\n" + body, encoding="utf-8")
    return path


def read_lines(path: str | Path, config_hash: str | None = None) -> list[str]:
    """Body lines of a stage file; with ``config_hash`` a mismatch is an error."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing stage input {path}")
    lines = path.read_text(encoding="utf-8").splitlines(keepends=True)
    head = parse_header(lines[0]) if lines else None
    if head is None:
        raise StaleArtifactError(f"{path} has no stage header")
    if config_hash is not None and head.get("config_hash") != config_hash:
        raise StaleArtifactError(
            f"{path} was produced by stage {head.get('stage')} with config {head.get('config_hash')}, "
            f"current config is {config_hash}"
        )
    return lines[1:]
