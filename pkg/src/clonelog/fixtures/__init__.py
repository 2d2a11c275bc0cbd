"""Bundled Java fixture corpus used by the tests, the experiment scripts and ``--root`` defaults."""

from importlib import resources
from pathlib import Path


def corpus_path() -> Path:
    return Path(str(resources.files(__name__) / "corpus"))
