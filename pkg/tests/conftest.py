from __future__ import annotations

from pathlib import Path

import pytest

from clonelog.corpus import EOS, LsdSequence
from clonelog.fixtures import corpus_path
from clonelog.ingest import SourceFile, extract_methods, extract_tree, scan_tree

FIXTURES = Path(__file__).parent / "fixtures"


def lsd(text: str, origin: str = "", ordinal: int = 0) -> LsdSequence:
    return LsdSequence(tuple(text.split()) + (EOS,), origin, ordinal=ordinal)


def java_methods(src: str, path: str = "T.java", project: str = "t"):
    if "class " not in src:
        src = "class T {\n" + src + "\n}\n"
    return extract_methods(SourceFile(path, src, project))




@pytest.fixture(scope="session")
def corpus_root() -> Path:
    return corpus_path()


@pytest.fixture(scope="session")
def location_methods():
    return extract_tree(scan_tree(FIXTURES / "location"))


@pytest.fixture(scope="session")
def listing_methods():
    return extract_tree(scan_tree(FIXTURES / "java"))


@pytest.fixture(scope="session")
def worked_train() -> list[LsdSequence]:
    """Five training descriptions: one 'deleted condition', three elastistor, one floating ip."""
    texts = ["successfully deleted condition"] + ["elastistor volume successfully deleted"] * 3 + [
        "successfully created floating ip"
    ]
    return [lsd(t, f"m{i}") for i, t in enumerate(texts)]
