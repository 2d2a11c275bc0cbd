"""Model files: a versioned JSON header line followed by raw little-endian parameters."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from clonelog.corpus import Vocabulary
from clonelog.lm.ngram import NgramModel
from clonelog.lm.recurrent import PARAM_NAMES, LmHyperparams, RecurrentModel

MAGIC = b"CLONELOG-LM\n"
FORMAT_VERSION = 1
DTYPE = "<f8"


class ModelFormatError(ValueError):
    pass


def tokens_digest(tokens) -> str:
    return hashlib.sha256("\n".join(tokens).encode("utf-8")).hexdigest()[:16]


def dumps(model, config_hash: str = "") -> bytes:
    header: dict = {
        "format_version": FORMAT_VERSION,
        "model_kind": model.kind,
        "config_hash": config_hash,
        "vocab": list(model.tokens),
        "vocab_hash": tokens_digest(model.tokens),
    }
    payload = b""
    if isinstance(model, NgramModel):
        header["hyperparams"] = {"order": model.order, "k": model.k}
        header["tables"] = [
            [list(ctx), tok, n]
            for ctx in sorted(model.tables)
            for tok, n in sorted(model.tables[ctx].items())
        ]
    elif isinstance(model, RecurrentModel):
        header["hyperparams"] = model.hp.to_dict()
        header["vocab_counts"] = [model.vocab.counts.get(t, 0) for t in model.tokens]
        header["loss_curve"] = [float(x) for x in model.loss_curve]
        header["params"] = [{"name": n, "shape": list(model.params[n].shape), "dtype": DTYPE} for n in PARAM_NAMES]
        payload = b"".join(np.ascontiguousarray(model.params[n], dtype=DTYPE).tobytes(order="C") for n in PARAM_NAMES)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return MAGIC + head + b"\n" + payload


def loads(data: bytes):
    if not data.startswith(MAGIC):
        raise ModelFormatError("not a model file")
    head, _, payload = data[len(MAGIC) :].partition(b"\n")
    header = json.loads(head)
    if header.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(f"model format {header.get('format_version')} is not supported (need {FORMAT_VERSION})")
    tokens = header["vocab"]
    if tokens_digest(tokens) != header["vocab_hash"]:
        raise ModelFormatError("vocabulary hash mismatch")
    kind = header["model_kind"]
    if kind == "ngram":
        hp = header["hyperparams"]
        model = NgramModel(hp["order"], hp["k"], tokens)
        for ctx, tok, n in header["tables"]:
            model.tables[tuple(ctx)][tok] = n
        return model
    if kind == "lstm":
        vocab = Vocabulary(tokens, dict(zip(tokens, header["vocab_counts"])))
        params = {}
        offset = 0
        for spec in header["params"]:
            count = int(np.prod(spec["shape"]))
            arr = np.frombuffer(payload, dtype=spec["dtype"], count=count, offset=offset)
            params[spec["name"]] = arr.reshape(spec["shape"]).astype(np.float64)
            offset += count * np.dtype(spec["dtype"]).itemsize
        if offset != len(payload):
            raise ModelFormatError("parameter payload size does not match the header")
        model = RecurrentModel(vocab, LmHyperparams(**header["hyperparams"]), params)
        model.loss_curve = list(header["loss_curve"])
        return model
    raise ModelFormatError(f"unknown model kind {kind!r}")


def read_header(data: bytes) -> dict:
    if not data.startswith(MAGIC):
        raise ModelFormatError("not a model file")
    return json.loads(data[len(MAGIC) :].partition(b"\n")[0])


def save(model, path: str | Path, config_hash: str = "") -> None:
    Path(path).write_bytes(dumps(model, config_hash))


def load(path: str | Path):
    return loads(Path(path).read_bytes())
