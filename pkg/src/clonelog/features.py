"""Method-level log-related features, computed raw or log-aware.

Counting rules (fixed so they can be reproduced by hand):

* NTOK: word-like tokens of the whole method (identifiers, keywords, numbers)
  plus the words inside string/char literals. Punctuation is not counted.
* NOS: non-empty semicolon-terminated statements plus each control keyword
  (if, else, for, while, do, switch, try, catch, finally).
* NEXP: statements that assign, call, instantiate, or return/throw a value,
  plus one condition expression per if/while/for/switch header.
* LMET / XMET: call sites whose bare name is / is not declared in the same file.
* SLOC: physical lines spanned by the method, blank and comment lines included.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Literal

from clonelog import javalex
from clonelog.ingest import MethodDefinition, strip_logs
from clonelog.javalex import IDENT, Token

Mode = Literal["raw", "log_aware"]
NUMERIC_FEATURES = ("ntok", "nos", "nexp", "lmet", "xmet", "sloc")

_CONTROL = frozenset("if else for while do switch try catch finally".split())
_HEADERS = frozenset("if while for switch catch synchronized try".split())
_CONDITION_HEADERS = frozenset("if while for switch".split())
_ASSIGN = frozenset("= += -= *= /= %= &= |= ^= <<= >>= >>>=".split())


@dataclass(frozen=True)
class FeatureVector:
    method_id: str
    mode: str
    elps: bool
    ntok: int
    nos: int
    nexp: int
    lmet: int
    xmet: int
    sloc: int
    lwk: frozenset[str]

    def numeric(self) -> dict[str, int]:
        return {k: getattr(self, k) for k in NUMERIC_FEATURES}

    def to_record(self) -> dict:
        return {
            "method_id": self.method_id,
            "mode": self.mode,
            "elps": self.elps,
            "ntok": self.ntok,
            "nos": self.nos,
            "nexp": self.nexp,
            "lmet": self.lmet,
            "xmet": self.xmet,
            "sloc": self.sloc,
            "lwk": sorted(self.lwk),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "FeatureVector":
        return cls(
            rec["method_id"], rec["mode"], rec["elps"],
            *(rec[k] for k in NUMERIC_FEATURES), frozenset(rec["lwk"]),
        )


def _is_type_end(tok: Token) -> bool:
    if tok.kind == IDENT:
        return tok.text not in javalex.KEYWORDS or tok.text in javalex.PRIMITIVES
    return tok.is_op(">", "]")


def _is_call(toks: list[Token], i: int) -> bool:
    t = toks[i]
    if t.kind != IDENT or t.text in javalex.KEYWORDS:
        return False
    if i + 1 >= len(toks) or not toks[i + 1].is_op("("):
        return False
    if i > 0:
        prev = toks[i - 1]
        if _is_type_end(prev) or prev.is_op("@") or (prev.kind == IDENT and prev.text == "new"):
            return False
    return True


def _header_closes(toks: list[Token]) -> set[int]:
    closes = set()
    for i, t in enumerate(toks[:-1]):
        if t.kind == IDENT and t.text in _HEADERS and toks[i + 1].is_op("("):
            c = javalex.matching_close(toks, i + 1)
            if c > 0:
                closes.add(c)
    return closes


def _expression_statement(stmt: list[Token], toks: list[Token], offset: int) -> bool:
    if not stmt:
        return False
    first = stmt[0]
    if first.kind == IDENT and first.text in ("return", "throw"):
        return len(stmt) > 1
    for k, t in enumerate(stmt):
        if t.is_op(*_ASSIGN):
            return True
        if t.kind == IDENT and t.text == "new":
            return True
        if _is_call(toks, offset + k):
            return True
    return False


def _count_body(toks: list[Token], local_names: frozenset[str] | set[str]) -> dict[str, int]:
    closes = _header_closes(toks)
    nos = nexp = lmet = xmet = 0
    depth_stack = [0]
    stmt_start = 0
    for i, t in enumerate(toks):
        if t.is_op("{"):
            depth_stack.append(0)
            stmt_start = i + 1
            continue
        if t.is_op("}"):
            if len(depth_stack) > 1:
                depth_stack.pop()
            stmt_start = i + 1
            continue
        if t.is_op("("):
            depth_stack[-1] += 1
        elif t.is_op(")"):
            depth_stack[-1] -= 1
            if i in closes and depth_stack[-1] == 0:
                stmt_start = i + 1
        if t.kind == IDENT and t.text in _CONTROL and depth_stack[-1] == 0:
            nos += 1
            if t.text in _CONDITION_HEADERS and i + 1 < len(toks) and toks[i + 1].is_op("("):
                nexp += 1
            if t.text in ("else", "do", "try", "finally"):
                stmt_start = i + 1
            continue
        if t.is_op(";") and depth_stack[-1] == 0:
            stmt = toks[stmt_start:i]
            if stmt and not (stmt[0].kind == IDENT and stmt[0].text in _CONTROL):
                nos += 1
                if _expression_statement(stmt, toks, stmt_start):
                    nexp += 1
            stmt_start = i + 1
        if _is_call(toks, i):
            if t.text in local_names:
                lmet += 1
            else:
                xmet += 1
    return {"nos": nos, "nexp": nexp, "lmet": lmet, "xmet": xmet}


def _raw_vector(method: MethodDefinition, local_names, method_id: str, mode: str) -> FeatureVector:
    toks = method.tokens
    body_at = len(javalex.tokenize(method.signature))
    counts = _count_body(toks[body_at + 1 : -1], local_names)
    elps = bool(method.log_statements) if mode == "raw" else False
    lwk = frozenset(s.wrapper for s in method.log_statements) if mode == "raw" else frozenset()
    return FeatureVector(
        method_id=method_id,
        mode=mode,
        elps=elps,
        ntok=len(javalex.word_tokens(toks)),
        sloc=method.body_text.count("\n") + 1,
        lwk=lwk,
        **counts,
    )


def extract_features(
    method: MethodDefinition, local_names: Iterable[str] = (), mode: Mode = "raw"
) -> FeatureVector:
    names = frozenset(local_names)
    if mode == "raw":
        return _raw_vector(method, names, method.id, "raw")
    if mode == "log_aware":
        return _raw_vector(strip_logs(method), names, method.id, "log_aware")
    raise ValueError(f"unknown feature mode {mode!r}")


def feature_delta(a: FeatureVector, b: FeatureVector) -> dict:
    """Signed a - b for counts; ELPS as a pair; LWK as a symmetric difference."""
    delta: dict = {k: getattr(a, k) - getattr(b, k) for k in NUMERIC_FEATURES}
    delta["elps"] = (a.elps, b.elps)
    delta["lwk"] = a.lwk ^ b.lwk
    return delta


def token_bag(method: MethodDefinition) -> dict[str, int]:
    bag: dict[str, int] = {}
    for w in javalex.word_tokens(method.tokens):
        bag[w] = bag.get(w, 0) + 1
    return bag


def write_features_jsonl(vectors: Iterable[FeatureVector], fh) -> None:
    for v in vectors:
        fh.write(json.dumps(v.to_record()) + "\n")
