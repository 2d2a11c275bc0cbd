"""Scan Java sources, extract method definitions and the logging calls inside them."""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator

from clonelog import javalex
from clonelog.javalex import IDENT, OP, STRING, Token

logger = logging.getLogger(__name__)

LEVELS = ("trace", "debug", "info", "warn", "error", "fatal")
UNKNOWN_LEVEL = "unknown"

_MODIFIERS = frozenset(
    "public protected private static final synchronized native abstract strictfp default".split()
)
_CONTROL_WITH_CONDITION = frozenset({"if", "while", "for"})


class ExtractionError(ValueError):
    """A file whose structure the extractor cannot delimit (e.g. unbalanced braces)."""


@dataclass(frozen=True)
class LwkConfig:
    """Which call targets count as logging statements.

    A call ``recv.method(...)`` matches when ``recv`` equals one of
    ``receivers`` (case-insensitive) and ``method`` is one of ``levels``.
    ``bare_wrappers`` lists unqualified helpers such as ``log(...)``.
    """

    receivers: tuple[str, ...] = ("log", "logger", "mylogger")
    levels: tuple[str, ...] = LEVELS
    bare_wrappers: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.receivers and not self.bare_wrappers:
            raise ValueError("LWK configuration must name at least one wrapper")

    def matches_receiver(self, name: str) -> bool:
        return name.lower() in {r.lower() for r in self.receivers}

    def level_of(self, method: str) -> str | None:
        m = method.lower()
        return m if m in {lv.lower() for lv in self.levels} else None


DEFAULT_LWK = LwkConfig()


@dataclass(frozen=True)
class SourceFile:
    path: str  # posix path relative to the scanned root
    content: str
    project_id: str


@dataclass(frozen=True)
class LogStatement:
    wrapper: str
    level: str
    description_raw: str
    argument_exprs: tuple[str, ...]
    span: tuple[int, int]  # file lines, 1-based inclusive
    char_span: tuple[int, int] = field(default=(0, 0), compare=False)  # offsets into body_text

    def to_record(self) -> dict:
        return {
            "level": self.level,
            "description": self.description_raw,
            "args": list(self.argument_exprs),
            "start_line": self.span[0],
        }


@dataclass(frozen=True)
class MethodDefinition:
    id: str
    name: str
    signature: str
    body_text: str  # comments blanked to spaces, newlines kept
    line_span: tuple[int, int]
    log_statements: tuple[LogStatement, ...]
    source_file: SourceFile

    @cached_property
    def tokens(self) -> list[Token]:
        return javalex.tokenize(self.body_text)

    @property
    def body_tokens(self) -> list[str]:
        return [t.text for t in self.tokens]

    @property
    def is_stripped(self) -> bool:
        return self.id.endswith("'")

    @property
    def has_logs(self) -> bool:
        return bool(self.log_statements)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "project": self.source_file.project_id,
            "path": self.source_file.path,
            "start_line": self.line_span[0],
            "end_line": self.line_span[1],
            "signature": self.signature,
            "body": self.body_text,
            "logs": [s.to_record() for s in self.log_statements],
        }


def scan_tree(
    root: str | Path,
    include_globs: Iterable[str] = ("*.java",),
    project_id: str | None = None,
    diagnostics: list[dict] | None = None,
) -> list[SourceFile]:
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"cannot read source root {root}")
    globs = list(include_globs)
    project = project_id or root.resolve().name
    files = []
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root)
        if not any(rel.match(g) for g in globs):
            continue
        try:
            content = path.read_text(encoding="utf-8")
        except (UnicodeDecodeError, OSError) as exc:
            logger.warning("skipping %s: %s", rel, exc)
            if diagnostics is not None:
                diagnostics.append({"path": rel.as_posix(), "error": str(exc)})
            continue
        files.append(SourceFile(rel.as_posix(), content, project))
    files.sort(key=lambda f: f.path)
    return files


def _declared_types(tokens: list[Token]) -> set[str]:
    names = set()
    for a, b in zip(tokens, tokens[1:]):
        if a.kind == IDENT and a.text in ("class", "enum", "record", "interface") and b.kind == IDENT:
            names.add(b.text)
    return names


def _is_type_end(tok: Token) -> bool:
    if tok.kind == IDENT:
        return tok.text not in javalex.KEYWORDS or tok.text in javalex.PRIMITIVES or tok.text in _MODIFIERS
    return tok.is_op(">", "]")


def _declaration_start(tokens: list[Token], name_idx: int) -> int:
    j = name_idx - 1
    while j >= 0:
        t = tokens[j]
        if t.is_op(";", "{", "}"):
            break
        if t.is_op(")"):
            depth = 0
            while j >= 0:
                if tokens[j].is_op(")"):
                    depth += 1
                elif tokens[j].is_op("("):
                    depth -= 1
                    if depth == 0:
                        break
                j -= 1
        j -= 1
    return j + 1


def _body_open(tokens: list[Token], close_paren: int) -> int:
    """Index of the body's ``{`` after a parameter list, or -1."""
    k = close_paren + 1
    if k < len(tokens) and tokens[k].kind == IDENT and tokens[k].text == "throws":
        k += 1
        while k < len(tokens) and (tokens[k].kind == IDENT or tokens[k].is_op(".", ",", "<", ">", "?")):
            k += 1
    if k < len(tokens) and tokens[k].is_op("{"):
        return k
    return -1


def _method_id(project: str, path: str, start_line: int, signature: str) -> str:
    digest = hashlib.sha1(signature.encode("utf-8")).hexdigest()[:8]
    return f"{project}:{path}:{start_line}:{digest}"


def extract_methods(file: SourceFile, lwk: LwkConfig = DEFAULT_LWK) -> list[MethodDefinition]:
    """Methods and constructors with a body; nested types stay inside their enclosing method."""
    blanked = javalex.blank_comments(file.content)
    tokens = javalex.tokenize(blanked)
    opens = sum(1 for t in tokens if t.is_op("{"))
    closes = sum(1 for t in tokens if t.is_op("}"))
    if opens != closes:
        raise ExtractionError(f"{file.path}: unbalanced braces ({opens} open, {closes} close)")
    type_names = _declared_types(tokens)

    methods = []
    i = 1
    while i < len(tokens) - 1:
        tok = tokens[i]
        if not (tok.kind == IDENT and tok.text not in javalex.KEYWORDS and tokens[i + 1].is_op("(")):
            i += 1
            continue
        prev = tokens[i - 1]
        is_ctor = prev.is_op("{", "}", ";") and tok.text in type_names
        if not (_is_type_end(prev) or is_ctor):
            i += 1
            continue
        close = javalex.matching_close(tokens, i + 1)
        body = _body_open(tokens, close) if close > 0 else -1
        if body < 0:
            i += 1
            continue
        end = javalex.matching_close(tokens, body)
        if end < 0:
            raise ExtractionError(f"{file.path}: unterminated body for {tok.text} at line {tok.line}")
        start = _declaration_start(tokens, i)
        signature = " ".join(t.text for t in tokens[start:body])
        start_line = tokens[start].line
        m = MethodDefinition(
            id=_method_id(file.project_id, file.path, start_line, signature),
            name=tok.text,
            signature=signature,
            body_text=blanked[tokens[start].start : tokens[end].end],
            line_span=(start_line, tokens[end].line),
            log_statements=(),
            source_file=file,
        )
        methods.append(_with_logs(m, lwk))
        i = end + 1
    return methods


def _with_logs(m: MethodDefinition, lwk: LwkConfig) -> MethodDefinition:
    logs = tuple(detect_log_statements(m, lwk))
    return MethodDefinition(m.id, m.name, m.signature, m.body_text, m.line_span, logs, m.source_file)


def _split_top(tokens: list[Token], sep: str) -> list[list[Token]]:
    parts: list[list[Token]] = [[]]
    depth = 0
    for t in tokens:
        if t.is_op("(", "[", "{"):
            depth += 1
        elif t.is_op(")", "]", "}"):
            depth -= 1
        if depth == 0 and t.is_op(sep):
            parts.append([])
        else:
            parts[-1].append(t)
    return parts


def _statement_start(tokens: list[Token], k: int) -> int:
    """Walk back over a qualified receiver chain such as ``this.LOG`` or ``Foo.LOG``."""
    while k >= 2 and tokens[k - 1].is_op(".") and tokens[k - 2].kind == IDENT:
        k -= 2
    return k


def _at_statement_level(tokens: list[Token], k: int) -> bool:
    if k == 0:
        return True
    prev = tokens[k - 1]
    return prev.is_op(";", "{", "}", ")", "->", ":") or (prev.kind == IDENT and prev.text in ("else", "do"))


def detect_log_statements(method: MethodDefinition, lwk: LwkConfig = DEFAULT_LWK) -> list[LogStatement]:
    toks = method.tokens
    text = method.body_text
    line0 = method.line_span[0] - 1
    found = []
    i = 0
    while i < len(toks):
        t = toks[i]
        wrapper = level = None
        call_open = -1
        if (
            t.kind == IDENT
            and i + 3 < len(toks)
            and lwk.matches_receiver(t.text)
            and toks[i + 1].is_op(".")
            and toks[i + 2].kind == IDENT
            and toks[i + 3].is_op("(")
            and lwk.level_of(toks[i + 2].text)
        ):
            wrapper = f"{t.text}.{toks[i + 2].text}"
            level = lwk.level_of(toks[i + 2].text)
            call_open = i + 3
        elif (
            t.kind == IDENT
            and t.text in lwk.bare_wrappers
            and i + 1 < len(toks)
            and toks[i + 1].is_op("(")
            and not (i > 0 and toks[i - 1].is_op("."))
        ):
            wrapper, level, call_open = t.text, UNKNOWN_LEVEL, i + 1
        if wrapper is None:
            i += 1
            continue
        start = _statement_start(toks, i)
        if not _at_statement_level(toks, start):
            i += 1
            continue
        close = javalex.matching_close(toks, call_open)
        semi = -1
        if close > 0:
            depth = 0
            for k in range(close + 1, len(toks)):
                if toks[k].is_op("(", "[", "{"):
                    depth += 1
                elif toks[k].is_op(")", "]", "}"):
                    depth -= 1
                    if depth < 0:
                        break
                elif depth == 0 and toks[k].is_op(";"):
                    semi = k
                    break
        if semi < 0:
            # unreadable: drop what we can up to the next semicolon
            semi = next((k for k in range(call_open, len(toks)) if toks[k].is_op(";")), len(toks) - 2)
            stmt = LogStatement(
                wrapper, UNKNOWN_LEVEL, "", (),
                (line0 + toks[start].line, line0 + toks[semi].end_line),
                (toks[start].start, toks[semi].end),
            )
        else:
            description, exprs = _parse_arguments(toks[call_open + 1 : close], text)
            stmt = LogStatement(
                wrapper, level, description, tuple(exprs),
                (line0 + toks[start].line, line0 + toks[semi].end_line),
                (toks[start].start, toks[semi].end),
            )
        found.append(stmt)
        i = semi + 1
    return found


def _parse_arguments(arg_tokens: list[Token], text: str) -> tuple[str, list[str]]:
    pieces: list[str] = []
    exprs: list[str] = []
    gap = False
    if not arg_tokens:
        return "", exprs
    for arg in _split_top(arg_tokens, ","):
        for operand in _split_top(arg, "+"):
            if not operand:
                continue
            if len(operand) == 1 and operand[0].kind == STRING:
                value = javalex.string_value(operand[0])
                if gap and pieces and value and not pieces[-1][-1:].isspace() and not value[0].isspace():
                    pieces.append(" ")
                pieces.append(value)
                gap = False
            else:
                exprs.append(re.sub(r"\s+", " ", text[operand[0].start : operand[-1].end]).strip())
                gap = True
    return "".join(pieces), exprs


def _header_keyword_before(toks: list[Token], k: int) -> str | None:
    """Keyword owning the token before index k when the statement is a braceless body."""
    if k == 0:
        return None
    prev = toks[k - 1]
    if prev.kind == IDENT and prev.text in ("else", "do"):
        return prev.text
    if prev.is_op(")"):
        depth = 0
        for j in range(k - 1, -1, -1):
            if toks[j].is_op(")"):
                depth += 1
            elif toks[j].is_op("("):
                depth -= 1
                if depth == 0:
                    if j > 0 and toks[j - 1].kind == IDENT and toks[j - 1].text in _CONTROL_WITH_CONDITION:
                        return toks[j - 1].text
                    return None
    return None


def strip_logs(method: MethodDefinition) -> MethodDefinition:
    """The method with every logging statement removed (the primed variant)."""
    new_id = method.id if method.is_stripped else method.id + "'"
    if not method.log_statements:
        if new_id == method.id:
            return method
        return MethodDefinition(new_id, method.name, method.signature, method.body_text,
                                method.line_span, (), method.source_file)
    text = method.body_text
    toks = method.tokens
    offset_index = {t.start: n for n, t in enumerate(toks)}
    edits = []  # (start, end, replacement)
    for stmt in method.log_statements:
        s, e = stmt.char_span
        if _header_keyword_before(toks, offset_index[s]):
            edits.append((s, e, ";"))
            continue
        line_start = text.rfind("\n", 0, s) + 1
        line_end = text.find("\n", e)
        line_end = len(text) if line_end < 0 else line_end
        if text[line_start:s].strip() == "" and text[e:line_end].strip() == "" and line_end < len(text):
            edits.append((line_start, line_end + 1, ""))
        else:
            edits.append((s, e, ""))
    out = []
    last = 0
    for s, e, rep in sorted(edits):
        s = max(s, last)
        out.append(text[last:s])
        out.append(rep)
        last = max(last, e)
    out.append(text[last:])
    body = "".join(out)
    start = method.line_span[0]
    return MethodDefinition(
        new_id, method.name, method.signature, body,
        (start, start + body.count("\n")), (), method.source_file,
    )


def extract_tree(
    files: Iterable[SourceFile], lwk: LwkConfig = DEFAULT_LWK, diagnostics: list[dict] | None = None
) -> list[MethodDefinition]:
    methods = []
    for f in sorted(files, key=lambda f: f.path):
        try:
            methods.extend(extract_methods(f, lwk))
        except (ExtractionError, javalex.LexError) as exc:
            logger.warning("skipping %s: %s", f.path, exc)
            if diagnostics is not None:
                diagnostics.append({"path": f.path, "error": str(exc)})
    return methods


def local_method_names(methods: Iterable[MethodDefinition]) -> dict[str, frozenset[str]]:
    """Per source path, the names of methods declared in that file."""
    names: dict[str, set[str]] = {}
    for m in methods:
        names.setdefault(m.source_file.path, set()).add(m.name)
    return {k: frozenset(v) for k, v in names.items()}


def method_from_record(rec: dict, lwk: LwkConfig = DEFAULT_LWK) -> MethodDefinition:
    src = SourceFile(rec["path"], "", rec["project"])
    sig_tokens = javalex.tokenize(rec["signature"])
    name = next(
        (a.text for a, b in zip(sig_tokens, sig_tokens[1:]) if a.kind == IDENT and b.is_op("(")),
        "",
    )
    m = MethodDefinition(
        rec["id"], name, rec["signature"], rec["body"],
        (rec["start_line"], rec["end_line"]), (), src,
    )
    m = _with_logs(m, lwk)
    if len(m.log_statements) != len(rec["logs"]):
        raise ValueError(f"{rec['id']}: stored log count does not match re-detection under this LWK config")
    return m


def write_methods_jsonl(methods: Iterable[MethodDefinition], fh) -> None:
    for m in methods:
        fh.write(json.dumps(m.to_record(), ensure_ascii=False) + "\n")


def read_methods_jsonl(lines: Iterable[str], lwk: LwkConfig = DEFAULT_LWK) -> Iterator[MethodDefinition]:
    for line in lines:
        line = line.strip()
        if line:
            yield method_from_record(json.loads(line), lwk)
