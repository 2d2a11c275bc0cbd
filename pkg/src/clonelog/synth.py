"""Seeded generator of small Java methods, with and without logging statements."""

from __future__ import annotations

import random

from clonelog.ingest import LEVELS, MethodDefinition, SourceFile, extract_methods

_NAMES = ["count", "total", "item", "node", "value", "buffer", "request", "result", "index", "entry"]
_CALLS = ["process", "update", "validate", "flush", "load", "close", "send", "resolve"]
_RECEIVERS = ["LOG", "logger", "log"]
_WORDS = ["started", "failed", "retrying", "done", "skipping", "loaded", "cache", "request", "value", "node"]


def _expr(rng: random.Random, names: list[str]) -> str:
    kind = rng.randrange(4)
    a = rng.choice(names)
    if kind == 0:
        return f"{a} + {rng.randint(0, 9)}"
    if kind == 1:
        return f"{rng.choice(_CALLS)}({a})"
    if kind == 2:
        return f"{a}.{rng.choice(_CALLS)}()"
    return f"{a} * {rng.choice(names)}"


def _log(rng: random.Random, names: list[str]) -> str:
    words = " ".join(rng.sample(_WORDS, rng.randint(1, 4)))
    recv = rng.choice(_RECEIVERS)
    level = rng.choice(LEVELS)
    style = rng.randrange(3)
    if style == 0:
        return f'{recv}.{level}("{words}");'
    if style == 1:
        return f'{recv}.{level}("{words} " + {rng.choice(names)});'
    return f'{recv}.{level}("{words} {{}}", {rng.choice(names)}, e);'


def _statements(rng: random.Random, names: list[str], depth: int, logs: float, indent: str) -> list[str]:
    out = []
    for _ in range(rng.randint(1, 4)):
        if rng.random() < logs:
            out.append(indent + _log(rng, names))
        kind = rng.randrange(6 if depth < 2 else 3)
        v = rng.choice(names)
        if kind == 0:
            out.append(f"{indent}{v} = {_expr(rng, names)};")
        elif kind == 1:
            out.append(f"{indent}{rng.choice(_CALLS)}({v}, {rng.choice(names)});")
        elif kind == 2:
            out.append(f"{indent}int {v}{rng.randint(0, 99)} = {_expr(rng, names)};")
        elif kind == 3:
            out.append(f"{indent}if ({v} > {rng.randint(0, 9)}) {{")
            out += _statements(rng, names, depth + 1, logs, indent + "    ")
            out.append(indent + "}")
        elif kind == 4:
            out.append(f"{indent}for (int i = 0; i < {v}; i++) {{")
            out += _statements(rng, names, depth + 1, logs, indent + "    ")
            out.append(indent + "}")
        else:
            out.append(f"{indent}try {{")
            out += _statements(rng, names, depth + 1, logs, indent + "    ")
            out.append(f"{indent}}} catch (Exception e) {{")
            if rng.random() < logs:
                out.append(indent + "    " + _log(rng, names))
            out.append(f"{indent}    {rng.choice(_CALLS)}(e);")
            out.append(indent + "}")
        if rng.random() < logs / 2:
            # braceless guard around a log call
            out.append(f"{indent}if ({v} == null)")
            out.append(indent + "    " + _log(rng, names))
    return out


def method_source(seed: int, name: str = "run", logs: float = 0.3) -> str:
    """Java class text with one generated method; ``logs`` is the chance of a log before each statement."""
    rng = random.Random(seed)
    names = rng.sample(_NAMES, 4)
    params = ", ".join(f"int {n}" for n in names[:2])
    body = _statements(rng, names, 0, logs, "        ")
    lines = ["public class Gen {", f"    public void {name}({params}) {{", *body, "    }", "}", ""]
    return "\n".join(lines)


def generate_method(seed: int, name: str = "run", logs: float = 0.3, path: str = "Gen.java") -> MethodDefinition:
    (m,) = extract_methods(SourceFile(path, method_source(seed, name, logs), "synth"))
    return m


def mutate_source(src: str, seed: int) -> str:
    """Rename one identifier throughout, giving a Type-2 style near-clone."""
    rng = random.Random(seed)
    present = [n for n in _NAMES if n in src]
    if not present:
        return src
    old = rng.choice(present)
    return src.replace(old, old + "X")
