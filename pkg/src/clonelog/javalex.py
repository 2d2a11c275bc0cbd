"""Token-level Java lexer.

Enough of the Java surface syntax to find method boundaries and logging
calls: identifiers, keywords, numeric/char/string literals (with escapes),
comments, operators and separators. No grammar beyond that.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

IDENT = "ident"
NUMBER = "number"
STRING = "string"
CHAR = "char"
OP = "op"
COMMENT = "comment"

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized this
    throw throws transient try void volatile while true false null var record
    yield""".split()
)

PRIMITIVES = frozenset("boolean byte char short int long float double void var".split())

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<textblock>\"\"\"(?:\\.|[^\\])*?\"\"\")
  | (?P<string>"(?:\\.|[^"\\\n])*")
  | (?P<char>'(?:\\.|[^'\\\n])+')
  | (?P<number>(?:0[xX][0-9a-fA-F_]+|0[bB][01_]+|(?:\d[\d_]*\.?[\d_]*|\.\d[\d_]*)(?:[eE][+-]?\d+)?)[lLfFdD]?)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<op>>>>=|<<=|>>=|\.\.\.|->|::|\+\+|--|&&|\|\||[=!<>+\-*/%&|^]=|[{}()\[\];,.@=<>!~?:+\-*/&|^%])
    """,
    re.VERBOSE | re.DOTALL,
)


class LexError(ValueError):
    """Raised when the input contains a character no token rule accepts."""


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int  # character offset into the lexed text
    end: int
    line: int  # 1-based line of the first character

    @property
    def end_line(self) -> int:
        return self.line + self.text.count("\n")

    def is_op(self, *texts: str) -> bool:
        return self.kind == OP and self.text in texts

    @property
    def is_word(self) -> bool:
        return self.kind in (IDENT, NUMBER)


def tokenize(text: str, keep_comments: bool = False) -> list[Token]:
    tokens: list[Token] = []
    pos, line, n = 0, 1, len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"unexpected character {text[pos]!r} at line {line}")
        kind = m.lastgroup
        chunk = m.group()
        if kind == "textblock":
            kind = STRING
        if kind != "ws" and (kind != COMMENT or keep_comments):
            tokens.append(Token(kind, chunk, pos, m.end(), line))
        line += chunk.count("\n")
        pos = m.end()
    return tokens


def blank_comments(text: str) -> str:
    """Replace every comment by spaces, keeping newlines so line numbers hold."""
    out = []
    last = 0
    for tok in tokenize(text, keep_comments=True):
        if tok.kind == COMMENT:
            out.append(text[last : tok.start])
            out.append(re.sub(r"[^\n]", " ", tok.text))
            last = tok.end
    out.append(text[last:])
    return "".join(out)


def string_value(tok: Token) -> str:
    """Literal contents without the surrounding quotes, escapes left as written."""
    if tok.text.startswith('"""'):
        return tok.text[3:-3]
    return tok.text[1:-1]


_WORD_RE = re.compile(r"[A-Za-z0-9_]+")


def word_tokens(tokens: list[Token]) -> list[str]:
    """Word-like tokens: identifiers, keywords, numbers and the words inside literals."""
    words: list[str] = []
    for tok in tokens:
        if tok.kind in (IDENT, NUMBER):
            words.append(tok.text)
        elif tok.kind in (STRING, CHAR):
            words.extend(_WORD_RE.findall(string_value(tok)))
    return words


def matching_close(tokens: list[Token], i: int) -> int:
    """Index of the bracket closing tokens[i], or -1 if unbalanced."""
    opener = tokens[i].text
    closer = {"(": ")", "{": "}", "[": "]"}[opener]
    depth = 0
    for j in range(i, len(tokens)):
        t = tokens[j]
        if t.kind != OP:
            continue
        if t.text == opener:
            depth += 1
        elif t.text == closer:
            depth -= 1
            if depth == 0:
                return j
    return -1
