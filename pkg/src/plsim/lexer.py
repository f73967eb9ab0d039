"""Declarative, comment-aware tokenization of source text.

Each language is described by a LexerSpec (comment markers, string
delimiters, identifier character classes, operator list).  The scanner uses
longest-match at every position with the fixed precedence
STRING > COMMENT > NUMBER > IDENTIFIER > OPERATOR, so comment markers inside
string literals never open comments.  Whitespace is skipped, every other
byte belongs to exactly one token.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass, field
from pathlib import Path

from .util import unescape_field


class LexerSpecError(ValueError):
    pass


class TokenKind(enum.Enum):
    IDENTIFIER = "IDENTIFIER"
    NUMBER = "NUMBER"
    STRING = "STRING"
    OPERATOR = "OPERATOR"
    COMMENT = "COMMENT"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Token:
    lexeme: str
    kind: TokenKind
    start: int
    end: int
    line: int


class CharClass:
    """Character set parsed from a compact range spec like "a-zA-Z0-9_-"."""

    def __init__(self, spec: str):
        self.spec = spec
        chars = set()
        i = 0
        while i < len(spec):
            if i + 2 < len(spec) and spec[i + 1] == "-":
                lo, hi = ord(spec[i]), ord(spec[i + 2])
                if lo > hi:
                    raise LexerSpecError(f"bad range in charset: {spec[i:i+3]!r}")
                chars.update(chr(c) for c in range(lo, hi + 1))
                i += 3
            else:
                chars.add(spec[i])
                i += 1
        self._chars = frozenset(chars)

    def __contains__(self, ch: str) -> bool:
        return ch in self._chars

    def __repr__(self):
        return f"CharClass({self.spec!r})"


@dataclass(frozen=True)
class BlockComment:
    open: str
    close: str
    nesting: bool = False


@dataclass(frozen=True)
class StringRule:
    open: str
    close: str
    escape: str | None = None


_NUMBER_CONT = set("0123456789abcdefghijklmnopqrstuvwxyz" "ABCDEFGHIJKLMNOPQRSTUVWXYZ_.")


@dataclass(frozen=True)
class LexerSpec:
    language: str
    line_comments: tuple[str, ...] = ()
    block_comments: tuple[BlockComment, ...] = ()
    strings: tuple[StringRule, ...] = ()
    ident_first: CharClass = field(default_factory=lambda: CharClass("a-zA-Z_"))
    ident_rest: CharClass = field(default_factory=lambda: CharClass("a-zA-Z0-9_"))
    operators: tuple[str, ...] = ()
    case_sensitive: bool = True

    def __post_init__(self):
        if not self.language:
            raise LexerSpecError("language must be non-empty")
        for a in self.line_comments:
            if not a:
                raise LexerSpecError("empty line-comment prefix")
            for b in self.line_comments:
                if a is not b and b.startswith(a):
                    raise LexerSpecError(
                        f"ambiguous line-comment prefixes: {a!r} is a prefix of {b!r}"
                    )
        for bc in self.block_comments:
            if not bc.open or not bc.close:
                raise LexerSpecError("block-comment delimiters must be non-empty")
        for sr in self.strings:
            if not sr.open or not sr.close:
                raise LexerSpecError("string delimiters must be non-empty")

    def fold(self, lexeme: str) -> str:
        """Canonical string form of a lexeme for vocabulary purposes."""
        return lexeme if self.case_sensitive else lexeme.lower()


def tokenize(source: str, spec: LexerSpec, diagnostics: list[str] | None = None) -> list[Token]:
    """Tokenize source text; pure function of (source, spec).

    Unterminated strings or block comments extend to end of input, keep
    their kind, and record a diagnostic (non-fatal).
    """
    tokens: list[Token] = []
    newlines = [i for i, c in enumerate(source) if c == "\n"]
    n = len(source)
    # string/comment openers sorted longest-first for the longest-match rule
    str_rules = sorted(spec.strings, key=lambda r: -len(r.open))
    line_prefixes = sorted(spec.line_comments, key=len, reverse=True)
    block_rules = sorted(spec.block_comments, key=lambda r: -len(r.open))
    op_lengths = sorted({len(o) for o in spec.operators}, reverse=True)
    op_set = set(spec.operators)

    def emit(start: int, end: int, kind: TokenKind):
        tokens.append(
            Token(source[start:end], kind, start, end, bisect_right(newlines, start) + 1)
        )

    pos = 0
    while pos < n:
        ch = source[pos]
        if ch.isspace():
            pos += 1
            continue

        rule = next((r for r in str_rules if source.startswith(r.open, pos)), None)
        if rule is not None:
            i = pos + len(rule.open)
            end = None
            while i < n:
                if rule.escape and source[i] == rule.escape:
                    i += 2
                    continue
                if source.startswith(rule.close, i):
                    end = i + len(rule.close)
                    break
                i += 1
            if end is None:
                end = n
                if diagnostics is not None:
                    diagnostics.append(f"unterminated string starting at byte {pos}")
            emit(pos, end, TokenKind.STRING)
            pos = end
            continue

        prefix = next((p for p in line_prefixes if source.startswith(p, pos)), None)
        if prefix is not None:
            nl = source.find("\n", pos)
            end = n if nl < 0 else nl
            emit(pos, end, TokenKind.COMMENT)
            pos = end
            continue

        brule = next((r for r in block_rules if source.startswith(r.open, pos)), None)
        if brule is not None:
            depth = 1
            i = pos + len(brule.open)
            end = None
            while i < n:
                if brule.nesting and source.startswith(brule.open, i):
                    depth += 1
                    i += len(brule.open)
                    continue
                if source.startswith(brule.close, i):
                    depth -= 1
                    i += len(brule.close)
                    if depth == 0:
                        end = i
                        break
                    continue
                i += 1
            if end is None:
                end = n
                if diagnostics is not None:
                    diagnostics.append(f"unterminated block comment starting at byte {pos}")
            emit(pos, end, TokenKind.COMMENT)
            pos = end
            continue

        if ch.isdigit():
            i = pos + 1
            while i < n and source[i] in _NUMBER_CONT:
                i += 1
            emit(pos, i, TokenKind.NUMBER)
            pos = i
            continue

        if ch in spec.ident_first:
            i = pos + 1
            while i < n and source[i] in spec.ident_rest:
                i += 1
            emit(pos, i, TokenKind.IDENTIFIER)
            pos = i
            continue

        matched = False
        for length in op_lengths:
            if pos + length <= n and source[pos : pos + length] in op_set:
                emit(pos, pos + length, TokenKind.OPERATOR)
                pos += length
                matched = True
                break
        if matched:
            continue

        emit(pos, pos + 1, TokenKind.OTHER)
        pos += 1

    return tokens


def strip_comments(tokens: list[Token]) -> list[Token]:
    return [t for t in tokens if t.kind is not TokenKind.COMMENT]


# ---------------------------------------------------------------------------
# Spec files: line-oriented `key = value`, repeated keys accumulate lists.

def parse_spec(text: str) -> LexerSpec:
    fields: dict = {
        "language": None,
        "case_sensitive": True,
        "line_comments": [],
        "block_comments": [],
        "strings": [],
        "ident_first": "a-zA-Z_",
        "ident_rest": "a-zA-Z0-9_",
        "operators": [],
    }
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise LexerSpecError(f"line {lineno}: expected `key = value`")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        parts = [unescape_field(p) for p in value.split()]
        if key == "language":
            fields["language"] = value
        elif key == "case_sensitive":
            fields["case_sensitive"] = value.lower() in ("true", "1", "yes")
        elif key == "line_comment":
            fields["line_comments"].append(unescape_field(value))
        elif key == "block_comment":
            if len(parts) not in (2, 3):
                raise LexerSpecError(f"line {lineno}: block_comment wants `open close [nest]`")
            nesting = len(parts) == 3 and parts[2] == "nest"
            fields["block_comments"].append(BlockComment(parts[0], parts[1], nesting))
        elif key == "string":
            if len(parts) != 3:
                raise LexerSpecError(f"line {lineno}: string wants `open close escape|none`")
            esc = None if parts[2] == "none" else parts[2]
            fields["strings"].append(StringRule(parts[0], parts[1], esc))
        elif key == "ident_first":
            fields["ident_first"] = value
        elif key == "ident_rest":
            fields["ident_rest"] = value
        elif key == "operator":
            fields["operators"].extend(parts)
        else:
            raise LexerSpecError(f"line {lineno}: unknown key {key!r}")
    if not fields["language"]:
        raise LexerSpecError("spec missing `language`")
    return LexerSpec(
        language=fields["language"],
        line_comments=tuple(fields["line_comments"]),
        block_comments=tuple(fields["block_comments"]),
        strings=tuple(fields["strings"]),
        ident_first=CharClass(fields["ident_first"]),
        ident_rest=CharClass(fields["ident_rest"]),
        operators=tuple(fields["operators"]),
        case_sensitive=fields["case_sensitive"],
    )


def load_spec(path: str | Path) -> LexerSpec:
    return parse_spec(Path(path).read_text(encoding="utf-8"))


_SPEC_DIR = Path(__file__).parent / "specs"


def builtin_spec_names() -> list[str]:
    return sorted(p.stem for p in _SPEC_DIR.glob("*.lexspec"))


def builtin_spec(name: str) -> LexerSpec:
    path = _SPEC_DIR / f"{name}.lexspec"
    if not path.exists():
        raise LexerSpecError(f"no built-in lexer spec named {name!r}")
    return load_spec(path)
