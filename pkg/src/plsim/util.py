"""Shared helpers: text escaping for TSV formats and stable seeding."""

from __future__ import annotations

import hashlib

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r", "s": " "}


def escape_field(text: str, spaces: bool = False) -> str:
    """Escape a string so it is safe inside one TSV field.

    With spaces=True, spaces are escaped too, so the result can be embedded
    in a space-separated list inside a single field.
    """
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif spaces and ch == " ":
            out.append("\\s")
        else:
            out.append(ch)
    return "".join(out)


def unescape_field(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt in _UNESCAPES:
                out.append(_UNESCAPES[nxt])
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def stable_hash(*parts) -> int:
    """Deterministic 64-bit hash, stable across processes (unlike hash())."""
    h = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")
