"""Deterministic sampling of token occurrences from the test partition.

Occurrence positions index into each file's comment-inclusive token stream
and context windows keep comment tokens (the encoder sees them even though
the vocabulary excludes them).  Sampling uses a per-token sub-seed derived
from (seed, token), so results do not depend on scheduling order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from ..corpus import LanguageCorpus, Partition
from ..lexer import LexerSpec, TokenKind, tokenize
from ..util import escape_field, stable_hash, unescape_field


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class OccurrenceSample:
    token: str
    file_index: int  # index into corpus.files
    position: int  # token index in the file's comment-inclusive stream
    context: tuple[str, ...]  # lexemes t_{n-l} .. t_{n+r}, truncated at file bounds
    target_offset: int  # index of the target token within context

    def __post_init__(self):
        if self.context[self.target_offset] != self.token and not self._case_folded():
            raise SamplingError(
                f"context[{self.target_offset}] is "
                f"{self.context[self.target_offset]!r}, expected {self.token!r}"
            )

    def _case_folded(self) -> bool:
        return self.context[self.target_offset].lower() == self.token.lower()


def token_streams(corpus: LanguageCorpus, spec: LexerSpec,
                  partition: Partition | None = None) -> dict[int, list]:
    """Comment-inclusive token list per file index, optionally one partition."""
    streams = {}
    for idx, f in enumerate(corpus.files):
        if partition is not None and f.partition is not partition:
            continue
        streams[idx] = tokenize(f.text, spec)
    return streams


def sample_occurrences(corpus: LanguageCorpus, spec: LexerSpec, token: str,
                       max_samples: int, seed: int,
                       left_context: int = 64, right_context: int = 64,
                       streams: dict[int, list] | None = None) -> list[OccurrenceSample]:
    """Uniform draw without replacement over all test-partition occurrences.

    Only non-comment occurrences count (a matching lexeme inside a comment
    is not an occurrence of the token), but context windows do include
    comment tokens.  `streams` lets callers reuse pre-lexed test files.
    """
    if max_samples < 1:
        raise SamplingError("max_samples must be >= 1")
    if streams is None:
        streams = token_streams(corpus, spec, Partition.TEST)
    occurrences = [
        (file_idx, pos)
        for file_idx, tokens in sorted(streams.items())
        for pos, tok in enumerate(tokens)
        if tok.kind is not TokenKind.COMMENT and spec.fold(tok.lexeme) == token
    ]
    if not occurrences:
        raise SamplingError(
            f"token {token!r} has no comment-excluded occurrence in the test partition"
        )
    rng = random.Random(stable_hash(seed, token))
    k = min(max_samples, len(occurrences))
    chosen = sorted(rng.sample(occurrences, k))
    samples = []
    for file_idx, pos in chosen:
        tokens = streams[file_idx]
        start = max(0, pos - left_context)
        end = min(len(tokens), pos + right_context + 1)
        context = tuple(t.lexeme for t in tokens[start:end])
        samples.append(
            OccurrenceSample(token, file_idx, pos, context, pos - start)
        )
    return samples


# ---------------------------------------------------------------------------
# Samples file ("plsim-samples v1"): the export consumed by external
# extraction tools, so both embedding paths see identical occurrences.

def save_samples(samples: list[OccurrenceSample], language: str,
                 path: str | Path) -> None:
    lines = [f"#plsim-samples v1 language={language}"]
    for s in samples:
        occ_id = f"f{s.file_index}p{s.position}"
        context = " ".join(escape_field(lex, spaces=True) for lex in s.context)
        lines.append(
            f"{occ_id}\t{escape_field(s.token)}\t{context}\t{s.target_offset}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_samples(path: str | Path) -> tuple[str, list[OccurrenceSample]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#plsim-samples v1"):
        raise SamplingError(f"{path}: not a plsim-samples v1 file")
    header = dict(kv.split("=", 1) for kv in lines[0].split()[1:] if "=" in kv)
    samples = []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        occ_id, raw_token, raw_context, raw_offset = ln.split("\t")
        file_index, position = occ_id.lstrip("f").split("p")
        samples.append(
            OccurrenceSample(
                token=unescape_field(raw_token),
                file_index=int(file_index),
                position=int(position),
                context=tuple(unescape_field(c) for c in raw_context.split(" ")),
                target_offset=int(raw_offset),
            )
        )
    return header.get("language", ""), samples
