"""Byte-pair subword vocabulary learned from lexer-token lexemes.

Each lexeme is segmented independently (no cross-token merges), so the
target token of an occurrence always maps to a contiguous piece span.
Merge order is deterministic: most frequent pair first, lexicographic
tie-break.
"""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path


PAD, UNK, MASK = "[PAD]", "[UNK]", "[MASK]"
SPECIALS = (PAD, UNK, MASK)


class SubwordVocab:
    def __init__(self, pieces: list[str], merges: list[tuple[str, str]]):
        self.pieces = list(pieces)
        self.merges = [tuple(m) for m in merges]
        self.piece_to_id = {p: i for i, p in enumerate(self.pieces)}
        self._ranks = {pair: i for i, pair in enumerate(self.merges)}
        self._cache: dict[str, list[int]] = {}

    def __len__(self) -> int:
        return len(self.pieces)

    @property
    def pad_id(self) -> int:
        return self.piece_to_id[PAD]

    @property
    def unk_id(self) -> int:
        return self.piece_to_id[UNK]

    @property
    def mask_id(self) -> int:
        return self.piece_to_id[MASK]

    def segment(self, lexeme: str) -> list[str]:
        """Apply learned merges to one lexeme, lowest merge rank first."""
        symbols = list(lexeme)
        while len(symbols) > 1:
            pairs = [(symbols[i], symbols[i + 1]) for i in range(len(symbols) - 1)]
            ranked = [(self._ranks[p], i) for i, p in enumerate(pairs) if p in self._ranks]
            if not ranked:
                break
            _, idx = min(ranked)
            symbols[idx : idx + 2] = [symbols[idx] + symbols[idx + 1]]
        return symbols

    def encode(self, lexeme: str) -> list[int]:
        if lexeme not in self._cache:
            self._cache[lexeme] = [
                self.piece_to_id.get(p, self.unk_id) for p in self.segment(lexeme)
            ]
        return self._cache[lexeme]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps({"pieces": self.pieces, "merges": self.merges}),
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "SubwordVocab":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data["pieces"], [tuple(m) for m in data["merges"]])


def train_bpe(lexeme_counts: Counter[str] | dict[str, int], vocab_size: int) -> SubwordVocab:
    """Learn byte-pair merges until the piece inventory reaches vocab_size."""
    words = {lex: (list(lex), count) for lex, count in lexeme_counts.items() if lex}
    alphabet = sorted({ch for lex in words for ch in lex})
    pieces = list(SPECIALS) + alphabet
    merges: list[tuple[str, str]] = []
    while len(pieces) < vocab_size:
        pair_counts: Counter[tuple[str, str]] = Counter()
        for symbols, count in words.values():
            for i in range(len(symbols) - 1):
                pair_counts[(symbols[i], symbols[i + 1])] += count
        if not pair_counts:
            break
        best = min(pair_counts, key=lambda p: (-pair_counts[p], p))
        merges.append(best)
        merged = best[0] + best[1]
        pieces.append(merged)
        for lex, (symbols, count) in words.items():
            i = 0
            while i < len(symbols) - 1:
                if (symbols[i], symbols[i + 1]) == best:
                    symbols[i : i + 2] = [merged]
                else:
                    i += 1
    return SubwordVocab(pieces, merges)
