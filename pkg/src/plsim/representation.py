"""In-memory language representations: per-token sets of occurrence embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class RepresentationError(ValueError):
    pass


@dataclass
class TokenEmbeddingSet:
    """All sampled occurrence embeddings of one token within one language.

    vectors is an (occurrences, dim) float32 array; the row count is the
    set size that the directed set similarity averages over.
    """

    token: str
    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float32)
        if self.vectors.ndim != 2 or self.vectors.shape[0] == 0:
            raise RepresentationError(
                f"token {self.token!r}: vectors must be a non-empty 2-D array"
            )
        norms = np.linalg.norm(self.vectors.astype(np.float64), axis=1)
        if np.any(norms == 0.0):
            raise RepresentationError(f"token {self.token!r}: zero vector in set")

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass
class LanguageRepresentation:
    language: str
    encoder_tag: str
    dim: int
    sets: dict[str, TokenEmbeddingSet]
    dropped: tuple[str, ...] = ()  # common tokens absent from this language's test split

    def __post_init__(self):
        for token, ts in self.sets.items():
            if ts.dim != self.dim:
                raise RepresentationError(
                    f"token {token!r} has dim {ts.dim}, representation dim is {self.dim}"
                )

    @property
    def tokens(self) -> list[str]:
        return sorted(self.sets)
