"""Max-cosine set-matching similarity between language representations.

Three levels: vector-to-set (max cosine over the target set), set-to-set
(mean of the per-vector maxima, denominator = source set size), and
language-to-language (mean over shared tokens).  The directed score is
asymmetric by construction; the symmetrized grid is the arithmetic mean of
both directions.

Two computation paths exist: a blocked numpy kernel (pre-normalized rows,
matrix products, float64 accumulation) and a naive per-pair oracle
(`oracle_*`); they must agree within 1e-6 and the oracle doubles as the
fixed-summation-order path for strict reproducibility mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .representation import LanguageRepresentation, TokenEmbeddingSet


class SimilarityError(ValueError):
    pass


def cosine(u, v) -> float:
    """Plain cosine of two vectors, accumulated in double precision."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise SimilarityError(f"width mismatch: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        raise SimilarityError("cosine undefined for zero-norm vector")
    return float(np.dot(u, v)) / (nu * nv)


def _normalized(vectors: np.ndarray) -> np.ndarray:
    v = np.asarray(vectors, dtype=np.float64)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def directed_token_similarity(v, target: TokenEmbeddingSet) -> float:
    """Max cosine between v and any vector of the target set."""
    if target.size == 0:
        raise SimilarityError("empty target set")
    v = np.asarray(v, dtype=np.float64)
    if v.shape[0] != target.dim:
        raise SimilarityError(f"width mismatch: {v.shape[0]} vs {target.dim}")
    nv = np.linalg.norm(v)
    if nv == 0.0:
        raise SimilarityError("cosine undefined for zero-norm vector")
    sims = _normalized(target.vectors) @ (v / nv)
    return float(np.max(sims))


def token_set_similarity(source: TokenEmbeddingSet, target: TokenEmbeddingSet) -> float:
    """Mean over source vectors of their max cosine into the target set."""
    if source.token != target.token:
        raise SimilarityError(
            f"token mismatch: {source.token!r} vs {target.token!r}"
        )
    return _set_similarity_kernel(source.vectors, target.vectors)


def _set_similarity_kernel(source: np.ndarray, target: np.ndarray,
                           block: int = 1024) -> float:
    if source.shape[1] != target.shape[1]:
        raise SimilarityError(
            f"width mismatch: {source.shape[1]} vs {target.shape[1]}"
        )
    src = _normalized(source)
    tgt = _normalized(target)
    total = 0.0
    for start in range(0, src.shape[0], block):
        sims = src[start : start + block] @ tgt.T
        total += float(np.sum(np.max(sims, axis=1)))
    return total / src.shape[0]


def language_similarity(a: LanguageRepresentation, b: LanguageRepresentation,
                        per_token: dict[str, float] | None = None) -> float:
    """Mean of same-token set similarities over the shared token keys.

    Tokens dropped from either representation shrink the shared key set;
    per_token, when supplied, is filled with each shared token's score.
    """
    if a.dim != b.dim:
        raise SimilarityError(f"dim mismatch: {a.dim} vs {b.dim}")
    shared = sorted(set(a.sets) & set(b.sets))
    if not shared:
        raise SimilarityError(
            f"no shared tokens between {a.language!r} and {b.language!r}"
        )
    total = 0.0
    for token in shared:
        score = token_set_similarity(a.sets[token], b.sets[token])
        if per_token is not None:
            per_token[token] = score
        total += score
    return total / len(shared)


@dataclass
class SimilarityMatrix:
    languages: list[str]
    directed: np.ndarray  # cell (i, j) = sim(language i -> language j)
    symmetrized: np.ndarray
    per_token: dict[tuple[str, str], dict[str, float]] = field(default_factory=dict)

    @property
    def spread(self) -> float:
        """Max minus min of the off-diagonal symmetrized scores."""
        n = len(self.languages)
        off = self.symmetrized[~np.eye(n, dtype=bool)]
        return float(off.max() - off.min()) if off.size else 0.0


def pairwise_matrix(reps: list[LanguageRepresentation],
                    keep_per_token: bool = False,
                    strict_fp: bool = False) -> SimilarityMatrix:
    """Directed and symmetrized language-by-language similarity grids."""
    if len(reps) < 2:
        raise SimilarityError("need at least 2 representations")
    dims = {r.dim for r in reps}
    if len(dims) != 1:
        raise SimilarityError(f"representations disagree on dim: {sorted(dims)}")
    languages = [r.language for r in reps]
    if len(set(languages)) != len(languages):
        raise SimilarityError(f"duplicate language: {languages}")
    n = len(reps)
    directed = np.zeros((n, n), dtype=np.float64)
    per_token: dict[tuple[str, str], dict[str, float]] = {}
    sim_fn = oracle_language_similarity if strict_fp else language_similarity
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            breakdown: dict[str, float] | None = {} if keep_per_token else None
            try:
                directed[i, j] = sim_fn(a, b, per_token=breakdown)
            except SimilarityError as exc:
                raise SimilarityError(
                    f"pair ({a.language}, {b.language}): {exc}"
                ) from exc
            if keep_per_token:
                per_token[(a.language, b.language)] = breakdown
    symmetrized = (directed + directed.T) / 2.0
    return SimilarityMatrix(languages, directed, symmetrized, per_token)


@dataclass
class SelfSimilarityDistribution:
    language: str
    per_token_scores: dict[str, float]
    mean: float
    variance: float  # population variance over per-token scores
    excluded_singletons: int


def self_similarity(rep: LanguageRepresentation) -> SelfSimilarityDistribution:
    """Within-language consistency: each occurrence matched against the
    other occurrences of the same token, the occurrence itself excluded."""
    scores: dict[str, float] = {}
    singletons = 0
    for token in sorted(rep.sets):
        ts = rep.sets[token]
        if ts.size < 2:
            singletons += 1
            continue
        normed = _normalized(ts.vectors)
        sims = normed @ normed.T
        np.fill_diagonal(sims, -np.inf)
        scores[token] = float(np.mean(np.max(sims, axis=1)))
    if not scores:
        raise SimilarityError(
            f"{rep.language!r}: every token set is a singleton; "
            "self-similarity undefined"
        )
    values = np.array(list(scores.values()), dtype=np.float64)
    return SelfSimilarityDistribution(
        language=rep.language,
        per_token_scores=scores,
        mean=float(values.mean()),
        variance=float(values.var()),
        excluded_singletons=singletons,
    )


# ---------------------------------------------------------------------------
# Naive oracle path: plain loops, fixed summation order, no blocking.  Kept
# deliberately independent of the kernels above so the two can be checked
# against each other.

def _oracle_cosine(u, v) -> float:
    dot = nu = nv = 0.0
    for x, y in zip(u, v):
        dot += float(x) * float(y)
        nu += float(x) * float(x)
        nv += float(y) * float(y)
    return dot / math.sqrt(nu * nv)


def oracle_token_set_similarity(source: TokenEmbeddingSet,
                                target: TokenEmbeddingSet) -> float:
    total = 0.0
    for sv in source.vectors:
        best = -2.0
        for tv in target.vectors:
            best = max(best, _oracle_cosine(sv, tv))
        total += best
    return total / source.size


def oracle_language_similarity(a: LanguageRepresentation, b: LanguageRepresentation,
                               per_token: dict[str, float] | None = None) -> float:
    if a.dim != b.dim:
        raise SimilarityError(f"dim mismatch: {a.dim} vs {b.dim}")
    shared = sorted(set(a.sets) & set(b.sets))
    if not shared:
        raise SimilarityError(
            f"no shared tokens between {a.language!r} and {b.language!r}"
        )
    total = 0.0
    for token in shared:
        score = oracle_token_set_similarity(a.sets[token], b.sets[token])
        if per_token is not None:
            per_token[token] = score
        total += score
    return total / len(shared)


def oracle_pairwise_matrix(reps: list[LanguageRepresentation]) -> SimilarityMatrix:
    languages = [r.language for r in reps]
    n = len(reps)
    directed = np.zeros((n, n), dtype=np.float64)
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            directed[i, j] = oracle_language_similarity(a, b)
    return SimilarityMatrix(languages, directed, (directed + directed.T) / 2.0)


def oracle_self_similarity(rep: LanguageRepresentation) -> SelfSimilarityDistribution:
    scores: dict[str, float] = {}
    singletons = 0
    for token in sorted(rep.sets):
        ts = rep.sets[token]
        if ts.size < 2:
            singletons += 1
            continue
        total = 0.0
        for x in range(ts.size):
            best = -2.0
            for y in range(ts.size):
                if y == x:
                    continue
                best = max(best, _oracle_cosine(ts.vectors[x], ts.vectors[y]))
            total += best
        scores[token] = total / ts.size
    if not scores:
        raise SimilarityError(f"{rep.language!r}: every token set is a singleton")
    values = list(scores.values())
    mean = sum(values) / len(values)
    variance = sum((v - mean) ** 2 for v in values) / len(values)
    return SelfSimilarityDistribution(rep.language, scores, mean, variance, singletons)
