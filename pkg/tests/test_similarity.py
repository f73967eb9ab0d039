import math

import numpy as np
import pytest

from plsim.representation import LanguageRepresentation, RepresentationError, TokenEmbeddingSet
from plsim.similarity import (
    SimilarityError,
    cosine,
    directed_token_similarity,
    language_similarity,
    oracle_language_similarity,
    oracle_pairwise_matrix,
    oracle_self_similarity,
    pairwise_matrix,
    self_similarity,
    token_set_similarity,
)


def ts(token, rows):
    return TokenEmbeddingSet(token, np.array(rows, dtype=np.float32))


def rep(language, sets, dim=2):
    return LanguageRepresentation(language, "test", dim, sets)


def random_rep(rng, language, n_tokens=3, max_set=20, dim=8):
    sets = {}
    for i in range(n_tokens):
        size = rng.integers(1, max_set + 1)
        vectors = rng.standard_normal((size, dim)).astype(np.float32)
        sets[f"tok{i}"] = TokenEmbeddingSet(f"tok{i}", vectors)
    return LanguageRepresentation(language, "rng", dim, sets)


# --- cosine -----------------------------------------------------------------

def test_cosine_identical_direction():
    assert cosine([3, 4], [3, 4]) == pytest.approx(1.0, abs=1e-12)


def test_cosine_orthogonal():
    assert cosine([1, 0], [0, 1]) == pytest.approx(0.0, abs=1e-12)


def test_cosine_45_degrees():
    assert cosine([1, 1], [1, 0]) == pytest.approx(0.70710678, abs=1e-8)


def test_cosine_zero_vector_rejected():
    with pytest.raises(SimilarityError):
        cosine([0, 0], [1, 0])


def test_cosine_width_mismatch():
    with pytest.raises(SimilarityError):
        cosine([1, 0, 0], [1, 0])


# --- directed vector-to-set -------------------------------------------------

def test_directed_exact_member():
    assert directed_token_similarity([1, 0], ts("t", [[1, 0], [0, 1]])) == pytest.approx(1.0)


def test_directed_orthogonal_only():
    assert directed_token_similarity([1, 0], ts("t", [[0, 1]])) == pytest.approx(0.0, abs=1e-12)


def test_directed_max_of_two_hand_cosines():
    got = directed_token_similarity([1, 1], ts("t", [[1, 0], [0, 1]]))
    assert got == pytest.approx(0.70710678, abs=1e-8)


def test_directed_dominates_every_member_cosine():
    rng = np.random.default_rng(7)
    for _ in range(50):
        v = rng.standard_normal(6)
        target = ts("t", rng.standard_normal((10, 6)))
        best = directed_token_similarity(v, target)
        for row in target.vectors:
            assert best >= cosine(v, row) - 1e-12


def test_directed_monotone_in_target_set():
    rng = np.random.default_rng(8)
    v = rng.standard_normal(5)
    base = rng.standard_normal((6, 5))
    before = directed_token_similarity(v, ts("t", base))
    grown = np.vstack([base, rng.standard_normal((1, 5))])
    after = directed_token_similarity(v, ts("t", grown))
    assert after >= before - 1e-12


# --- set-to-set -------------------------------------------------------------

def test_set_similarity_identical_sets():
    s = ts("t", [[1, 2], [3, -4], [0.5, 0.5]])
    assert token_set_similarity(s, s) == pytest.approx(1.0, abs=1e-6)


def test_set_similarity_directed_half():
    source = ts("t", [[1, 0], [0, 1]])
    target = ts("t", [[1, 0]])
    assert token_set_similarity(source, target) == pytest.approx(0.5, abs=1e-8)


def test_set_similarity_asymmetry_witness():
    source = ts("t", [[1, 0], [0, 1]])
    target = ts("t", [[1, 0]])
    forward = token_set_similarity(source, target)
    backward = token_set_similarity(target, source)
    assert forward == pytest.approx(0.5, abs=1e-8)
    assert backward == pytest.approx(1.0, abs=1e-8)
    assert forward != backward


def test_set_similarity_token_mismatch():
    with pytest.raises(SimilarityError):
        token_set_similarity(ts("a", [[1, 0]]), ts("b", [[1, 0]]))


# --- language level ---------------------------------------------------------

def test_language_self_similarity_is_one():
    r = rep("a", {"t1": ts("t1", [[1, 0], [0, 1]]), "t2": ts("t2", [[1, 1]])})
    assert language_similarity(r, r) == pytest.approx(1.0, abs=1e-6)


def test_language_similarity_hand_mean():
    # token u: identical singletons -> 1.0; token t: 0.5 directed -> mean 0.75
    a = rep("a", {"t": ts("t", [[1, 0], [0, 1]]), "u": ts("u", [[2, 2]])})
    b = rep("b", {"t": ts("t", [[1, 0]]), "u": ts("u", [[1, 1]])})
    per_token = {}
    got = language_similarity(a, b, per_token=per_token)
    assert got == pytest.approx(0.75, abs=1e-8)
    assert per_token["t"] == pytest.approx(0.5, abs=1e-8)
    assert per_token["u"] == pytest.approx(1.0, abs=1e-6)


def test_language_similarity_shrinks_to_shared_keys():
    a = rep("a", {"t": ts("t", [[1, 0]]), "u": ts("u", [[0, 1]])})
    b = rep("b", {"t": ts("t", [[1, 0]])})  # u dropped on b's side
    assert language_similarity(a, b) == pytest.approx(1.0, abs=1e-6)


def test_language_similarity_empty_intersection():
    a = rep("a", {"t": ts("t", [[1, 0]])})
    b = rep("b", {"u": ts("u", [[1, 0]])})
    with pytest.raises(SimilarityError):
        language_similarity(a, b)


def test_language_similarity_dim_mismatch():
    a = rep("a", {"t": ts("t", [[1, 0]])}, dim=2)
    b = LanguageRepresentation("b", "test", 3, {"t": ts("t", [[1, 0, 0]])})
    with pytest.raises(SimilarityError):
        language_similarity(a, b)


# --- pairwise matrix --------------------------------------------------------

def test_pairwise_matrix_shape_and_diagonal():
    rng = np.random.default_rng(3)
    reps = [random_rep(rng, lang) for lang in ("a", "b", "c")]
    m = pairwise_matrix(reps)
    assert m.directed.shape == (3, 3)
    assert np.allclose(np.diag(m.directed), 1.0, atol=1e-6)
    assert np.allclose(m.symmetrized, m.symmetrized.T)
    assert np.allclose(m.symmetrized, (m.directed + m.directed.T) / 2)


def test_pairwise_matrix_matches_oracle():
    rng = np.random.default_rng(4)
    reps = [random_rep(rng, lang) for lang in ("a", "b", "c")]
    fast = pairwise_matrix(reps)
    slow = oracle_pairwise_matrix(reps)
    assert np.allclose(fast.directed, slow.directed, atol=1e-6)


def test_pairwise_matrix_spread():
    rng = np.random.default_rng(5)
    reps = [random_rep(rng, lang) for lang in ("a", "b", "c")]
    m = pairwise_matrix(reps)
    off = m.symmetrized[~np.eye(3, dtype=bool)]
    assert m.spread == pytest.approx(off.max() - off.min())


def test_pairwise_matrix_strict_fp_uses_fixed_order():
    rng = np.random.default_rng(6)
    reps = [random_rep(rng, lang) for lang in ("a", "b")]
    strict = pairwise_matrix(reps, strict_fp=True)
    fast = pairwise_matrix(reps)
    assert np.allclose(strict.directed, fast.directed, atol=1e-6)


def test_pairwise_needs_two():
    rng = np.random.default_rng(6)
    with pytest.raises(SimilarityError):
        pairwise_matrix([random_rep(rng, "a")])


# --- self-similarity --------------------------------------------------------

def test_self_similarity_identical_pair():
    r = rep("a", {"t": ts("t", [[1, 2], [1, 2]])})
    dist = self_similarity(r)
    assert dist.per_token_scores["t"] == pytest.approx(1.0, abs=1e-6)


def test_self_similarity_orthogonal_pair_scores_zero():
    r = rep("a", {"t": ts("t", [[1, 0], [0, 1]])})
    dist = self_similarity(r)
    assert dist.per_token_scores["t"] == pytest.approx(0.0, abs=1e-8)


def test_self_similarity_singletons_excluded_and_counted():
    r = rep("a", {
        "t": ts("t", [[1, 0], [1, 1]]),
        "lonely": ts("lonely", [[1, 0]]),
    })
    dist = self_similarity(r)
    assert "lonely" not in dist.per_token_scores
    assert dist.excluded_singletons == 1
    assert all(s <= 1.0 + 1e-9 for s in dist.per_token_scores.values())


def test_self_similarity_all_singletons_error():
    r = rep("a", {"t": ts("t", [[1, 0]])})
    with pytest.raises(SimilarityError):
        self_similarity(r)


def test_self_similarity_matches_oracle():
    rng = np.random.default_rng(9)
    r = random_rep(rng, "a", n_tokens=4, max_set=12, dim=6)
    fast = self_similarity(r)
    slow = oracle_self_similarity(r)
    assert fast.excluded_singletons == slow.excluded_singletons
    assert fast.mean == pytest.approx(slow.mean, abs=1e-6)
    assert fast.variance == pytest.approx(slow.variance, abs=1e-6)
    for token, score in fast.per_token_scores.items():
        assert score == pytest.approx(slow.per_token_scores[token], abs=1e-6)


# --- invariances ------------------------------------------------------------

def scaled(r, factor):
    sets = {
        t: TokenEmbeddingSet(t, s.vectors * np.float32(factor))
        for t, s in r.sets.items()
    }
    return LanguageRepresentation(r.language, r.encoder_tag, r.dim, sets)


def test_positive_scale_invariance():
    rng = np.random.default_rng(10)
    a = random_rep(rng, "a")
    b = random_rep(rng, "b")
    base = language_similarity(a, b)
    assert language_similarity(scaled(a, 7.5), scaled(b, 0.03)) == pytest.approx(
        base, abs=1e-6
    )


def test_permutation_invariance():
    rng = np.random.default_rng(11)
    a = random_rep(rng, "a")
    b = random_rep(rng, "b")
    base = language_similarity(a, b)
    perm_sets = {}
    for t, s in a.sets.items():
        perm = rng.permutation(s.size)
        perm_sets[t] = TokenEmbeddingSet(t, s.vectors[perm])
    shuffled = LanguageRepresentation("a", a.encoder_tag, a.dim, perm_sets)
    assert language_similarity(shuffled, b) == pytest.approx(base, abs=1e-9)


def test_scores_bounded():
    rng = np.random.default_rng(12)
    for _ in range(20):
        a = random_rep(rng, "a")
        b = random_rep(rng, "b")
        s = language_similarity(a, b)
        assert -1.0 - 1e-9 <= s <= 1.0 + 1e-9


def test_oracle_equivalence_randomized():
    rng = np.random.default_rng(13)
    for _ in range(25):
        dim = int(rng.integers(2, 17))
        a = random_rep(rng, "a", n_tokens=int(rng.integers(1, 4)), dim=dim)
        b = LanguageRepresentation(
            "b", "rng", dim,
            {t: TokenEmbeddingSet(t, rng.standard_normal((int(rng.integers(1, 21)), dim))
                                  .astype(np.float32))
             for t in a.sets},
        )
        assert language_similarity(a, b) == pytest.approx(
            oracle_language_similarity(a, b), abs=1e-6
        )


def test_zero_vector_rejected_at_construction():
    with pytest.raises(RepresentationError):
        ts("t", [[0, 0]])
