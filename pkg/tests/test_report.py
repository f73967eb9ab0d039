import numpy as np
import pytest

from plsim.report import (
    ReportConfig,
    ReportError,
    matrix_to_csv,
    order_languages,
    parse_matrix_csv,
    render_heatmap,
    summarize_self_similarity,
    value_to_color,
    write_self_similarity_table,
)
from plsim.similarity import SelfSimilarityDistribution, SimilarityMatrix


def matrix_from_sym(languages, sym):
    sym = np.array(sym, dtype=np.float64)
    return SimilarityMatrix(languages, sym.copy(), sym)


@pytest.fixture
def toy_matrix():
    # hand-filled symmetrized scores: AB 0.9, AC 0.2, BC 0.5
    return matrix_from_sym(
        ["A", "B", "C"],
        [[1.0, 0.9, 0.2],
         [0.9, 1.0, 0.5],
         [0.2, 0.5, 1.0]],
    )


def test_order_by_row_means(toy_matrix):
    # row means: A 0.55, B 0.7, C 0.35
    assert order_languages(toy_matrix) == ["B", "A", "C"]


def test_order_two_languages_tie_breaks_lexicographically():
    m = matrix_from_sym(["zeta", "alpha"], [[1.0, 0.4], [0.4, 1.0]])
    assert order_languages(m) == ["alpha", "zeta"]


def test_order_invariant_under_input_permutation(toy_matrix):
    perm = [2, 0, 1]
    sym = toy_matrix.symmetrized[np.ix_(perm, perm)]
    permuted = matrix_from_sym([toy_matrix.languages[i] for i in perm], sym)
    assert order_languages(permuted) == order_languages(toy_matrix)


def test_render_heatmap_writes_sorted_csv(toy_matrix, tmp_path):
    written = render_heatmap(toy_matrix, ReportConfig(decimals=6), tmp_path)
    text = written["symmetrized"].read_text()
    languages, grid = parse_matrix_csv(text)
    assert languages == ["B", "A", "C"]
    assert grid[0, 1] == pytest.approx(0.9)
    # sorting is a permutation: same multiset of values
    assert sorted(grid.flatten()) == pytest.approx(
        sorted(toy_matrix.symmetrized.flatten())
    )
    assert written["heatmap"].exists()
    assert written["heatmap"].read_bytes().startswith(b"<?xml")


def test_render_deterministic_bytes(toy_matrix, tmp_path):
    a = render_heatmap(toy_matrix, ReportConfig(), tmp_path / "one")
    b = render_heatmap(toy_matrix, ReportConfig(), tmp_path / "two")
    assert a["symmetrized"].read_bytes() == b["symmetrized"].read_bytes()
    assert a["directed"].read_bytes() == b["directed"].read_bytes()
    assert a["heatmap"].read_bytes() == b["heatmap"].read_bytes()


def test_csv_roundtrip_precision(toy_matrix, tmp_path):
    for decimals in (2, 6):
        written = render_heatmap(
            toy_matrix, ReportConfig(decimals=decimals), tmp_path / str(decimals)
        )
        languages, grid = parse_matrix_csv(written["symmetrized"].read_text())
        order = [toy_matrix.languages.index(l) for l in languages]
        expected = toy_matrix.symmetrized[np.ix_(order, order)]
        assert np.all(np.abs(grid - expected) <= 10.0 ** (-decimals))


def test_color_endpoints(toy_matrix):
    config = ReportConfig()
    vmin = float(toy_matrix.symmetrized.min())  # the min off-diagonal cell
    vmax = float(toy_matrix.symmetrized.max())
    assert value_to_color(vmin, vmin, vmax, config) == pytest.approx(config.color_low)
    assert value_to_color(vmax, vmin, vmax, config) == pytest.approx(config.color_high)


def test_single_cell_matrix_maps_to_high_color(tmp_path):
    m = matrix_from_sym(["solo"], [[1.0]])
    config = ReportConfig()
    # degenerate min==max range: the only cell sits at the high endpoint
    assert value_to_color(1.0, 1.0, 1.0, config) == pytest.approx(config.color_high)
    written = render_heatmap(m, config, tmp_path)
    assert written["heatmap"].exists()


def test_decimals_validated():
    with pytest.raises(ReportError):
        ReportConfig(decimals=0)
    with pytest.raises(ReportError):
        ReportConfig(decimals=10)


def dist(language, scores, singletons=0):
    values = np.array(list(scores.values()), dtype=np.float64)
    return SelfSimilarityDistribution(
        language, scores, float(values.mean()), float(values.var()), singletons
    )


def test_summarize_hand_values():
    rows = summarize_self_similarity([dist("a", {"t": 0.0, "u": 1.0})])
    assert rows[0]["mean"] == pytest.approx(0.5)
    assert rows[0]["variance"] == pytest.approx(0.25)  # population variance
    assert rows[0]["min"] == 0.0
    assert rows[0]["max"] == 1.0


def test_summarize_single_language_single_row():
    rows = summarize_self_similarity([dist("a", {"t": 0.5})])
    assert len(rows) == 1
    assert "delta_mean" not in rows[0]


def test_summarize_identical_runs_have_zero_delta():
    d = dist("a", {"t": 0.25, "u": 0.75})
    rows = summarize_self_similarity([d], baseline=[d])
    assert rows[0]["delta_mean"] == pytest.approx(0.0)
    assert rows[0]["delta_variance"] == pytest.approx(0.0)


def test_write_table(tmp_path):
    rows = summarize_self_similarity([dist("a", {"t": 0.0, "u": 1.0}, singletons=2)])
    path = tmp_path / "selfsim.tsv"
    write_self_similarity_table(rows, path)
    lines = path.read_text().splitlines()
    assert "population variance" in lines[0]
    assert lines[1].split("\t")[0] == "language"
    assert lines[2].split("\t")[0] == "a"
