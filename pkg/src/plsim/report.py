"""Ordering, summarizing, and rendering of similarity results.

The heatmap colors interpolate linearly between two RGB endpoints over the
displayed matrix's own min..max range (each figure gets its own scale), so
the least similar off-diagonal pair sits exactly at the low endpoint.  An
absolute [0, 1] scale is available for comparing figures side by side.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .similarity import SelfSimilarityDistribution, SimilarityMatrix


class ReportError(ValueError):
    pass


@dataclass
class ReportConfig:
    sort: str = "average_similarity"  # or "input_order"
    color_low: tuple[float, float, float] = (0.97, 0.98, 1.0)
    color_high: tuple[float, float, float] = (0.03, 0.19, 0.42)
    decimals: int = 6
    include_directed: bool = True
    abs_scale: bool = False

    def __post_init__(self):
        if not (1 <= self.decimals <= 9):
            raise ReportError("decimals must be in [1, 9]")
        if self.sort not in ("average_similarity", "input_order"):
            raise ReportError(f"unknown sort mode {self.sort!r}")


def order_languages(matrix: SimilarityMatrix) -> list[str]:
    """Languages sorted descending by mean symmetrized off-diagonal score,
    ties broken ascending-lexicographically."""
    n = len(matrix.languages)
    if n == 1:
        return list(matrix.languages)
    means = {}
    for i, lang in enumerate(matrix.languages):
        row = [matrix.symmetrized[i, j] for j in range(n) if j != i]
        means[lang] = sum(row) / len(row)
    return sorted(matrix.languages, key=lambda l: (-means[l], l))


def _reorder(grid: np.ndarray, languages: list[str], order: list[str]) -> np.ndarray:
    idx = [languages.index(l) for l in order]
    return grid[np.ix_(idx, idx)]


def matrix_to_csv(grid: np.ndarray, languages: list[str], decimals: int) -> str:
    lines = ["language," + ",".join(languages)]
    for lang, row in zip(languages, grid):
        cells = ",".join(f"{v:.{decimals}f}" for v in row)
        lines.append(f"{lang},{cells}")
    return "\n".join(lines) + "\n"


def parse_matrix_csv(text: str) -> tuple[list[str], np.ndarray]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    languages = lines[0].split(",")[1:]
    grid = np.array(
        [[float(c) for c in ln.split(",")[1:]] for ln in lines[1:]], dtype=np.float64
    )
    return languages, grid


def value_to_color(value: float, vmin: float, vmax: float,
                   config: ReportConfig) -> tuple[float, float, float]:
    """Linear interpolation between the configured RGB endpoints."""
    if vmax <= vmin:
        t = 1.0  # degenerate range: everything sits at the high endpoint
    else:
        t = (value - vmin) / (vmax - vmin)
    t = min(1.0, max(0.0, t))
    lo, hi = config.color_low, config.color_high
    return tuple(lo[k] + t * (hi[k] - lo[k]) for k in range(3))


def render_heatmap(matrix: SimilarityMatrix, config: ReportConfig,
                   out_dir: str | Path) -> dict[str, Path]:
    """Write sorted CSV grids and an SVG heatmap; deterministic output bytes."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import LinearSegmentedColormap

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    order = (order_languages(matrix) if config.sort == "average_similarity"
             else list(matrix.languages))
    sym = _reorder(matrix.symmetrized, matrix.languages, order)
    written = {}
    written["symmetrized"] = out / "symmetrized.csv"
    written["symmetrized"].write_text(
        matrix_to_csv(sym, order, config.decimals), encoding="utf-8"
    )
    if config.include_directed:
        directed = _reorder(matrix.directed, matrix.languages, order)
        written["directed"] = out / "directed.csv"
        written["directed"].write_text(
            matrix_to_csv(directed, order, config.decimals), encoding="utf-8"
        )

    if config.abs_scale:
        vmin, vmax = 0.0, 1.0
    else:
        vmin, vmax = float(sym.min()), float(sym.max())
    if vmax <= vmin:
        vmin = vmax - 1.0  # degenerate range: all cells map to the high endpoint
    cmap = LinearSegmentedColormap.from_list(
        "plsim", [config.color_low, config.color_high]
    )
    with matplotlib.rc_context({"svg.hashsalt": "plsim"}):
        fig, ax = plt.subplots(figsize=(1.0 + 0.6 * len(order), 0.8 + 0.6 * len(order)))
        im = ax.imshow(sym, cmap=cmap, vmin=vmin, vmax=vmax)
        ax.set_xticks(range(len(order)), order, rotation=45, ha="right")
        ax.set_yticks(range(len(order)), order)
        ax.set_title("Pairwise language similarity (symmetrized)")
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        fig.tight_layout()
        svg_path = out / "heatmap.svg"
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    written["heatmap"] = svg_path
    return written


def summarize_self_similarity(dists: list[SelfSimilarityDistribution],
                              baseline: list[SelfSimilarityDistribution] | None = None,
                              ) -> list[dict]:
    """Per-language distribution summary; variance is population variance.

    baseline, when given, must cover the same languages (a second run,
    e.g. non-pretrained vs pretrained); a delta-mean column is added.
    """
    if not dists:
        raise ReportError("need at least one self-similarity distribution")
    base_by_lang = {d.language: d for d in baseline} if baseline else {}
    rows = []
    for d in dists:
        scores = np.array(list(d.per_token_scores.values()), dtype=np.float64)
        q1, median, q3 = np.percentile(scores, [25, 50, 75])
        row = {
            "language": d.language,
            "mean": d.mean,
            "variance": d.variance,
            "min": float(scores.min()),
            "q1": float(q1),
            "median": float(median),
            "q3": float(q3),
            "max": float(scores.max()),
            "excluded_singletons": d.excluded_singletons,
        }
        if d.language in base_by_lang:
            base = base_by_lang[d.language]
            row["delta_mean"] = d.mean - base.mean
            row["delta_variance"] = d.variance - base.variance
        rows.append(row)
    return rows


def write_self_similarity_table(rows: list[dict], path: str | Path,
                                decimals: int = 6) -> None:
    columns = list(rows[0].keys())
    lines = ["# variance is population variance (divide by n)", "\t".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            v = row[col]
            cells.append(f"{v:.{decimals}f}" if isinstance(v, float) else str(v))
        lines.append("\t".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
