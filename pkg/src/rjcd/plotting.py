"""Matplotlib figures for the evaluation reports (SVG by default)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import RecallLevelProfile  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "rjcd",  # stable element ids across runs
    "svg.fonttype": "none",
}


def _figure(width=6.0, height=None):
    golden_ratio = (5**0.5 - 1.0) / 2.0
    return plt.figure(figsize=(width, height or width * golden_ratio))


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)
    return path


def plot_pr_profiles(path, baseline: RecallLevelProfile, reranked: RecallLevelProfile, title: str = "") -> Path:
    """Interpolated precision against recall level for both runs."""
    with plt.rc_context(STYLE):
        fig = _figure()
        ax = fig.add_subplot(111)
        levels = [100 * lv for lv in baseline.levels]
        ax.plot(levels, [100 * p for p in baseline.precisions], "o-", label="baseline")
        ax.plot(levels, [100 * p for p in reranked.precisions], "s--", label="re-ranked")
        ax.set_xlabel("Recall level (%)")
        ax.set_ylabel("Precision (%)")
        ax.set_xticks(levels)
        ax.set_ylim(0, 105)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_improvement_vs_rjcd(path, query_ids: Sequence[str], rhos: Sequence[float], improvements: Sequence[float], threshold: float | None = 0.05) -> Path:
    """Bars of precision improvement per query with RJCD overlaid, sorted by RJCD descending."""
    order = sorted(range(len(query_ids)), key=lambda i: (-rhos[i], query_ids[i]))
    names = [query_ids[i] for i in order]
    imp = [100 * improvements[i] for i in order]
    rho = [100 * rhos[i] for i in order]
    with plt.rc_context(STYLE):
        fig = _figure(width=max(6.0, 0.3 * len(names) + 2))
        ax = fig.add_subplot(111)
        x = range(len(names))
        colors = ["tab:blue" if v >= 0 else "tab:red" for v in imp]
        ax.bar(x, imp, color=colors, label="precision improvement")
        ax.plot(x, rho, "k.-", label="RJCD")
        if threshold is not None:
            ax.axhline(100 * threshold, color="gray", ls=":", lw=1, label=f"RJCD {100 * threshold:g}% gate")
        ax.axhline(0, color="black", lw=0.5)
        ax.set_xticks(list(x))
        ax.set_xticklabels(names, rotation=60, ha="right")
        ax.set_ylabel("%")
        ax.legend(frameon=False)
        return _save(fig, path)
