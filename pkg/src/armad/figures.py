"""Raster figure rendering for reports, via matplotlib.

Import stays local to the functions so the plotting stack is only
loaded when a figure output is actually requested; the Agg backend
keeps rendering headless.
"""

from __future__ import annotations

from typing import Sequence

from .evaluation import EvalReport


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def band_figure(report: EvalReport, out: str) -> None:
    """Raster twin of the band SVG: grey strip, red line per attack."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(8.0, 0.9))
    ax.axhspan(0.0, 1.0, color="#d9d9d9")
    if report.attack_positions:
        ax.vlines(report.attack_positions, 0.0, 1.0, color="#cc0000", linewidth=1.0)
    ax.set_xlim(0.5, report.n + 0.5)
    ax.set_ylim(0.0, 1.0)
    ax.set_yticks([])
    ax.set_xlabel("rank (most anomalous on the left)", fontsize=8)
    ax.tick_params(axis="x", labelsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)


def sweep_figure(
    cells: Sequence[tuple[float, float, float]], out: str
) -> None:
    """nDCG against the support threshold, one line per confidence.

    cells holds (supp, conf, ndcg) triples, typically a sweep grid.
    """
    plt = _pyplot()
    by_conf: dict[float, list[tuple[float, float]]] = {}
    for supp, conf, score in cells:
        by_conf.setdefault(conf, []).append((supp, score))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for conf in sorted(by_conf):
        points = sorted(by_conf[conf])
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            marker="o",
            label=f"conf {conf:g}%",
        )
    supps = {supp for supp, _, _ in cells}
    if len(supps) > 1 and min(supps) > 0 and max(supps) / min(supps) >= 50:
        ax.set_xscale("log")
    ax.set_xlabel("support threshold (%)")
    ax.set_ylabel("nDCG")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
