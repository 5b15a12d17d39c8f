"""Figure rendering for metrics reports.

Writes PNG files next to the delimited report output: one variability
summary across all reported scopes and one commonality chart per scope.
"""

from __future__ import annotations

import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .report import ReportEntry  # noqa: E402


def _slug(token: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", token)


def render_figures(entries: list[ReportEntry], outdir: Path) -> list[Path]:
    """Render metric figures into ``outdir`` and return the written paths."""
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    labels = [e.metrics.scope.token for e in entries]
    values = [float(e.metrics.variability) for e in entries]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(labels)), 3.2))
    bars = ax.bar(labels, values, color="#4878a8")
    for bar, entry in zip(bars, entries):
        m = entry.metrics
        ax.annotate(f"{m.k}/{(1 << m.n) - 1}",
                    (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom", fontsize=8)
    ax.set_ylabel("variability")
    ax.set_title("Valid configurations vs non-empty subsets")
    fig.tight_layout()
    path = outdir / "variability.png"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    for entry in entries:
        m = entry.metrics
        tokens = [fid.token for fid in m.commonality]
        shares = [float(frac) for frac in m.commonality.values()]
        fig, ax = plt.subplots(figsize=(5.0, max(2.4, 0.3 * len(tokens))))
        ax.barh(tokens, shares, color="#6aa84f")
        ax.set_xlim(0, 1.05)
        ax.invert_yaxis()
        ax.set_xlabel("commonality")
        ax.set_title(f"Feature share across {m.k} configurations of {m.scope.token}")
        fig.tight_layout()
        path = outdir / f"commonality_{_slug(m.scope.token)}.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
