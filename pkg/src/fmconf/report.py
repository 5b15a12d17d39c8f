"""Deterministic metrics report.

The report is a tab-separated table with ``#`` header lines, one row per
metric value. Exact values are rendered unreduced (``share/k`` and
``k/(2^n - 1)``) with a decimal companion to six significant digits.
Identical input bytes and flags always produce identical report bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import __version__
from .engine import LayerMetrics
from .model import FeatureModel, Layer, Level

_HEADER = ("metric", "level", "layer", "scope", "feature", "exact", "decimal")


@dataclass(frozen=True)
class ReportEntry:
    """Metrics of one scope, tagged with the (level, layer) it reports."""

    level: Level
    layer: Layer
    metrics: LayerMetrics


def _decimal(value) -> str:
    return format(float(value), ".6g")


def _tag(value: Level | Layer) -> str:
    return "-" if value.value == "none" else value.value


def render_report(model: FeatureModel, entries: list[ReportEntry],
                  input_digest: str) -> str:
    lines = [
        "# fmconf report v1",
        f"# tool: fmconf {__version__}",
        f"# input: sha256:{input_digest}",
        f"# model: root={model.root.token} features={len(model.features)} "
        f"arcs={len(model.arcs)}",
        "# variability: k/(2^n - 1)",
        "\t".join(_HEADER),
    ]
    for entry in entries:
        m = entry.metrics
        level, layer, scope = _tag(entry.level), _tag(entry.layer), m.scope.token
        denom = (1 << m.n) - 1

        def row(metric: str, feature: str, exact: str, decimal: str) -> None:
            lines.append("\t".join((metric, level, layer, scope, feature,
                                    exact, decimal)))

        row("k", "-", str(m.k), str(m.k))
        row("n", "-", str(m.n), str(m.n))
        row("variability", "-", f"{m.k}/{denom}", _decimal(m.variability))
        for fid, frac in m.commonality.items():
            share = int(frac * m.k)
            row("commonality", fid.token, f"{share}/{m.k}", _decimal(frac))
    return "\n".join(lines) + "\n"
