"""Standalone SVG rendering of a series and its detected state sequence."""

from __future__ import annotations

import numpy as np

from .core import StateSequence, TimeSeries
from .io import ReportMismatch

PANEL_WIDTH = 960
PANEL_HEIGHT = 110
MARGIN = 40
STATE_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _polyline_points(x: np.ndarray, y: np.ndarray, y_top: float, height: float) -> str:
    lo, hi = float(y.min()), float(y.max())
    span = hi - lo if hi > lo else 1.0
    px = MARGIN + x / max(1, x[-1]) * PANEL_WIDTH
    py = y_top + (1.0 - (y - lo) / span) * height
    return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))


def render_svg(ts: TimeSeries, states: StateSequence, cps) -> str:
    """One line-plot panel per channel plus a step-function state panel.

    Change points are drawn as vertical lines across all panels. The output is
    a self-contained SVG document with no external assets.
    """
    if states.n != ts.n:
        raise ReportMismatch(f"report covers {states.n} points, series has {ts.n}")
    panels = ts.d + 1
    total_h = panels * (PANEL_HEIGHT + 20) + 2 * MARGIN
    total_w = PANEL_WIDTH + 2 * MARGIN
    x = np.arange(ts.n)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" '
        f'height="{total_h}" viewBox="0 0 {total_w} {total_h}">',
        f'<rect width="{total_w}" height="{total_h}" fill="white"/>',
        f'<text x="{MARGIN}" y="{MARGIN - 16}" font-size="14">{ts.name}</text>',
    ]
    for ch in range(ts.d):
        y_top = MARGIN + ch * (PANEL_HEIGHT + 20)
        points = _polyline_points(x, ts.values[:, ch], y_top, PANEL_HEIGHT)
        parts.append(f'<polyline fill="none" stroke="#333333" stroke-width="0.8" '
                     f'points="{points}" class="channel"/>')
    y_top = MARGIN + ts.d * (PANEL_HEIGHT + 20)
    labels = np.unique(states.states)
    for level, label in enumerate(labels):
        mask = states.states == label
        color = STATE_COLORS[level % len(STATE_COLORS)]
        # Step level per state, drawn as horizontal runs.
        runs = _runs(mask)
        y = y_top + PANEL_HEIGHT * (1.0 - (level + 1) / (len(labels) + 1))
        for start, end in runs:
            x0 = MARGIN + start / max(1, ts.n - 1) * PANEL_WIDTH
            x1 = MARGIN + (end - 1) / max(1, ts.n - 1) * PANEL_WIDTH
            parts.append(f'<line x1="{x0:.2f}" y1="{y:.2f}" x2="{x1:.2f}" '
                         f'y2="{y:.2f}" stroke="{color}" stroke-width="4" '
                         f'class="state-level" data-state="{label}"/>')
    for cp in cps:
        xpos = MARGIN + cp / max(1, ts.n - 1) * PANEL_WIDTH
        parts.append(f'<line x1="{xpos:.2f}" y1="{MARGIN}" x2="{xpos:.2f}" '
                     f'y2="{total_h - MARGIN}" stroke="#d62728" '
                     f'stroke-dasharray="4 3" class="change-point"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def _runs(mask: np.ndarray) -> list:
    """Half-open [start, end) runs of True values."""
    runs, start = [], None
    for i, v in enumerate(mask):
        if v and start is None:
            start = i
        elif not v and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(mask)))
    return runs
