"""Minimal deterministic SVG line charts of spectral functions."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .spectra import SpectralFunction

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 60, 130, 40, 50


def color_for(cluster_id: int) -> str:
    return PALETTE[cluster_id % len(PALETTE)]


def _num(v: float) -> str:
    return f"{v:.2f}"


def spectral_functions_svg(
    curves: Sequence[tuple[int, str, SpectralFunction]],
    title: str = "",
) -> str:
    """One polyline per ``(cluster_id, legend_name, function)``.

    Curves sharing a cluster id share a colour; axes span [0, 1] x [0, max value].
    """
    if not curves:
        raise ValueError("nothing to plot")
    ymax = max(float(np.max(F.values)) for _, _, F in curves)
    if ymax <= 0:
        ymax = 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + x * pw

    def py(y):
        return TOP + ph - (y / ymax) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    # axes
    out.append(
        f'<path d="M{LEFT},{TOP} L{LEFT},{TOP + ph} L{LEFT + pw},{TOP + ph}" '
        f'fill="none" stroke="black" stroke-width="1"/>'
    )
    for t in np.linspace(0, 1, 6):
        x = px(t)
        out.append(f'<line x1="{_num(x)}" y1="{TOP + ph}" x2="{_num(x)}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_num(x)}" y="{TOP + ph + 18}" text-anchor="middle" font-size="11">{t:.1f}</text>')
        y = py(t * ymax)
        out.append(f'<line x1="{LEFT - 5}" y1="{_num(y)}" x2="{LEFT}" y2="{_num(y)}" stroke="black"/>')
        out.append(
            f'<text x="{LEFT - 8}" y="{_num(y + 4)}" text-anchor="end" font-size="11">{t * ymax:.3g}</text>'
        )
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">x</text>')

    legend_seen = []
    for cid, name, F in curves:
        pts = " ".join(f"{_num(px(x))},{_num(py(v))}" for x, v in zip(F.knots, F.values))
        out.append(
            f'<polyline data-cluster="{cid}" points="{pts}" fill="none" '
            f'stroke="{color_for(cid)}" stroke-width="1.5"/>'
        )
        if (cid, name) not in legend_seen:
            legend_seen.append((cid, name))
    for j, (cid, name) in enumerate(legend_seen):
        y = TOP + 10 + 18 * j
        x = LEFT + pw + 12
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 20}" y2="{y}" stroke="{color_for(cid)}" stroke-width="2"/>')
        out.append(f'<text x="{x + 26}" y="{y + 4}" font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
