"""Minimal SVG line plots of spectrum curves in the (alpha, beta) plane."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT, PAD = 640, 640, 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _range(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    margin = 0.1 * (hi - lo)
    return lo - margin, hi + margin


def _num(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    trivial_level: float,
    title: str = "",
) -> str:
    """One polyline per ``(label, alphas, betas)`` plus both trivial lines.

    Non-finite points are dropped.  Axes are linear with a 10% margin around
    the data and the trivial level.
    """
    clean = []
    for label, xs, ys in series:
        pts = [(float(x), float(y)) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
        clean.append((label, pts))
    all_x = [x for _, pts in clean for x, _ in pts] + [trivial_level]
    all_y = [y for _, pts in clean for _, y in pts] + [trivial_level]
    x0, x1 = _range(all_x)
    y0, y1 = _range(all_y)

    def sx(x: float) -> float:
        return PAD + (x - x0) / (x1 - x0) * (WIDTH - 2 * PAD)

    def sy(y: float) -> float:
        return HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="{PAD / 2}" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<rect x="{PAD}" y="{PAD}" width="{WIDTH - 2 * PAD}" height="{HEIGHT - 2 * PAD}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="14">alpha</text>',
        f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 15 {HEIGHT / 2})">beta</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{sx(xv):.2f}" y="{HEIGHT - PAD + 18}" text-anchor="middle" font-size="11">{_num(xv)}</text>')
        out.append(f'<text x="{PAD - 6}" y="{sy(yv) + 4:.2f}" text-anchor="end" font-size="11">{_num(yv)}</text>')

    lx, ly = sx(trivial_level), sy(trivial_level)
    out.append(
        f'<line class="trivial" x1="{lx:.2f}" y1="{PAD}" x2="{lx:.2f}" y2="{HEIGHT - PAD}" stroke="gray" stroke-dasharray="6 4"/>'
    )
    out.append(
        f'<line class="trivial" x1="{PAD}" y1="{ly:.2f}" x2="{WIDTH - PAD}" y2="{ly:.2f}" stroke="gray" stroke-dasharray="6 4"/>'
    )
    for n, (label, pts) in enumerate(clean):
        color = COLORS[n % len(COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline class="curve" fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">')
        out.append(f"<title>{escape(label)}</title></polyline>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
