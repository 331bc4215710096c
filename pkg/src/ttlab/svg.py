"""Minimal SVG line plots, written by hand."""

from __future__ import annotations

from typing import Sequence

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def line_plot(
    series: Sequence[tuple[Sequence[float], Sequence[float]]],
    title: str = "",
    width: int = 480,
    height: int = 360,
    equal_aspect: bool = False,
    circle: bool = False,
) -> str:
    """Polylines in a shared frame; ``circle`` adds the unit circle."""
    xs = np.concatenate([np.asarray(x, float) for x, _ in series] + ([np.array([-1.0, 1.0])] if circle else []))
    ys = np.concatenate([np.asarray(y, float) for _, y in series] + ([np.array([-1.0, 1.0])] if circle else []))
    x0, x1, y0, y1 = xs.min(), xs.max(), ys.min(), ys.max()
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pad = 30
    sx = (width - 2 * pad) / (x1 - x0)
    sy = (height - 2 * pad) / (y1 - y0)
    if equal_aspect:
        sx = sy = min(sx, sy)

    def pt(x, y):
        return f"{pad + (x - x0) * sx:.2f},{height - pad - (y - y0) * sy:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="18" text-anchor="middle" font-family="sans-serif" font-size="13">{title}</text>',
    ]
    if circle:
        t = np.linspace(0, 2 * np.pi, 200)
        out.append(f'<polyline fill="none" stroke="#999" points="{" ".join(pt(a, b) for a, b in zip(np.cos(t), np.sin(t)))}"/>')
    elif y0 < 0 < y1:
        out.append(f'<line x1="{pad}" x2="{width - pad}" y1="{pt(x0, 0).split(",")[1]}" y2="{pt(x0, 0).split(",")[1]}" stroke="#bbb"/>')
    for k, (x, y) in enumerate(series):
        pts = " ".join(pt(a, b) for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{COLORS[k % len(COLORS)]}" stroke-width="1.5" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
