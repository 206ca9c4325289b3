"""Tiny deterministic SVG renderer for line plots and heatmaps (no timestamps, fixed float format)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

W, H, PAD = 640, 420, 56
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _frame(title: str, xlabel: str, ylabel: str, extent) -> list[str]:
    x0, x1, y0, y1 = extent
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{PAD}" y="{PAD // 2}" width="{W - 1.5 * PAD}" height="{H - 1.5 * PAD}" '
        'fill="none" stroke="black"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{W / 2}" y="{H - 8}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {H / 2})">{escape(ylabel)}</text>',
        f'<text x="{PAD}" y="{H - PAD + 16}" font-size="10">{x0:.4g}</text>',
        f'<text x="{W - PAD / 2}" y="{H - PAD + 16}" text-anchor="end" font-size="10">{x1:.4g}</text>',
        f'<text x="{PAD - 4}" y="{H - PAD}" text-anchor="end" font-size="10">{y0:.4g}</text>',
        f'<text x="{PAD - 4}" y="{PAD // 2 + 10}" text-anchor="end" font-size="10">{y1:.4g}</text>',
    ]
    return out


def _mapper(extent):
    x0, x1, y0, y1 = extent
    sx = (W - 1.5 * PAD) / ((x1 - x0) or 1.0)
    sy = (H - 1.5 * PAD) / ((y1 - y0) or 1.0)
    return lambda x, y: (PAD + (x - x0) * sx, H - PAD - (y - y0) * sy)


def line_plot(series, title="", xlabel="x", ylabel="y", dashed=(), markers=False) -> str:
    """``series``: list of (label, x, y).  Non-finite points break the line."""
    xs = np.concatenate([np.asarray(s[1], float) for s in series]) if series else np.zeros(1)
    ys = np.concatenate([np.asarray(s[2], float) for s in series]) if series else np.zeros(1)
    ok = np.isfinite(xs) & np.isfinite(ys)
    if not ok.any():
        xs, ys, ok = np.zeros(1), np.zeros(1), np.ones(1, bool)
    extent = (xs[ok].min(), xs[ok].max(), min(0.0, ys[ok].min()), ys[ok].max())
    to = _mapper(extent)
    out = _frame(title, xlabel, ylabel, extent)
    for i, (label, x, y) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if label in dashed else ""
        pts, segs = [], []
        for a, b in zip(np.asarray(x, float), np.asarray(y, float)):
            if math.isfinite(a) and math.isfinite(b):
                pts.append(to(a, b))
            elif pts:
                segs.append(pts)
                pts = []
        if pts:
            segs.append(pts)
        for seg in segs:
            if markers:
                out += [f'<circle cx="{_f(px)}" cy="{_f(py)}" r="3" fill="{colour}"/>' for px, py in seg]
            else:
                path = " ".join(f"{_f(px)},{_f(py)}" for px, py in seg)
                out.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{W - PAD}" y="{PAD // 2 + 16 + 14 * i}" text-anchor="end" font-size="11" '
                   f'fill="{colour}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap(x, y, z, title="", xlabel="x1", ylabel="x2", max_cells: int = 120) -> str:
    """Grey-scale heatmap of z[i, j] at (x[i], y[j]), downsampled to at most ``max_cells`` per axis."""
    z = np.asarray(z, float)
    si = max(1, int(math.ceil(z.shape[0] / max_cells)))
    sj = max(1, int(math.ceil(z.shape[1] / max_cells)))
    x, y, z = np.asarray(x)[::si], np.asarray(y)[::sj], z[::si, ::sj]
    extent = (float(x[0]), float(x[-1]), float(y[0]), float(y[-1]))
    to = _mapper(extent)
    out = _frame(title, xlabel, ylabel, extent)
    top = z.max() if z.size and z.max() > 0 else 1.0
    cw = (W - 1.5 * PAD) / len(x)
    ch = (H - 1.5 * PAD) / len(y)
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            level = int(round(255 * (1 - z[i, j] / top)))
            px, py = to(xi, yj)
            out.append(f'<rect x="{_f(px - cw / 2)}" y="{_f(py - ch / 2)}" width="{_f(cw)}" height="{_f(ch)}" '
                       f'fill="rgb({level},{level},{level})"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
