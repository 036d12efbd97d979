"""Minimal self-contained SVG line plots (no plotting toolchain needed)."""

from __future__ import annotations

import math
from html import escape

import numpy as np

WIDTH, HEIGHT = 720, 440
MARGIN = dict(left=70, right=170, top=40, bottom=55)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * abs(hi):
        out.append(round(v, 12))
        v += step
    return out


def line_plot(path, series, *, title="", xlabel="", ylabel="", vlines=(), hline=None) -> None:
    """Write an SVG with one polyline per ``(label, xs, ys)`` in ``series``.

    ``dashed`` can be requested per series as a fourth tuple element. Output is
    a pure function of the inputs, so identical data gives identical bytes.
    """
    pts = [(lab, np.asarray(x, float), np.asarray(y, float), *rest) for lab, x, y, *rest in series]
    finite = [(x[np.isfinite(y)], y[np.isfinite(y)]) for _, x, y, *_ in pts]
    xs = np.concatenate([x for x, _ in finite] + [np.asarray(vlines, float)]) if finite else np.zeros(1)
    ys = np.concatenate([y for _, y in finite] + ([np.array([hline])] if hline is not None else []))
    if xs.size == 0:
        xs = np.zeros(1)
    if ys.size == 0:
        ys = np.zeros(1)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN["top"] + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#444"/>',
    ]
    for t in _ticks(x0, x1):
        X = _f(sx(t))
        out.append(f'<line x1="{X}" y1="{MARGIN["top"] + ph}" x2="{X}" y2="{MARGIN["top"] + ph + 5}" stroke="#444"/>')
        out.append(f'<text x="{X}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        Y = _f(sy(t))
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y}" x2="{MARGIN["left"]}" y2="{Y}" stroke="#444"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{Y}" text-anchor="end" dominant-baseline="middle">{t:g}</text>')
    out.append(
        f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>'
    )
    if hline is not None and y0 <= hline <= y1:
        Y = _f(sy(hline))
        out.append(f'<line x1="{MARGIN["left"]}" y1="{Y}" x2="{MARGIN["left"] + pw}" y2="{Y}" stroke="#999" stroke-dasharray="2,3"/>')
    for v in vlines:
        X = _f(sx(v))
        out.append(f'<line x1="{X}" y1="{MARGIN["top"]}" x2="{X}" y2="{MARGIN["top"] + ph}" stroke="#999" stroke-dasharray="4,4"/>')
    for i, (label, x, y, *rest) in enumerate(pts):
        color = COLORS[i % len(COLORS)]
        ok = np.isfinite(y)
        coords = " ".join(f"{_f(sx(a))},{_f(sy(b))}" for a, b in zip(x[ok], y[ok]))
        dash = ' stroke-dasharray="6,4"' if rest and rest[0] else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{coords}"/>')
        ly = MARGIN["top"] + 14 + 18 * i
        lx = MARGIN["left"] + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 28}" y="{ly}" dominant-baseline="middle">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
