"""Minimal deterministic SVG line plots for CLI output.

Hand-rolled rather than a plotting library so identical inputs give
byte-identical documents.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72, 16, 16, 48

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / max(n - 1, 1)))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if span / (step * mult) <= n - 1:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * span:
        out.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return out


def line_plot(series, x_label: str, y_label: str, title: str = "") -> str:
    """series: list of (name, xs, ys). Returns a standalone SVG document."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN_T + (y1 - y) / (y1 - y0) * ph

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for t in _ticks(x0, x1):
        X = px(t)
        parts.append(f'<line x1="{_fmt(X)}" y1="{HEIGHT - MARGIN_B}" '
                     f'x2="{_fmt(X)}" y2="{HEIGHT - MARGIN_B + 5}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(X)}" y="{HEIGHT - MARGIN_B + 18}" '
                     f'font-size="11" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        Y = py(t)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{_fmt(Y)}" '
                     f'x2="{MARGIN_L}" y2="{_fmt(Y)}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(Y)}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">{_fmt(t)}</text>')
    parts.append(f'<text x="{MARGIN_L + pw / 2}" y="{HEIGHT - 10}" '
                 f'font-size="13" text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="16" y="{MARGIN_T + ph / 2}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 16 '
                 f'{MARGIN_T + ph / 2})">{y_label}</text>')
    if title:
        parts.append(f'<text x="{MARGIN_L + pw / 2}" y="{MARGIN_T + 14}" '
                     f'font-size="13" text-anchor="middle">{title}</text>')
    for i, (name, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        if name:
            Y = MARGIN_T + 18 + 16 * i
            X = WIDTH - MARGIN_R - 150
            parts.append(f'<line x1="{X}" y1="{Y - 4}" x2="{X + 24}" '
                         f'y2="{Y - 4}" stroke="{color}" stroke-width="1.5"/>')
            parts.append(f'<text x="{X + 30}" y="{Y}" font-size="11">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
