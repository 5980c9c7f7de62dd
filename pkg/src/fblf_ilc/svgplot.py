"""Minimal static SVG line plots (no plotting dependency).

Good enough for per-iteration convergence and constraint figures:
one or more series over a shared x axis, optional log-scale y and a
horizontal reference line.
"""

from __future__ import annotations

import math

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * span:
        ticks.append(v)
        v += step
    return ticks


def line_plot(path, x, series, title="", xlabel="", ylabel="",
              ylog=False, hline=None):
    """Write an SVG line chart.

    series: list of (label, y-values) pairs; non-finite and (for log
    scale) non-positive points are dropped per series.
    """
    x = [float(v) for v in x]
    clean = []
    for label, ys in series:
        pts = [(xi, float(yi)) for xi, yi in zip(x, ys)
               if math.isfinite(float(yi)) and (not ylog or float(yi) > 0)]
        if pts:
            clean.append((label, pts))
    all_y = [yi for _, pts in clean for _, yi in pts]
    if hline is not None and (not ylog or hline > 0):
        all_y.append(float(hline))
    if not all_y:
        all_y = [0.0, 1.0]
    tf = math.log10 if ylog else (lambda v: v)
    ylo, yhi = min(map(tf, all_y)), max(map(tf, all_y))
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    xlo, xhi = (min(x), max(x)) if x else (0.0, 1.0)
    if xhi - xlo < 1e-12:
        xhi = xlo + 1.0
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def X(v):
        return _ML + (v - xlo) / (xhi - xlo) * pw

    def Y(v):
        return _MT + ph - (tf(v) - ylo) / (yhi - ylo) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="#333"/>',
    ]
    for tv in _ticks(xlo, xhi):
        parts.append(f'<line x1="{X(tv):.1f}" y1="{_MT + ph}" x2="{X(tv):.1f}" '
                     f'y2="{_MT + ph + 5}" stroke="#333"/>')
        parts.append(f'<text x="{X(tv):.1f}" y="{_MT + ph + 18}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{tv:g}</text>')
    for tv in _ticks(ylo, yhi):
        yv = _MT + ph - (tv - ylo) / (yhi - ylo) * ph
        label = f"1e{tv:g}" if ylog else f"{tv:g}"
        parts.append(f'<line x1="{_ML - 5}" y1="{yv:.1f}" x2="{_ML}" '
                     f'y2="{yv:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{_ML - 8}" y="{yv + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')
    if xlabel:
        parts.append(f'<text x="{_ML + pw / 2}" y="{_H - 10}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="12">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{_MT + ph / 2}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12" '
                     f'transform="rotate(-90 18 {_MT + ph / 2})">{ylabel}</text>')
    if hline is not None and (not ylog or hline > 0):
        parts.append(f'<line x1="{_ML}" y1="{Y(hline):.1f}" x2="{_ML + pw}" '
                     f'y2="{Y(hline):.1f}" stroke="#888" stroke-dasharray="6 4"/>')
    for ci, (label, pts) in enumerate(clean):
        color = colors[ci % len(colors)]
        d = " ".join(f"{X(xi):.2f},{Y(yi):.2f}" for xi, yi in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{d}"/>')
        parts.append(f'<text x="{_ML + pw - 6}" y="{_MT + 16 + 14 * ci}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11" fill="{color}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
