"""Standalone SVG line charts from summary CSV files."""

from __future__ import annotations

import csv
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 160, 30, 55
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _num(cell, col, lineno):
    try:
        v = float(cell)
    except ValueError:
        raise ValueError(f"line {lineno}: column {col!r} is not numeric: {cell!r}") from None
    return v


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def emit_svg(csv_path, x_col, y_col, out_path):
    """Draw ``y_col`` against ``x_col``, one polyline per (dist, params) series."""
    with open(csv_path, newline="") as f:
        rows = list(csv.DictReader(f))
    if len(rows) < 2:
        raise ValueError("need at least two rows to draw a line")
    for col in (x_col, y_col):
        if col not in rows[0]:
            raise ValueError(f"column {col!r} not in {csv_path}")
    series = {}
    for lineno, row in enumerate(rows, start=2):
        label = row.get("dist", "")
        if row.get("params"):
            label += " " + row["params"]
        series.setdefault(label, []).append(
            (_num(row[x_col], x_col, lineno), _num(row[y_col], y_col, lineno)))
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(min(ys), 0.0), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN_T + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{sx(t):.2f}" y="{MARGIN_T + ph + 16}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{MARGIN_L - 6}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_col)}</text>')
    out.append(f'<text x="16" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.2f})">{escape(y_col)}</text>')
    for i, (label, pts) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        pts = sorted(pts)
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = MARGIN_T + 14 + 16 * i
        out.append(f'<line x1="{WIDTH - MARGIN_R + 10}" y1="{ly - 4}" x2="{WIDTH - MARGIN_R + 30}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - MARGIN_R + 34}" y="{ly}">{escape(label[:24])}</text>')
    out.append("</svg>")
    with open(out_path, "w", newline="\n") as f:
        f.write("\n".join(out) + "\n")
    return out_path
