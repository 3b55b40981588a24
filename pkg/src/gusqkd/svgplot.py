"""Minimal SVG line plots with ticked axes and a legend.

Output depends only on the data, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
PANEL_W, PANEL_H = 420, 300
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 45


@dataclass
class Series:
    label: str
    x: list[float]
    y: list[float]
    dashed: bool = False
    color: str | None = None


@dataclass
class Panel:
    title: str
    x_label: str
    y_label: str
    series: list[Series] = field(default_factory=list)
    log_y: bool = False


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.0e}".replace("e-0", "e-").replace("e+0", "e")
    return f"{v:g}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _points(series: Series, log_y: bool):
    """Drop points a log axis cannot show (non-positive values)."""
    for x, y in zip(series.x, series.y):
        if not math.isfinite(y) or (log_y and y <= 0):
            continue
        yield x, (math.log10(y) if log_y else y)


def _panel(panel: Panel, ox: float, oy: float) -> list[str]:
    pts = [p for s in panel.series for p in _points(s, panel.log_y)]
    xs, ys = [p[0] for p in pts] or [0.0, 1.0], [p[1] for p in pts] or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    if panel.log_y:
        y_lo, y_hi = math.floor(min(ys)), math.ceil(max(ys))
        y_ticks = list(range(int(y_lo), int(y_hi) + 1))
    else:
        y_lo, y_hi = min(0.0, min(ys)), max(ys)
        y_ticks = _nice_ticks(y_lo, y_hi)
        y_lo, y_hi = min(y_lo, y_ticks[0]), max(y_hi, y_ticks[-1])
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pw, ph = PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B
    left, top = ox + MARGIN_L, oy + MARGIN_T

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
        f'<text x="{_fmt(left + pw / 2)}" y="{_fmt(oy + 18)}" text-anchor="middle" font-size="13">{escape(panel.title)}</text>',
        f'<text x="{_fmt(left + pw / 2)}" y="{_fmt(top + ph + 36)}" text-anchor="middle" font-size="12">{escape(panel.x_label)}</text>',
        f'<text transform="translate({_fmt(ox + 14)},{_fmt(top + ph / 2)}) rotate(-90)" text-anchor="middle" font-size="12">'
        f"{escape(panel.y_label)}</text>",
    ]
    for t in _nice_ticks(x_lo, x_hi):
        out.append(f'<line x1="{_fmt(sx(t))}" y1="{_fmt(top + ph)}" x2="{_fmt(sx(t))}" y2="{_fmt(top + ph + 4)}" stroke="#000"/>')
        out.append(f'<text x="{_fmt(sx(t))}" y="{_fmt(top + ph + 16)}" text-anchor="middle" font-size="10">{_tick_label(t)}</text>')
    for t in y_ticks:
        label = _tick_label(10.0**t) if panel.log_y else _tick_label(t)
        out.append(f'<line x1="{_fmt(left - 4)}" y1="{_fmt(sy(t))}" x2="{_fmt(left)}" y2="{_fmt(sy(t))}" stroke="#000"/>')
        out.append(f'<text x="{_fmt(left - 6)}" y="{_fmt(sy(t) + 3)}" text-anchor="end" font-size="10">{label}</text>')
    for i, s in enumerate(panel.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in _points(s, panel.log_y))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        if coords:
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        ly = top + 12 + 14 * i
        out.append(f'<line x1="{_fmt(left + pw - 110)}" y1="{_fmt(ly)}" x2="{_fmt(left + pw - 88)}" y2="{_fmt(ly)}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{_fmt(left + pw - 84)}" y="{_fmt(ly + 4)}" font-size="10">{escape(s.label)}</text>')
    return out


def render(panels: list[Panel], columns: int = 1) -> str:
    """Lay the panels out row-major in ``columns`` columns and return the SVG document."""
    rows = -(-len(panels) // columns)
    width, height = PANEL_W * columns, PANEL_H * rows
    body = []
    for i, panel in enumerate(panels):
        body += _panel(panel, PANEL_W * (i % columns), PANEL_H * (i // columns))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" '
        'font-family="sans-serif">\n<rect width="100%" height="100%" fill="#fff"/>\n' + "\n".join(body) + "\n</svg>\n"
    )
