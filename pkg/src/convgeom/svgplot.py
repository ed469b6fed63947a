"""Self-contained SVG scatter plots (no plotting library involved).

One ``<circle>`` element per data point; legends and axes are built from
rects, lines, and text so the circle count always equals the point count.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ValidationError

_CATEGORY_COLORS = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)
# three-stop ramp for scalar coloring (dark violet -> teal -> yellow)
_RAMP = ((0.267, 0.005, 0.329), (0.128, 0.567, 0.551), (0.993, 0.906, 0.144))

_WIDTH, _HEIGHT = 640, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 56, 120, 36, 48


def _ramp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    if t <= 0.5:
        lo, hi, s = _RAMP[0], _RAMP[1], t * 2.0
    else:
        lo, hi, s = _RAMP[1], _RAMP[2], (t - 0.5) * 2.0
    rgb = [int(round(255 * (a + (b - a) * s))) for a, b in zip(lo, hi)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, count)


def _fmt(value: float) -> str:
    return f"{value:.4g}"


def emit_svg_scatter(points: np.ndarray, color_by: np.ndarray, path,
                     title: str = "", xlabel: str = "x", ylabel: str = "y",
                     categorical: bool | None = None) -> Path:
    """Write a 2-D scatter of ``points`` colored by ``color_by`` to ``path``.

    ``categorical=None`` treats integer color values with at most 10 distinct
    levels as classes and anything else as a scalar ramp.  Empty input still
    produces a valid SVG with axes and no circles.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2) \
        if np.asarray(points).size else np.empty((0, 2))
    color_by = np.asarray(color_by)
    if color_by.size != points.shape[0]:
        raise ValidationError("color_by must have one value per point")
    if categorical is None:
        categorical = (points.shape[0] > 0
                       and color_by.dtype.kind in "iubUSO"
                       and np.unique(color_by).size <= len(_CATEGORY_COLORS))

    if points.shape[0]:
        x_lo, x_hi = float(points[:, 0].min()), float(points[:, 0].max())
        y_lo, y_hi = float(points[:, 1].min()), float(points[:, 1].max())
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333" stroke-width="1"/>',
    ]
    if title:
        parts.append(f'<text x="{_WIDTH / 2:.1f}" y="22" text-anchor="middle" '
                     f'font-size="14" font-family="sans-serif">{title}</text>')
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(f'<line x1="{px:.1f}" y1="{_MARGIN_T + plot_h}" '
                     f'x2="{px:.1f}" y2="{_MARGIN_T + plot_h + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px:.1f}" y="{_MARGIN_T + plot_h + 18}" '
                     f'text-anchor="middle" font-size="10" '
                     f'font-family="sans-serif">{_fmt(tick)}</text>')
    for tick in _ticks(y_lo, y_hi):
        py = sy(tick)
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{py:.1f}" '
                     f'x2="{_MARGIN_L}" y2="{py:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{py + 3:.1f}" '
                     f'text-anchor="end" font-size="10" '
                     f'font-family="sans-serif">{_fmt(tick)}</text>')
    parts.append(f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 10}" '
                 f'text-anchor="middle" font-size="12" '
                 f'font-family="sans-serif">{xlabel}</text>')
    parts.append(f'<text x="16" y="{_MARGIN_T + plot_h / 2:.1f}" '
                 f'text-anchor="middle" font-size="12" font-family="sans-serif" '
                 f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.1f})">'
                 f'{ylabel}</text>')

    legend_x = _WIDTH - _MARGIN_R + 16
    if points.shape[0]:
        if categorical:
            levels = np.unique(color_by)
            color_of = {lvl: _CATEGORY_COLORS[i % len(_CATEGORY_COLORS)]
                        for i, lvl in enumerate(levels)}
            for (px, py), c in zip(points, color_by):
                parts.append(f'<circle cx="{sx(px):.2f}" cy="{sy(py):.2f}" '
                             f'r="3" fill="{color_of[c]}" fill-opacity="0.8"/>')
            for i, lvl in enumerate(levels):
                ly = _MARGIN_T + 14 * i
                parts.append(f'<rect x="{legend_x}" y="{ly}" width="10" '
                             f'height="10" fill="{color_of[lvl]}"/>')
                parts.append(f'<text x="{legend_x + 14}" y="{ly + 9}" '
                             f'font-size="10" font-family="sans-serif">{lvl}</text>')
        else:
            values = color_by.astype(np.float64)
            v_lo, v_hi = float(values.min()), float(values.max())
            span = v_hi - v_lo if v_hi > v_lo else 1.0
            for (px, py), v in zip(points, values):
                color = _ramp_color((float(v) - v_lo) / span)
                parts.append(f'<circle cx="{sx(px):.2f}" cy="{sy(py):.2f}" '
                             f'r="3" fill="{color}" fill-opacity="0.8"/>')
            bar_h = 120
            for i in range(bar_h):
                color = _ramp_color(1.0 - i / (bar_h - 1))
                parts.append(f'<rect x="{legend_x}" y="{_MARGIN_T + i}" '
                             f'width="12" height="1.5" fill="{color}"/>')
            parts.append(f'<text x="{legend_x + 16}" y="{_MARGIN_T + 8}" '
                         f'font-size="10" font-family="sans-serif">{_fmt(v_hi)}</text>')
            parts.append(f'<text x="{legend_x + 16}" y="{_MARGIN_T + bar_h}" '
                         f'font-size="10" font-family="sans-serif">{_fmt(v_lo)}</text>')
    parts.append("</svg>")

    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path
