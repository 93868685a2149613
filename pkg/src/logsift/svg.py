"""Minimal self-contained SVG emitters (inline styles, no external assets).

Hand-rolled rather than delegated to a plotting library so report output is
byte-identical across runs and viewable on air-gapped systems.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
)

_FONT = 'font-family="monospace"'


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def line_chart(
    series: dict[str, list[tuple[float, float]]],
    title: str,
    x_label: str = "",
    y_label: str = "",
    width: int = 760,
    height: int = 420,
) -> str:
    """Multi-series line chart; series keys become the legend."""
    ml, mr, mt, mb = 70, 160, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x: float) -> float:
        return ml + pw * (x - x_lo) / (x_hi - x_lo)

    def py(y: float) -> float:
        return mt + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="22" text-anchor="middle" {_FONT} '
        f'font-size="14">{escape(title)}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333" stroke-width="1"/>',
    ]
    for i in range(5):
        frac = i / 4
        y = y_lo + frac * (y_hi - y_lo)
        yy = py(y)
        parts.append(
            f'<line x1="{ml}" y1="{_fmt(yy)}" x2="{ml + pw}" y2="{_fmt(yy)}" '
            f'stroke="#ddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ml - 6}" y="{_fmt(yy + 4)}" text-anchor="end" {_FONT} '
            f'font-size="10">{y:.3g}</text>'
        )
        x = x_lo + frac * (x_hi - x_lo)
        xx = px(x)
        parts.append(
            f'<text x="{_fmt(xx)}" y="{height - mb + 16}" text-anchor="middle" '
            f'{_FONT} font-size="10">{x:.6g}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{ml + pw // 2}" y="{height - 10}" text-anchor="middle" '
            f'{_FONT} font-size="11">{escape(x_label)}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="16" y="{mt + ph // 2}" text-anchor="middle" {_FONT} '
            f'font-size="11" transform="rotate(-90 16 {mt + ph // 2})">'
            f"{escape(y_label)}</text>"
        )
    for i, (name, pts) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        if pts:
            coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
        ly = mt + 14 + 16 * i
        parts.append(
            f'<rect x="{ml + pw + 10}" y="{ly - 9}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{ml + pw + 24}" y="{ly}" {_FONT} font-size="10">'
            f"{escape(name)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _heat_color(t: float) -> str:
    """White -> deep blue ramp for t in [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    r = round(255 + (8 - 255) * t)
    g = round(255 + (81 - 255) * t)
    b = round(255 + (156 - 255) * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(
    values,
    title: str,
    row_labels=None,
    col_labels=None,
    log_scale: bool = False,
    cell: int = 14,
) -> str:
    """Grid heatmap; values is a 2-d row-major sequence."""
    rows = [list(map(float, row)) for row in values]
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    if log_scale:
        rows = [[math.log10(1.0 + max(v, 0.0)) for v in row] for row in rows]
    flat = [v for row in rows for v in row]
    v_lo, v_hi = (min(flat), max(flat)) if flat else (0.0, 1.0)
    span = (v_hi - v_lo) or 1.0
    label_w = 120 if row_labels else 10
    label_h = 90 if col_labels else 10
    width = label_w + n_cols * cell + 20
    height = 40 + n_rows * cell + label_h
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" {_FONT} '
        f'font-size="13">{escape(title)}</text>',
    ]
    y0 = 34
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            color = _heat_color((v - v_lo) / span)
            parts.append(
                f'<rect x="{label_w + j * cell}" y="{y0 + i * cell}" '
                f'width="{cell}" height="{cell}" fill="{color}" '
                f'stroke="#eee" stroke-width="0.5"/>'
            )
    if row_labels:
        for i, label in enumerate(row_labels):
            parts.append(
                f'<text x="{label_w - 4}" y="{y0 + i * cell + cell - 3}" '
                f'text-anchor="end" {_FONT} font-size="9">{escape(str(label))}</text>'
            )
    if col_labels:
        for j, label in enumerate(col_labels):
            x = label_w + j * cell + cell // 2
            y = y0 + n_rows * cell + 8
            parts.append(
                f'<text x="{x}" y="{y}" {_FONT} font-size="9" '
                f'transform="rotate(60 {x} {y})">{escape(str(label))}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
