"""Minimal deterministic SVG time-series plots.

Text output only, fixed float formatting, no timestamps: the same series
always render byte-identical SVG, which keeps figures diffable in CI.
Event dates draw as vertical dashed lines.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

WIDTH = 900
HEIGHT = 360
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 45

_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


@dataclass(frozen=True)
class Series:
    label: str
    values: tuple[float, ...]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def timeseries_svg(
    dates: tuple[dt.date, ...],
    series: list[Series],
    title: str,
    event_dates: tuple[dt.date, ...] = (),
    y_label: str = "",
) -> str:
    if not dates or not series:
        raise ValueError("timeseries_svg needs dates and at least one series")
    for s in series:
        if len(s.values) != len(dates):
            raise ValueError(f"series {s.label!r} length mismatch")

    lo = min(min(s.values) for s in series)
    hi = max(max(s.values) for s in series)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    n = len(dates)

    def x_at(i: int) -> float:
        return MARGIN_LEFT + (plot_w * i / max(1, n - 1))

    def y_at(v: float) -> float:
        return MARGIN_TOP + plot_h * (1.0 - (v - lo) / (hi - lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_LEFT}" y="20" font-size="14">{title}</text>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333" stroke-width="1"/>',
    ]

    for tick in _nice_ticks(lo, hi):
        y = y_at(tick)
        parts.append(
            f'<line x1="{MARGIN_LEFT}" y1="{_fmt(y)}" x2="{MARGIN_LEFT + plot_w}" '
            f'y2="{_fmt(y)}" stroke="#ddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end">'
            f"{tick:.3g}</text>"
        )

    tick_idx = [round(i * (n - 1) / 4) for i in range(5)] if n > 1 else [0]
    for i in sorted(set(tick_idx)):
        x = x_at(i)
        parts.append(
            f'<text x="{_fmt(x)}" y="{HEIGHT - 18}" text-anchor="middle">'
            f"{dates[i].isoformat()}</text>"
        )

    date_index = {d: i for i, d in enumerate(dates)}
    for event in event_dates:
        if event not in date_index:
            continue
        x = _fmt(x_at(date_index[event]))
        parts.append(
            f'<line class="event-line" x1="{x}" y1="{MARGIN_TOP}" x2="{x}" '
            f'y2="{MARGIN_TOP + plot_h}" stroke="#888" stroke-width="1" '
            f'stroke-dasharray="5,4"/>'
        )

    for si, s in enumerate(series):
        color = _SERIES_COLORS[si % len(_SERIES_COLORS)]
        points = " ".join(f"{_fmt(x_at(i))},{_fmt(y_at(v))}" for i, v in enumerate(s.values))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT + 8 + 150 * si}" y="{MARGIN_TOP - 8}" '
            f'fill="{color}">{s.label}</text>'
        )

    if y_label:
        parts.append(
            f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.0f}" '
            f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.0f})" '
            f'text-anchor="middle">{y_label}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
