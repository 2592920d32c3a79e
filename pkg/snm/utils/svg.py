"""
Self-rendered line charts

Output depends only on the series passed in, so a chart regenerated from its CSV is byte-identical.
"""

import dataclasses
import math

from collections.abc import Sequence
from html import escape

_PALETTE = ('#1f77b4', '#d62728', '#2ca02c', '#ff7f0e', '#9467bd', '#8c564b', '#e377c2', '#17becf')


@dataclasses.dataclass(frozen=True)
class Series:
    label: str
    points: tuple[tuple[float, float], ...]


def nice_ticks(low: float, high: float, count: int = 5) -> list[float]:
    """Round tick positions covering [low, high], at least two distinct ones"""
    # spans below this are widened around their centre, nearly constant curves stay drawable
    min_span = 1e-9 * max(1.0, abs(low), abs(high))
    if high - low < min_span:
        centre = 0.5 * (low + high)
        low, high = centre - 0.5 * min_span, centre + 0.5 * min_span
    raw = (high - low) / max(count, 1)
    magnitude = 10.0 ** math.floor(math.log10(raw))
    step = next(m * magnitude for m in (1.0, 2.0, 2.5, 5.0, 10.0) if m * magnitude >= raw)
    digits = max(12, 3 - math.floor(math.log10(step)))
    first = math.floor(low / step) * step
    ticks = []
    value = first
    while value <= high + step * 1e-9:
        ticks.append(round(value, digits))
        value += step
    if ticks[-1] < high:
        ticks.append(round(value, digits))
    return ticks


def _fmt(value: float) -> str:
    return f'{value:.2f}'


def _labels(ticks: Sequence[float]) -> list[str]:
    """Shortest general format, from six significant digits up, that tells the ticks apart"""
    for digits in range(6, 16):
        labels = [f'{value:.{digits}g}' for value in ticks]
        if len(set(labels)) == len(labels):
            return labels
    return [repr(value) for value in ticks]


def render_line_chart(
    series: Sequence[Series],
    *,
    title: str,
    x_label: str,
    y_label: str,
    width: int = 720,
    height: int = 460,
    reference: float | None = None,
) -> str:
    """
    Axes, one polyline per series and a legend

    :param series: Curves, drawn in the given order
    :param title: Chart title
    :param x_label: Horizontal axis label
    :param y_label: Vertical axis label
    :param width: Canvas width in pixels
    :param height: Canvas height in pixels
    :param reference: Optional horizontal reference line
    :return:
    """
    left, right, top, bottom = 70.0, 170.0, 40.0, 55.0
    finite = [(x, y) for s in series for x, y in s.points if math.isfinite(x) and math.isfinite(y)]
    xs = [x for x, _ in finite] or [0.0, 1.0]
    ys = [y for _, y in finite] or [0.0, 1.0]
    if reference is not None:
        ys.append(reference)
    x_ticks = nice_ticks(min(xs), max(xs))
    y_ticks = nice_ticks(min(ys), max(ys))
    x0, x1 = x_ticks[0], x_ticks[-1]
    y0, y1 = y_ticks[0], y_ticks[-1]
    plot_w = width - left - right
    plot_h = height - top - bottom

    def px(x: float) -> float:
        return left + (x - x0) / (x1 - x0) * plot_w

    def py(y: float) -> float:
        return top + (y1 - y) / (y1 - y0) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{_fmt(left + plot_w / 2)}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<g class="axes" stroke="black" fill="none">'
        f'<line x1="{_fmt(left)}" y1="{_fmt(top + plot_h)}" x2="{_fmt(left + plot_w)}" y2="{_fmt(top + plot_h)}"/>'
        f'<line x1="{_fmt(left)}" y1="{_fmt(top)}" x2="{_fmt(left)}" y2="{_fmt(top + plot_h)}"/></g>',
    ]
    ticks = ['<g class="ticks">']
    for x, label in zip(x_ticks, _labels(x_ticks)):
        ticks.append(
            f'<line x1="{_fmt(px(x))}" y1="{_fmt(top + plot_h)}" x2="{_fmt(px(x))}" y2="{_fmt(top + plot_h + 5)}" '
            f'stroke="black"/><text x="{_fmt(px(x))}" y="{_fmt(top + plot_h + 18)}" text-anchor="middle">'
            f'{label}</text>'
        )
    for y, label in zip(y_ticks, _labels(y_ticks)):
        ticks.append(
            f'<line x1="{_fmt(left - 5)}" y1="{_fmt(py(y))}" x2="{_fmt(left)}" y2="{_fmt(py(y))}" stroke="black"/>'
            f'<line x1="{_fmt(left)}" y1="{_fmt(py(y))}" x2="{_fmt(left + plot_w)}" y2="{_fmt(py(y))}" '
            f'stroke="#dddddd"/><text x="{_fmt(left - 8)}" y="{_fmt(py(y) + 4)}" text-anchor="end">{label}</text>'
        )
    ticks.append('</g>')
    parts.extend(ticks)
    parts.append(
        f'<text x="{_fmt(left + plot_w / 2)}" y="{_fmt(height - 12)}" text-anchor="middle">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="18" y="{_fmt(top + plot_h / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_fmt(top + plot_h / 2)})">{escape(y_label)}</text>'
    )
    if reference is not None:
        parts.append(
            f'<line class="reference" x1="{_fmt(left)}" y1="{_fmt(py(reference))}" x2="{_fmt(left + plot_w)}" '
            f'y2="{_fmt(py(reference))}" stroke="gray" stroke-dasharray="4 3"/>'
        )
    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        points = ' '.join(
            f'{_fmt(px(x))},{_fmt(py(y))}' for x, y in s.points if math.isfinite(x) and math.isfinite(y)
        )
        parts.append(
            f'<polyline class="series" data-label="{escape(s.label)}" points="{points}" '
            f'fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        legend_y = top + 10 + 18 * i
        parts.append(
            f'<line x1="{_fmt(width - right + 15)}" y1="{_fmt(legend_y)}" x2="{_fmt(width - right + 40)}" '
            f'y2="{_fmt(legend_y)}" stroke="{color}" stroke-width="2"/>'
            f'<text x="{_fmt(width - right + 46)}" y="{_fmt(legend_y + 4)}">{escape(s.label)}</text>'
        )
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'
