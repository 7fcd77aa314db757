"""Dependency-free SVG charts for evaluation reports.

Static markup only: no timestamps, generator comments, or random ids, so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

from typing import Sequence

_PALETTE = ("#4878a8", "#e49444", "#6a9f58", "#b65c60", "#8a7bb0")


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _f(x: float) -> str:
    return f"{x:.2f}"


def grouped_bar_svg(
    title: str,
    categories: Sequence[str],
    series: Sequence[tuple[str, Sequence[float]]],
    *,
    y_max: float = 1.0,
) -> str:
    """Grouped vertical bars, one group per category, values in [0, y_max]."""
    left, right, top, bottom = 56.0, 16.0, 44.0, 40.0
    group_width = max(30.0 * len(series) + 24.0, 72.0)
    plot_w = group_width * len(categories)
    plot_h = 240.0
    width = left + plot_w + right
    height = top + plot_h + bottom

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{_f(width)}" height="{_f(height)}" fill="white"/>',
        f'<text x="{_f(width / 2)}" y="18" text-anchor="middle" '
        f'font-size="13">{_esc(title)}</text>',
    ]
    # horizontal gridlines and y labels
    ticks = 5
    for i in range(ticks + 1):
        value = y_max * i / ticks
        y = top + plot_h - plot_h * i / ticks
        parts.append(
            f'<line x1="{_f(left)}" y1="{_f(y)}" x2="{_f(left + plot_w)}" '
            f'y2="{_f(y)}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{_f(left - 6)}" y="{_f(y + 4)}" '
            f'text-anchor="end">{_f(value)}</text>'
        )
    # bars
    bar_w = (group_width - 24.0) / max(len(series), 1)
    for ci, category in enumerate(categories):
        gx = left + ci * group_width + 12.0
        for si, (_name, values) in enumerate(series):
            value = min(max(values[ci], 0.0), y_max)
            bar_h = plot_h * value / y_max
            x = gx + si * bar_w
            y = top + plot_h - bar_h
            color = _PALETTE[si % len(_PALETTE)]
            parts.append(
                f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(bar_w - 3)}" '
                f'height="{_f(bar_h)}" fill="{color}"/>'
            )
            parts.append(
                f'<text x="{_f(x + (bar_w - 3) / 2)}" y="{_f(y - 3)}" '
                f'text-anchor="middle" font-size="9">{_f(values[ci])}</text>'
            )
        parts.append(
            f'<text x="{_f(left + ci * group_width + group_width / 2)}" '
            f'y="{_f(top + plot_h + 16)}" text-anchor="middle">'
            f"{_esc(category)}</text>"
        )
    # legend
    lx = left
    ly = height - 12.0
    for si, (name, _values) in enumerate(series):
        color = _PALETTE[si % len(_PALETTE)]
        parts.append(
            f'<rect x="{_f(lx)}" y="{_f(ly - 9)}" width="10" height="10" '
            f'fill="{color}"/>'
        )
        parts.append(f'<text x="{_f(lx + 14)}" y="{_f(ly)}">{_esc(name)}</text>')
        lx += 14 + 7.0 * len(name) + 18
    parts.append(
        f'<line x1="{_f(left)}" y1="{_f(top)}" x2="{_f(left)}" '
        f'y2="{_f(top + plot_h)}" stroke="#333333"/>'
    )
    parts.append(
        f'<line x1="{_f(left)}" y1="{_f(top + plot_h)}" '
        f'x2="{_f(left + plot_w)}" y2="{_f(top + plot_h)}" stroke="#333333"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def curve_svg(
    title: str,
    points: Sequence[tuple[float, float]],
    *,
    x_label: str,
    y_label: str,
    marked_x: float | None = None,
) -> str:
    """A single polyline over x in [0, 1], y in [0, 1], with point markers."""
    left, right, top, bottom = 56.0, 20.0, 44.0, 48.0
    plot_w, plot_h = 420.0, 240.0
    width = left + plot_w + right
    height = top + plot_h + bottom

    def px(x: float) -> float:
        return left + plot_w * x

    def py(y: float) -> float:
        return top + plot_h * (1.0 - min(max(y, 0.0), 1.0))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{_f(width)}" height="{_f(height)}" fill="white"/>',
        f'<text x="{_f(width / 2)}" y="18" text-anchor="middle" '
        f'font-size="13">{_esc(title)}</text>',
    ]
    for i in range(6):
        value = i / 5
        parts.append(
            f'<line x1="{_f(left)}" y1="{_f(py(value))}" '
            f'x2="{_f(left + plot_w)}" y2="{_f(py(value))}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{_f(left - 6)}" y="{_f(py(value) + 4)}" '
            f'text-anchor="end">{_f(value)}</text>'
        )
        parts.append(
            f'<text x="{_f(px(value))}" y="{_f(top + plot_h + 16)}" '
            f'text-anchor="middle">{_f(value)}</text>'
        )
    if marked_x is not None:
        parts.append(
            f'<line x1="{_f(px(marked_x))}" y1="{_f(top)}" '
            f'x2="{_f(px(marked_x))}" y2="{_f(top + plot_h)}" '
            f'stroke="#b65c60" stroke-dasharray="4,3"/>'
        )
    coords = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in points)
    parts.append(
        f'<polyline points="{coords}" fill="none" stroke="#4878a8" '
        f'stroke-width="1.5"/>'
    )
    for x, y in points:
        parts.append(
            f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="2.4" fill="#4878a8"/>'
        )
    parts.append(
        f'<text x="{_f(left + plot_w / 2)}" y="{_f(height - 10)}" '
        f'text-anchor="middle">{_esc(x_label)}</text>'
    )
    parts.append(
        f'<text x="14" y="{_f(top + plot_h / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_f(top + plot_h / 2)})">{_esc(y_label)}</text>'
    )
    parts.append(
        f'<line x1="{_f(left)}" y1="{_f(top)}" x2="{_f(left)}" '
        f'y2="{_f(top + plot_h)}" stroke="#333333"/>'
    )
    parts.append(
        f'<line x1="{_f(left)}" y1="{_f(top + plot_h)}" '
        f'x2="{_f(left + plot_w)}" y2="{_f(top + plot_h)}" stroke="#333333"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
