"""Minimal deterministic SVG plots (line and scatter), no plotting library."""
from __future__ import annotations

from . import __version__

GENERATOR = f"branchlab {__version__}"

W, H = 480, 320
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 30, 45


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _scale(lo, hi, a, b):
    span = (hi - lo) or 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi):
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f"<!-- generator: {GENERATOR} -->",
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="13">{title}</text>',
        f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}" stroke="black"/>',
        f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 8}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{(TOP + H - BOTTOM) / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {(TOP + H - BOTTOM) / 2})">{ylabel}</text>',
        f'<text x="{LEFT}" y="{H - BOTTOM + 15}" text-anchor="middle" font-size="10">{xlo:g}</text>',
        f'<text x="{W - RIGHT}" y="{H - BOTTOM + 15}" text-anchor="middle" font-size="10">{xhi:g}</text>',
        f'<text x="{LEFT - 5}" y="{H - BOTTOM}" text-anchor="end" font-size="10">{ylo:.3g}</text>',
        f'<text x="{LEFT - 5}" y="{TOP + 4}" text-anchor="end" font-size="10">{yhi:.3g}</text>',
    ]
    return out


def line_plot(xs, ys, title: str, xlabel: str, ylabel: str) -> str:
    xs, ys = [float(x) for x in xs], [float(y) for y in ys]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = 0.0, max(max(ys), 1e-300)
    sx = _scale(xlo, xhi, LEFT, W - RIGHT)
    sy = _scale(ylo, yhi, H - BOTTOM, TOP)
    out = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys))
    out.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>')
    out += [f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" fill="steelblue"/>' for x, y in zip(xs, ys)]
    out.append("</svg>")
    return "\n".join(out) + "\n"


def scatter_plot(xs, ys, title: str, xlabel: str, ylabel: str, highlight=()) -> str:
    xs, ys = [float(x) for x in xs], [float(y) for y in ys]
    xlo, xhi = min(xs + [0.0]), max(xs + [1.0])
    ylo, yhi = min(ys + [0.0]), max(ys + [1.0])
    sx = _scale(xlo, xhi, LEFT, W - RIGHT)
    sy = _scale(ylo, yhi, H - BOTTOM, TOP)
    out = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    marked = set(highlight)
    for i, (x, y) in enumerate(zip(xs, ys)):
        colour = "crimson" if i in marked else "steelblue"
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3" fill="{colour}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
