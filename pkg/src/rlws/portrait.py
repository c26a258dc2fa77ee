"""Deterministic SVG phase portraits of the half-disk domain.

Draws the domain, the requested level curves (from the marching-squares
oracle), the horizontal-tangent locus, the acceleration-singular locus
(b > 0), the critical points and the boundary special sets.  Output is
byte-stable for a fixed configuration: fixed palette, fixed 6-significant-
digit coordinate formatting, deterministic polyline ordering.
"""
from __future__ import annotations

import math

import numpy as np

from .contour import contour_oracle
from .formats import fmt6, fmt17
from .phase import (
    Coefficients,
    boundary_intersections,
    critical_data,
    singular_locus_intersections,
)

__all__ = ["render_portrait", "default_levels"]

_W = 440
_H = 780
_MARGIN = 18.0
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#e377c2", "#7f7f7f", "#bcbd22")


def _mapper():
    scale = min((_W - 2 * _MARGIN) / 1.12, (_H - 2 * _MARGIN) / 2.12)

    def to_px(u, v):
        return (_MARGIN + (u + 0.06) * scale, _MARGIN + (1.06 - v) * scale)

    return to_px, scale


def default_levels(co: Coefficients, count: int = 9) -> list[float]:
    """Evenly spaced interior levels of the attainable range."""
    cd = critical_data(co)
    lo, hi = cd.alpha_min, cd.alpha0
    return [lo + (hi - lo) * (k + 1) / (count + 1) for k in range(count)]


def _locus_polyline(q):
    # the family v^2 = 1 - q u^2 parametrized as (sin(psi)/sqrt(q), cos(psi))
    psi = np.linspace(0.0, math.pi, 257)
    return np.column_stack([np.sin(psi) / math.sqrt(q), np.cos(psi)])


def render_portrait(co: Coefficients, levels: list[float], grid_n: int = 512,
                    show_gamma: bool = True, show_singular: bool = True):
    """Render the portrait; returns (svg_text, csv_rows).

    csv_rows lists every contour vertex as (level, u, v) strings at full
    precision, ordered by level, then polyline, then vertex.
    """
    to_px, scale = _mapper()
    cd = critical_data(co)

    def pts_attr(poly):
        return " ".join("%s,%s" % tuple(map(fmt6, to_px(p[0], p[1])))
                        for p in poly)

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">')
    out.append(f"<title>phase portrait a={fmt6(co.a)} b={fmt6(co.b)} "
               f"c={fmt6(co.c)}</title>")
    out.append(f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>')

    # domain: axis segment plus the u > 0 half of the unit circle
    x0, y_top = to_px(0.0, 1.0)
    _, y_bot = to_px(0.0, -1.0)
    r = fmt6(scale)
    out.append(f'<path d="M {fmt6(x0)} {fmt6(y_top)} A {r} {r} 0 0 1 '
               f'{fmt6(x0)} {fmt6(y_bot)} Z" fill="#f7f7f7" stroke="#444444" '
               'stroke-width="1.2"/>')

    csv_rows = []
    legend = []
    for idx, alpha in enumerate(levels):
        color = _PALETTE[idx % len(_PALETTE)]
        cs = contour_oracle(co, alpha, grid_n)
        for poly in cs.polylines:
            out.append(f'<polyline fill="none" stroke="{color}" '
                       f'stroke-width="1.1" points="{pts_attr(poly)}"/>')
            for p in poly:
                csv_rows.append((fmt17(alpha), fmt17(p[0]), fmt17(p[1])))
        bdry = boundary_intersections(co, alpha)
        for p in bdry.axis + bdry.circle:
            px, py = to_px(p.u, p.v)
            out.append(f'<circle cx="{fmt6(px)}" cy="{fmt6(py)}" r="2.2" '
                       f'fill="none" stroke="{color}" stroke-width="1"/>')
        legend.append((alpha, color, len(cs.polylines)))

    if show_gamma:
        q = 1.0 + (cd.tau / co.a) ** 2
        out.append(f'<polyline fill="none" stroke="#555555" stroke-width="1" '
                   f'stroke-dasharray="6,3" points="{pts_attr(_locus_polyline(q))}"/>')
    if show_singular and co.b > 0.0:
        q = 1.0 + (co.a / (2.0 * co.b)) ** 2
        out.append(f'<polyline fill="none" stroke="#aa3333" stroke-width="1" '
                   f'stroke-dasharray="2,3" points="{pts_attr(_locus_polyline(q))}"/>')
        for alpha in levels:
            for p in singular_locus_intersections(co, alpha):
                px, py = to_px(p.u, p.v)
                out.append(f'<circle cx="{fmt6(px)}" cy="{fmt6(py)}" r="2.6" '
                           'fill="none" stroke="#aa3333" stroke-width="1.2"/>')

    for p in cd.critical_points:
        px, py = to_px(p.u, p.v)
        out.append(f'<circle cx="{fmt6(px)}" cy="{fmt6(py)}" r="3" '
                   'fill="#000000"/>')

    ly = 14.0
    for alpha, color, npoly in legend:
        out.append(f'<text x="6" y="{fmt6(ly)}" font-family="monospace" '
                   f'font-size="10" fill="{color}">alpha={fmt6(alpha)} '
                   f'({npoly} curve{"s" if npoly != 1 else ""})</text>')
        ly += 12.0
    out.append("</svg>")
    return "\n".join(out) + "\n", csv_rows
