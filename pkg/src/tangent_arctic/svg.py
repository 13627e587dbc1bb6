"""SVG 1.1 rendering of tilings with an optional arctic-curve overlay."""
from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

from .sampler import F, R, U, TileGrid, deterministic_cells, tile_polygon
from .profile import DefectSequence

FILLS = {U: "#1f4fd1", F: "#d62a2a", R: "#2a9d3a"}
STROKE = "#000000"


def overlay_map(n: int):
    """Rescaled path coordinates to the plane of the tile polygons."""
    return lambda X, Y: (n * X + 0.5, n * Y + 0.5)


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def _outline_edges(grid: TileGrid, mask: np.ndarray) -> list[tuple[tuple, tuple]]:
    """Boundary of the union of the masked tiles: unit edges used once."""
    edges: Counter = Counter()
    for x, y, k in grid.cells():
        if not mask[y, x - 1]:
            continue
        pts = tile_polygon(x, y, k)
        for p, q in zip(pts, pts[1:] + pts[:1]):
            edges[tuple(sorted((p, q)))] += 1
    return [e for e, c in edges.items() if c == 1]


def render_svg(grid: TileGrid, seq: DefectSequence,
               curve: Sequence[Sequence[tuple[float, float]]] | None = None,
               outline: bool = True, scale: float = 8.0, stroke_width: float = 0.05) -> str:
    """One ``<polygon>`` per tile, the curve portions as ``<path>`` elements,
    and the deterministically frozen region as a white dashed ``<path>``."""
    n = seq.n
    width = grid.width + 2
    height = grid.height + 2
    W, H = width * scale, height * scale

    def pt(x, y):
        return f"{_fmt(x * scale)},{_fmt((height - y) * scale)}"

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(W)}" '
           f'height="{_fmt(H)}" viewBox="0 0 {_fmt(W)} {_fmt(H)}">',
           f'<g stroke="{STROKE}" stroke-width="{_fmt(stroke_width * scale)}">']
    for x, y, k in grid.cells():
        pts = " ".join(pt(px, py) for px, py in tile_polygon(x, y, k))
        out.append(f'<polygon points="{pts}" fill="{FILLS[k]}"/>')
    out.append("</g>")

    if outline:
        edges = _outline_edges(grid, deterministic_cells(seq))
        if edges:
            d = " ".join(f"M{pt(*p)} L{pt(*q)}" for p, q in edges)
            out.append(f'<path d="{d}" fill="none" stroke="#ffffff" '
                       f'stroke-width="{_fmt(3 * stroke_width * scale)}" '
                       f'stroke-dasharray="{_fmt(0.4 * scale)},{_fmt(0.3 * scale)}"/>')

    if curve:
        to_plane = overlay_map(n)
        for portion in curve:
            xy = [to_plane(X, Y) for X, Y in portion]
            if len(xy) < 2:
                continue
            d = "M" + " L".join(pt(px, py) for px, py in xy)
            out.append(f'<path d={quoteattr(d)} fill="none" stroke="#000000" '
                       f'stroke-width="{_fmt(4 * stroke_width * scale)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_curve_svg(portions: Iterable[Sequence[tuple[float, float]]], alpha_end: float,
                     scale: float = 300.0) -> str:
    """Stand-alone plot of the predicted curve in rescaled coordinates, with
    the lower boundary ``[0, alpha(1)]``."""
    portions = [list(p) for p in portions]
    W = (alpha_end + 0.2) * scale
    H = 1.2 * scale

    def pt(X, Y):
        return f"{_fmt((X + 0.1) * scale)},{_fmt((1.1 - Y) * scale)}"

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(W)}" '
           f'height="{_fmt(H)}" viewBox="0 0 {_fmt(W)} {_fmt(H)}">',
           f'<path d="M{pt(0, 0)} L{pt(alpha_end, 0)}" stroke="#888888" stroke-width="2"/>']
    for p in portions:
        if len(p) < 2:
            continue
        d = "M" + " L".join(pt(X, min(Y, 1.05)) for X, Y in p)
        out.append(f'<path d={quoteattr(d)} fill="none" stroke="#000000" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
