"""Static pictures of a 2-d parse: every block outlined over the data."""

from __future__ import annotations

import colorsys

import numpy as np

from .errors import UsageError
from .grid import GridArray, pgm_bytes

BORDER = 128


def _gray(x: GridArray) -> np.ndarray:
    A = x.alphabet.size
    return (x.data.astype(np.int64) * 255 // (A - 1)).astype(np.uint8)


def render_pgm(x: GridArray, events, scale: int | None = None) -> bytes:
    """Data upscaled by ``scale`` with block borders drawn in mid gray."""
    if x.d != 2:
        raise UsageError("visualization needs a 2-dimensional array")
    if scale is None:
        scale = max(1, min(8, 512 // max(x.extents)))
    img = np.kron(_gray(x), np.ones((scale, scale), dtype=np.uint8))
    for e in events:
        (r, c), k = e.block.origin, e.block.side
        r0, c0, r1, c1 = r * scale, c * scale, (r + k) * scale - 1, (c + k) * scale - 1
        img[r0, c0:c1 + 1] = BORDER
        img[r1, c0:c1 + 1] = BORDER
        img[r0:r1 + 1, c0] = BORDER
        img[r0:r1 + 1, c1] = BORDER
    return pgm_bytes(img)


def _color(side: int, kmax: int) -> str:
    r, g, b = colorsys.hsv_to_rgb(0.7 * (side - 1) / max(1, kmax - 1), 0.9, 0.85)
    return "#%02x%02x%02x" % (int(r * 255), int(g * 255), int(b * 255))


def render_svg(x: GridArray, events, cell: int = 4) -> str:
    """SVG with the data as gray cells and block outlines colored by side."""
    if x.d != 2:
        raise UsageError("visualization needs a 2-dimensional array")
    h, w = x.extents
    gray = _gray(x)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell}" height="{h * cell}" '
        f'viewBox="0 0 {w} {h}" shape-rendering="crispEdges">',
        f'<rect width="{w}" height="{h}" fill="#000"/>',
    ]
    # horizontal runs of equal value keep the file small
    for r in range(h):
        row = gray[r]
        start = 0
        for c in range(1, w + 1):
            if c == w or row[c] != row[start]:
                if row[start]:
                    v = int(row[start])
                    parts.append(f'<rect x="{start}" y="{r}" width="{c - start}" height="1" '
                                 f'fill="rgb({v},{v},{v})"/>')
                start = c
    kmax = max((e.block.side for e in events), default=1)
    stroke = 1.0 / cell
    for e in events:
        (r, c), k = e.block.origin, e.block.side
        parts.append(f'<rect x="{c}" y="{r}" width="{k}" height="{k}" fill="none" '
                     f'stroke="{_color(k, kmax)}" stroke-width="{stroke:g}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
