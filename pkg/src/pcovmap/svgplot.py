"""Standalone SVG scatter plots with optional decision-boundary backgrounds.

The emitted SVG documents use only inline styles and embed the background
raster as a base64 PNG (encoded here with zlib, no imaging dependency).
Rasters can also be written as plain PGM files.
"""

import base64
import struct
import zlib

import numpy as np

__all__ = ["raster_to_pgm", "encode_png", "scatter_svg", "CLASS_COLORS"]

# class index -> fill color; cycles past the palette length
CLASS_COLORS = [
    "#e41a1c", "#4daf4a", "#377eb8", "#984ea3", "#ff7f00",
    "#a65628", "#f781bf", "#999999", "#66c2a5", "#fc8d62",
]

# lighter versions used for the background raster
_BG_COLORS = [
    (250, 205, 205), (205, 235, 205), (205, 220, 245), (230, 210, 240),
    (250, 230, 200), (230, 215, 205), (250, 225, 240), (230, 230, 230),
    (215, 240, 230), (250, 225, 210),
]


def raster_to_pgm(raster):
    """Serialize an integer label raster as an ASCII PGM image."""
    R = np.asarray(raster)
    maxval = max(int(R.max()), 1)
    lines = [f"P2", f"{R.shape[1]} {R.shape[0]}", str(maxval)]
    for row in R:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def encode_png(rgb):
    """Minimal PNG encoder for an (h, w, 3) uint8 array."""
    rgb = np.asarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    raw = b"".join(b"\x00" + rgb[i].tobytes() for i in range(h))

    def chunk(tag, data):
        out = struct.pack(">I", len(data)) + tag + data
        return out + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    header = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n"
            + chunk(b"IHDR", header)
            + chunk(b"IDAT", zlib.compress(raw, 9))
            + chunk(b"IEND", b""))


def _raster_rgb(raster):
    R = np.asarray(raster)
    rgb = np.zeros((R.shape[0], R.shape[1], 3), dtype=np.uint8)
    for c in np.unique(R):
        color = _BG_COLORS[int(c) % len(_BG_COLORS)]
        rgb[R == c] = color
    # flip: raster origin is the min corner, image origin is top-left
    return rgb[::-1]


def scatter_svg(points, labels, bounds=None, raster=None, opacity=None,
                width=640, height=480, title=None):
    """SVG scatter of a 2-D embedding, colored by class.

    ``raster`` (from :func:`pcovmap.analysis.decision_grid`) is embedded
    as a background image spanning ``bounds``; ``opacity`` gives a
    per-point alpha (e.g. translucent train, opaque test).
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    y = np.asarray(labels).ravel()
    if bounds is None:
        lo = P.min(axis=0)
        hi = P.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
        bounds = (lo[0] - 0.1 * span[0], hi[0] + 0.1 * span[0],
                  lo[1] - 0.1 * span[1], hi[1] + 0.1 * span[1])
    x0, x1, y0, y1 = bounds

    def sx(v):
        return (v - x0) / (x1 - x0) * width

    def sy(v):
        return height - (v - y0) / (y1 - y0) * height

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if raster is not None:
        png = encode_png(_raster_rgb(raster))
        b64 = base64.b64encode(png).decode()
        parts.append(
            f'<image x="0" y="0" width="{width}" height="{height}" '
            f'preserveAspectRatio="none" '
            f'href="data:image/png;base64,{b64}"/>'
        )
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="16" text-anchor="middle" '
            f'style="font-family:sans-serif;font-size:13px">{title}</text>'
        )
    for i in range(P.shape[0]):
        color = CLASS_COLORS[int(y[i]) % len(CLASS_COLORS)]
        op = 1.0 if opacity is None else float(opacity[i])
        parts.append(
            f'<circle cx="{sx(P[i, 0]):.2f}" cy="{sy(P[i, 1]):.2f}" r="3" '
            f'fill="{color}" fill-opacity="{op:.2f}" '
            f'stroke="#333333" stroke-width="0.4"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
