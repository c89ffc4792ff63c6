"""Shared builders for synthetic test inputs."""

from __future__ import annotations

import numpy as np

from bicolorsketch.contour import ContourMap
from bicolorsketch.raster import GrayImage, RasterImage


def luma(c) -> float:
    return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]


def make_garment(rng, size=128):
    """Random two-tone garment: ellipse silhouette, wavy vertical tone boundary.

    Tones are drawn with a luminance gap of at least 0.3 (so the boundary is
    detectable) and both darker than the white background. Returns the image,
    the inside mask, and the union of silhouette ring and tone boundary (the
    band to exclude when scoring reconstructions).
    """
    H = W = size
    yy, xx = np.mgrid[0:H, 0:W].astype(np.float64)
    cy, cx = H / 2, W / 2
    ry = rng.uniform(0.30, 0.42) * H
    rx = rng.uniform(0.30, 0.42) * W
    d = np.sqrt(((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2)
    inside = d < 1.0
    while True:
        c1 = rng.uniform(0.05, 0.95, 3)
        c2 = rng.uniform(0.05, 0.95, 3)
        if abs(luma(c1) - luma(c2)) >= 0.3 and luma(c1) < 0.8 and luma(c2) < 0.8:
            break
    amp = rng.uniform(4, 12)
    per = rng.uniform(40, 90)
    ph = rng.uniform(0, 6.28)
    bx = cx + amp * np.sin(yy[:, 0] / per * 2 * np.pi + ph)
    imgd = np.ones((H, W, 3))
    left = xx < bx[:, None]
    imgd[inside & left] = c1
    imgd[inside & ~left] = c2
    ring = np.abs(d - 1.0) < (0.9 / min(rx, ry))
    tone_boundary = inside & (np.abs(xx - bx[:, None]) < 1.5)
    return RasterImage(imgd), inside, ring | tone_boundary


def rect_ring(size=64, margin=8) -> np.ndarray:
    """1-px rectangle perimeter as a bool mask."""
    m = np.zeros((size, size), dtype=bool)
    m[margin, margin:size - margin] = True
    m[size - margin - 1, margin:size - margin] = True
    m[margin:size - margin, margin] = True
    m[margin:size - margin, size - margin - 1] = True
    return m


def rect_contour(size=64, margin=8) -> ContourMap:
    return ContourMap(GrayImage(rect_ring(size, margin).astype(np.float64)), "user-drawn")


def two_tone(size=32, left=(0.2, 0.2, 0.2), right=(0.8, 0.8, 0.8)) -> RasterImage:
    """Vertical step: left half one tone, right half another."""
    img = np.empty((size, size, 3))
    img[:, : size // 2] = left
    img[:, size // 2:] = right
    return RasterImage(img)


def disk_image(size=64, radius=20, color=(0.1, 0.1, 0.5), bg=(1.0, 1.0, 1.0)) -> RasterImage:
    yy, xx = np.mgrid[0:size, 0:size]
    img = np.empty((size, size, 3))
    img[:] = bg
    img[(yy - size // 2) ** 2 + (xx - size // 2) ** 2 < radius ** 2] = color
    return RasterImage(img)
