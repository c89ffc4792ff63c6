"""Garment contour maps: extraction from photos, simplification, interior fill."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage import morphology

from . import _filters
from .raster import GrayImage, InvalidArgumentError, RasterImage

_N8 = np.ones((3, 3), dtype=int)
_N4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


class OpenContourError(ValueError):
    """Raised when no closed outer region can be derived from a contour map."""


@dataclass(frozen=True)
class ContourConfig:
    sigma: float = 2.0
    high_percentile: float = 90.0
    high_cap: float = 0.25  # absolute ceiling: edges this strong always seed
    low_ratio: float = 0.4
    min_branch_len: int = 12


@dataclass(frozen=True)
class ContourMap:
    """A binary sketch of the garment silhouette and major seams.

    ``provenance`` records whether the map came out of the detector or was
    drawn by hand (user-drawn maps bypass extraction entirely).
    """

    mask: GrayImage
    provenance: str = "extracted"

    def __post_init__(self):
        if self.provenance not in ("extracted", "user-drawn"):
            raise InvalidArgumentError(f"unknown provenance {self.provenance!r}")
        if not self.mask.is_binary():
            raise InvalidArgumentError("contour mask must be binary")


def extract_contour(img: RasterImage, cfg: ContourConfig = ContourConfig()) -> ContourMap:
    """Detect the garment silhouette and major internal seams.

    Gaussian blur, Sobel gradient magnitude, hysteresis thresholding at the
    given percentile (capped at cfg.high_cap so a weakly-lit silhouette half
    still seeds when the scene also holds much stronger edges), then
    morphological thinning down to 1-px curves. A gradient-free (uniform)
    image yields an empty map.
    """
    gray = _filters.luminance(img.data)
    smoothed = _filters.gaussian_blur_separable(gray, cfg.sigma)
    gx, gy = _filters.sobel_gradients(smoothed)
    mag = _filters.gradient_magnitude(gx, gy)

    nonzero = mag[mag > 1e-12]
    if nonzero.size == 0:
        return ContourMap(GrayImage.zeros(img.width, img.height), "extracted")
    high = min(float(np.percentile(nonzero, cfg.high_percentile)), cfg.high_cap)
    low = cfg.low_ratio * high

    edges = _hysteresis_mask(mag, low, high)
    thinned = morphology.thin(edges)
    return ContourMap(GrayImage(thinned.astype(np.float64)), "extracted")


def _hysteresis_mask(mag: np.ndarray, low: float, high: float) -> np.ndarray:
    weak = mag >= low
    strong = mag >= high
    if not strong.any():
        return np.zeros_like(weak)
    labels, _ = ndimage.label(weak, structure=_N8)
    keep = np.unique(labels[strong])
    return np.isin(labels, keep[keep > 0])


def simplify_contour(cm: ContourMap, min_branch_len: int) -> ContourMap:
    """Drop connected components and dangling branches shorter than the threshold.

    Runs to a fixpoint so applying it twice at the same threshold is a no-op;
    never adds pixels.
    """
    mask = cm.mask.data > 0.5
    while True:
        changed = False
        labels, n = ndimage.label(mask, structure=_N8)
        if n:
            sizes = np.bincount(labels.ravel())
            small = np.flatnonzero(sizes < min_branch_len)
            small = small[small > 0]
            if small.size:
                mask = mask & ~np.isin(labels, small)
                changed = True
        pruned = _prune_short_branches(mask, min_branch_len)
        if pruned is not None:
            mask = pruned
            changed = True
        if not changed:
            break
    return ContourMap(GrayImage(mask.astype(np.float64)), cm.provenance)


def _neighbor_counts(mask: np.ndarray) -> np.ndarray:
    counts = ndimage.convolve(mask.astype(np.int32), _N8, mode="constant", cval=0)
    return counts - mask.astype(np.int32)


def _prune_short_branches(mask: np.ndarray, min_branch_len: int):
    """Remove endpoint-to-junction runs shorter than min_branch_len, or None."""
    counts = _neighbor_counts(mask)
    endpoints = np.argwhere(mask & (counts == 1))
    if endpoints.size == 0:
        return None
    h, w = mask.shape
    to_remove = set()
    for ey, ex in endpoints:
        cur = (int(ey), int(ex))
        branch = [cur]
        seen = {cur}
        hit_junction = False
        while len(branch) < min_branch_len:
            nxt = None
            cy, cx = cur
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and (ny, nx) not in seen:
                        nxt = (ny, nx)
                        break
                if nxt:
                    break
            if nxt is None:
                break
            if counts[nxt] >= 3:
                hit_junction = True
                break
            cur = nxt
            branch.append(cur)
            seen.add(cur)
        if hit_junction:
            to_remove.update(branch)
    if not to_remove:
        return None
    out = mask.copy()
    ys, xs = zip(*to_remove)
    out[list(ys), list(xs)] = False
    return out


def outer_boundary(cm: ContourMap) -> GrayImage:
    """Filled interior of the outermost closed contour (curve pixels included).

    A single 3x3 morphological closing pass bridges 1-px gaps in hand-drawn
    curves before flood filling from the canvas border; the result never
    touches the border itself.
    """
    mask = cm.mask.data > 0.5
    work = ndimage.binary_closing(mask, structure=_N8)

    background = ~work
    labels, _ = ndimage.label(background, structure=_N4)
    border_ids = np.unique(
        np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
    )
    border_ids = border_ids[border_ids > 0]
    exterior = np.isin(labels, border_ids)
    interior_bg = background & ~exterior
    if not interior_bg.any():
        raise OpenContourError(
            "no closed region found (gap closing tried: one 3x3 morphological pass)"
        )
    touching_curve = work & ndimage.binary_dilation(interior_bg, structure=_N8)
    filled = interior_bg | touching_curve
    filled[0, :] = filled[-1, :] = False
    filled[:, 0] = filled[:, -1] = False
    return GrayImage(filled.astype(np.float64))
