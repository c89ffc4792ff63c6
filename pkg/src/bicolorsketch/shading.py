"""Intrinsic decomposition I = R x S and the deterministic shading renderer.

The decomposition is cluster-driven: reflectance is piecewise constant (each
color cluster's pixels take the cluster mean) and shading is the per-pixel
channel mean of I / R. The renderer turns sparse shading-edge curves into a
smooth valley field that multiplies the reflectance back into a shaded image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _filters
from .bicolor import canny_edge_map
from .contour import ContourMap, OpenContourError, outer_boundary
from .palette import ColorClusterStats
from .raster import GrayImage, InvalidArgumentError, RasterImage, pointwise_product

# Reflectance floor: S = I/R is undefined at black, and 1/255 bounds S by 255*I.
EPSILON = 1.0 / 255.0


@dataclass(frozen=True)
class IntrinsicPair:
    """Reflectance (piecewise-constant RGB) and shading (scalar, >= 0).

    ``clamped`` counts reflectance channel values lifted to the EPSILON floor.
    """

    reflectance: RasterImage
    shading: GrayImage
    clamped: int = 0

    def __post_init__(self):
        if self.reflectance.shape[:2] != self.shading.shape:
            raise InvalidArgumentError("reflectance and shading dimensions must match")
        if self.shading.data.min() < 0:
            raise InvalidArgumentError("shading must be >= 0")


@dataclass(frozen=True)
class ShadeCfg:
    a: float = 0.5
    sigma: float = 4.0
    s_min: float = 0.3


def decompose(
    img: RasterImage, garment_mask: GrayImage, clusters: ColorClusterStats
) -> IntrinsicPair:
    """Factor an image into reflectance and shading using color clusters.

    Each cluster's pixels take the cluster-mean color as reflectance (the
    largest cluster is the dominant area; smaller clusters extend the scheme
    with their own means). Shading is the channel mean of I / R on the
    garment and exactly 1 outside it, so I = R x S holds trivially there.
    """
    if img.shape[:2] != garment_mask.shape:
        raise InvalidArgumentError("image and mask dimensions must match")
    mask = garment_mask.data > 0.5
    if not mask.any():
        raise InvalidArgumentError("garment mask selects no pixels")

    reflectance = img.data.copy()
    clamped = 0
    for i in range(clusters.k):
        mean = clusters.means[i]
        clamped += int((mean < EPSILON).sum())
        safe = np.clip(mean, EPSILON, 1.0)
        reflectance[mask & (clusters.label_map == i)] = safe
    # Mask pixels the clustering never labeled fall back to the largest cluster.
    orphan = mask & (clusters.label_map < 0)
    if orphan.any():
        reflectance[orphan] = np.clip(clusters.means[0], EPSILON, 1.0)

    shading = np.ones(garment_mask.shape, dtype=np.float64)
    ratios = img.data[mask] / np.maximum(reflectance[mask], EPSILON)
    shading[mask] = ratios.mean(axis=1)
    return IntrinsicPair(RasterImage(reflectance), GrayImage(shading), clamped)


def recompose(pair: IntrinsicPair) -> RasterImage:
    return pointwise_product(pair.reflectance, pair.shading)


def shading_edges_for_training(
    img: RasterImage, garment_mask: GrayImage, clusters: ColorClusterStats
) -> GrayImage:
    """Canny edges of the image restricted to the largest cluster's area."""
    if img.shape[:2] != garment_mask.shape:
        raise InvalidArgumentError("image and mask dimensions must match")
    if not (garment_mask.data > 0.5).any():
        raise InvalidArgumentError("garment mask selects no pixels")
    edges = canny_edge_map(img, low=0.08, high=0.2, sigma=1.4)
    largest = (clusters.label_map == 0) & (garment_mask.data > 0.5)
    return GrayImage(np.where(largest, edges.data, 0.0))


def render_shading(
    contour: ContourMap, shading_edges: GrayImage, cfg: ShadeCfg = ShadeCfg()
) -> GrayImage:
    """Deterministic shading from sparse edges: a clamped Gaussian valley field.

    S = clamp(1 - a * B, s_min, 1) inside the garment region and 1 outside,
    where B is the Gaussian blur of the edge mask scaled to peak at 1, so a
    single edge carves a valley of depth exactly a. Empty edges give S = 1
    everywhere, which keeps the dense prior (shading close to 1) exact.
    """
    if contour.mask.shape != shading_edges.shape:
        raise InvalidArgumentError("contour and shading edges dimensions must match")
    out = np.ones(shading_edges.shape, dtype=np.float64)
    edge_mask = (shading_edges.data > 0.5).astype(np.float64)
    if edge_mask.any():
        blur = _filters.gaussian_blur_separable(edge_mask, cfg.sigma)
        peak = blur.max()
        if peak > 0:
            blur = blur / peak
        valley = np.clip(1.0 - cfg.a * blur, cfg.s_min, 1.0)
        try:
            region = outer_boundary(contour).data > 0.5
        except OpenContourError:
            region = np.ones(shading_edges.shape, dtype=bool)
        out = np.where(region, valley, 1.0)
    return GrayImage(out)


def enhance(image: RasterImage, shading: GrayImage) -> RasterImage:
    """Final composite S x R, clamped to the displayable range."""
    product = pointwise_product(image, shading)
    return RasterImage(np.clip(product.data, 0.0, 1.0))
