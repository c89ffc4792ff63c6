"""Color clustering and recoloring.

Two clustering routes feed the rest of the system: hierarchical clustering
for automatic palette discovery, and seeded K-means for the interactive
"number of clusters decided on line" path. Both produce the same stats
record (per-cluster mean, covariance, count, label map) consumed by the
color-distribution loss and by the recolor operations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .bicolor import BiColoredEdge, BiColoredEdgeSet
from .raster import GrayImage, InvalidArgumentError, RasterImage

# Flat-color clusters have singular covariance; Eq-style KL math inverts it.
COV_REGULARIZATION = 1e-6

_MAX_AGGLOMERATION_SAMPLES = 4096


@dataclass(frozen=True)
class ColorClusterStats:
    """Per-cluster Gaussian statistics over RGB values.

    Clusters are stored in canonical order (descending pixel count, ties by
    lexicographic mean) unless built from a caller-supplied labeling.
    ``label_map`` holds the cluster index per pixel, -1 outside the mask.
    ``covs`` are population covariances plus a 1e-6 identity floor, so they
    are always positive definite.
    """

    k: int
    means: np.ndarray   # (K, 3)
    covs: np.ndarray    # (K, 3, 3)
    counts: np.ndarray  # (K,) int64
    label_map: np.ndarray  # (H, W) int64
    k_reduced: bool = False

    def validate(self) -> None:
        if self.means.shape != (self.k, 3) or self.covs.shape != (self.k, 3, 3):
            raise ValueError("stats array shapes inconsistent with k")
        if int(self.counts.sum()) != int((self.label_map >= 0).sum()):
            raise ValueError("cluster counts must sum to labeled pixel count")
        labels = self.label_map[self.label_map >= 0]
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValueError("labels out of range")
        for cov in self.covs:
            if not np.allclose(cov, cov.T):
                raise ValueError("covariance not symmetric")
            if np.linalg.eigvalsh(cov).min() < COV_REGULARIZATION * 0.5:
                raise ValueError("covariance not positive definite")

    def to_json_dict(self) -> dict:
        return {
            "k": int(self.k),
            "clusters": [
                {
                    "mean": [float(v) for v in self.means[i]],
                    "cov": [[float(v) for v in row] for row in self.covs[i]],
                    "count": int(self.counts[i]),
                }
                for i in range(self.k)
            ],
        }


def _masked_pixels(img: RasterImage, mask: GrayImage):
    if img.shape[:2] != mask.shape:
        raise InvalidArgumentError("image and mask dimensions must match")
    sel = mask.data > 0.5
    if not sel.any():
        raise InvalidArgumentError("mask selects no pixels")
    return img.data[sel], sel


def _stats_for_labels(colors: np.ndarray, labels: np.ndarray, k: int):
    means = np.zeros((k, 3), dtype=np.float64)
    covs = np.zeros((k, 3, 3), dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    eye = np.eye(3) * COV_REGULARIZATION
    for i in range(k):
        pts = colors[labels == i]
        counts[i] = len(pts)
        if len(pts) == 0:
            covs[i] = eye
            continue
        means[i] = pts.mean(axis=0)
        d = pts - means[i]
        covs[i] = (d.T @ d) / len(pts) + eye
    return means, covs, counts


def _canonicalize(colors, labels, k, sel_mask, shape, k_reduced=False) -> ColorClusterStats:
    """Build stats in canonical cluster order; empty clusters are dropped."""
    means, covs, counts = _stats_for_labels(colors, labels, k)
    live = np.flatnonzero(counts > 0)
    order = sorted(live, key=lambda i: (-counts[i], tuple(means[i])))
    remap = np.full(k, -1, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    label_map = np.full(shape, -1, dtype=np.int64)
    label_map[sel_mask] = remap[labels]
    order = np.array(order, dtype=np.int64)
    return ColorClusterStats(
        k=len(order),
        means=means[order],
        covs=covs[order],
        counts=counts[order],
        label_map=label_map,
        k_reduced=k_reduced,
    )


def hierarchical_clusters(
    img: RasterImage, mask: GrayImage, dist_thresh: float = 0.12
) -> ColorClusterStats:
    """Agglomerative color clustering (average linkage, RGB Euclidean).

    The O(n^2) agglomeration runs on at most 4096 masked pixels sampled on
    an even stride; every masked pixel is then labeled by its nearest
    cluster mean and statistics are recomputed from that full labeling.
    """
    if dist_thresh <= 0:
        raise InvalidArgumentError("dist_thresh must be positive")
    colors, sel = _masked_pixels(img, mask)
    n = len(colors)
    if n <= 2:
        labels = np.zeros(n, dtype=np.int64)
        return _canonicalize(colors, labels, 1, sel, mask.shape)

    stride_idx = np.unique(
        np.round(np.linspace(0, n - 1, min(n, _MAX_AGGLOMERATION_SAMPLES))).astype(np.int64)
    )
    sub = colors[stride_idx]
    z = linkage(sub, method="average", metric="euclidean")
    sub_labels = fcluster(z, t=dist_thresh, criterion="distance") - 1
    k = int(sub_labels.max()) + 1
    centers = np.stack([sub[sub_labels == i].mean(axis=0) for i in range(k)])

    d2 = ((colors[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    return _canonicalize(colors, labels, k, sel, mask.shape)


def kmeans_clusters(
    img: RasterImage, mask: GrayImage, k: int, seed: int
) -> ColorClusterStats:
    """Seeded K-means (k-means++ init, Lloyd to assignment fixpoint).

    Requesting more clusters than distinct colors returns one cluster per
    distinct color with the ``k_reduced`` flag set.
    """
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    colors, sel = _masked_pixels(img, mask)
    distinct = np.unique(colors, axis=0)
    if k >= len(distinct):
        d2 = ((colors[:, None, :] - distinct[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        return _canonicalize(
            colors, labels, len(distinct), sel, mask.shape, k_reduced=k > len(distinct)
        )

    rng = np.random.Generator(np.random.PCG64(seed))
    centers = _kmeans_pp_init(colors, k, rng)
    labels = np.zeros(len(colors), dtype=np.int64)
    for _ in range(100):
        d2 = ((colors[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        assigned = d2[np.arange(len(colors)), new_labels].copy()
        for i in range(k):
            pts = colors[new_labels == i]
            if len(pts):
                centers[i] = pts.mean(axis=0)
            else:
                # Re-seed a starved cluster at the worst-represented pixel.
                far = int(assigned.argmax())
                centers[i] = colors[far]
                new_labels[far] = i
                assigned[far] = 0.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return _canonicalize(colors, labels, k, sel, mask.shape)


def _kmeans_pp_init(colors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(colors)
    centers = np.empty((k, 3), dtype=np.float64)
    centers[0] = colors[rng.integers(n)]
    d2 = ((colors - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[i] = colors[rng.integers(n)]
            continue
        centers[i] = colors[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((colors - centers[i]) ** 2).sum(axis=1))
    return centers


def stats_from_labels(img: RasterImage, label_map: np.ndarray) -> ColorClusterStats:
    """Cluster stats of an image grouped by an existing label map.

    Cluster order follows the label indices (no canonical re-sort), so stats
    of a candidate image computed under the reference image's labels stay
    index-aligned with the reference stats.
    """
    if img.shape[:2] != label_map.shape:
        raise InvalidArgumentError("image and label map dimensions must match")
    sel = label_map >= 0
    if not sel.any():
        raise InvalidArgumentError("label map selects no pixels")
    labels = label_map[sel]
    k = int(labels.max()) + 1
    means, covs, counts = _stats_for_labels(img.data[sel], labels, k)
    return ColorClusterStats(
        k=k,
        means=means,
        covs=covs,
        counts=counts,
        label_map=label_map.astype(np.int64),
    )


def recolor_clusters(img: RasterImage, stats: ColorClusterStats, mapping: dict) -> RasterImage:
    """Shift every pixel of a mapped cluster by (new mean - old mean), clamped.

    Texture within a cluster is preserved because the shift is uniform;
    unmapped clusters and unlabeled pixels pass through untouched.
    """
    if img.shape[:2] != stats.label_map.shape:
        raise InvalidArgumentError("image and stats dimensions must match")
    out = img.data.copy()
    for idx, new_color in mapping.items():
        idx = int(idx)
        if idx < 0 or idx >= stats.k:
            raise InvalidArgumentError(f"unknown cluster index {idx}")
        shift = np.asarray(new_color, dtype=np.float64) - stats.means[idx]
        pix = stats.label_map == idx
        out[pix] += shift
    return RasterImage(np.clip(out, 0.0, 1.0))


def recolor_edges(
    edge_set: BiColoredEdgeSet, from_color, to_color, tol: float
) -> BiColoredEdgeSet:
    """Replace every side sample within tol (RGB Euclidean) of from_color."""
    if tol < 0:
        raise InvalidArgumentError("tol must be >= 0")
    src = np.asarray(from_color, dtype=np.float64)
    dst = np.asarray(to_color, dtype=np.float64)
    new_edges = []
    for e in edge_set.edges:
        left = e.left_colors.copy()
        right = e.right_colors.copy()
        for arr in (left, right):
            hit = np.sqrt(((arr - src) ** 2).sum(axis=1)) <= tol
            arr[hit] = dst
        new_edges.append(
            BiColoredEdge(e.points.copy(), left, right, e.normals.copy(), e.closed)
        )
    return replace(edge_set, edges=new_edges)
