"""Bi-colored texture edges: the double-line texture representation.

A texture edge is an ordered pixel chain annotated, at every point, with the
colors sampled on both flanks. Detection runs a full Canny pass; the chains
are pruned (outermost band, corners), sampled, and can be rasterized back to
the double-line raster the synthesizer consumes. Brushes emit the same
structure directly from user strokes.

Orientation convention, fixed globally so serialized edges are portable:
image coordinates have y pointing down, the normal is the tangent rotated
+90 degrees ((tx, ty) -> (-ty, tx)), and "left" is the +normal side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage import morphology

from . import _filters
from .contour import ContourMap, OpenContourError, outer_boundary
from .raster import GrayImage, InvalidArgumentError, RasterImage, sample_bilinear

_N8 = np.ones((3, 3), dtype=int)

# tan(22.5 deg): sector boundary for 4-direction gradient quantization.
_TAN22 = 0.4142135623730951


@dataclass(frozen=True)
class CannyConfig:
    sigma: float = 1.4
    low: float = 0.08
    high: float = 0.2


@dataclass(frozen=True)
class BrushSpec:
    """Interactive brush: kind "2-string" (one bi-colored edge, colors =
    (left, right)) or "4-string" (pinstripe pair; colors = (stripe, ground)
    or (stripe, left ground, right ground))."""

    kind: str
    colors: tuple
    spacing: float = 6.0


@dataclass
class BiColoredEdge:
    points: np.ndarray        # (N, 2) float64, columns (x, y)
    left_colors: np.ndarray   # (N, 3) float64
    right_colors: np.ndarray  # (N, 3) float64
    normals: np.ndarray       # (N, 2) float64, unit length
    closed: bool = False

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        self.left_colors = np.asarray(self.left_colors, dtype=np.float64)
        self.right_colors = np.asarray(self.right_colors, dtype=np.float64)
        self.normals = np.asarray(self.normals, dtype=np.float64)
        n = len(self.points)
        if n < 2:
            raise InvalidArgumentError("BiColoredEdge needs at least 2 points")
        if not (len(self.left_colors) == len(self.right_colors) == len(self.normals) == n):
            raise InvalidArgumentError("BiColoredEdge field lengths must match")

    def validate(self) -> None:
        steps = np.abs(np.diff(self.points, axis=0)).max(axis=1)
        if steps.size and steps.max() > 1.0 + 1e-6:
            raise ValueError("consecutive edge points must be 8-neighbors")
        norms = np.sqrt((self.normals ** 2).sum(axis=1))
        if np.abs(norms - 1.0).max() > 1e-6:
            raise ValueError("edge normals must be unit length")


@dataclass
class BiColoredEdgeSet:
    edges: list
    canvas: tuple  # (width, height)
    skipped_short: int = 0

    def validate(self) -> None:
        w, h = self.canvas
        for e in self.edges:
            e.validate()
            if e.points.size:
                x, y = e.points[:, 0], e.points[:, 1]
                if x.min() < 0 or y.min() < 0 or x.max() > w - 1 or y.max() > h - 1:
                    raise ValueError("edge points outside canvas bounds")

    def colors_in_use(self) -> list:
        """Distinct (r, g, b) 8-bit tuples over all side samples, sorted."""
        seen = set()
        for e in self.edges:
            for arr in (e.left_colors, e.right_colors):
                q = np.clip(np.floor(arr * 255.0 + 0.5), 0, 255).astype(int)
                seen.update(map(tuple, q.tolist()))
        return sorted(seen)

    def to_json_dict(self) -> dict:
        def q(colors):
            return np.clip(np.floor(colors * 255.0 + 0.5), 0, 255).astype(int).tolist()

        return {
            "canvas": {"w": int(self.canvas[0]), "h": int(self.canvas[1])},
            "edges": [
                {
                    "points": [[float(x), float(y)] for x, y in e.points],
                    "left": q(e.left_colors),
                    "right": q(e.right_colors),
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "BiColoredEdgeSet":
        canvas = (int(doc["canvas"]["w"]), int(doc["canvas"]["h"]))
        edges = []
        for rec in doc.get("edges", []):
            pts = np.asarray(rec["points"], dtype=np.float64)
            if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
                raise InvalidArgumentError("edge points must be an (N>=2, 2) list")
            left = np.asarray(rec["left"], dtype=np.float64) / 255.0
            right = np.asarray(rec["right"], dtype=np.float64) / 255.0
            if len(left) != len(pts) or len(right) != len(pts):
                raise InvalidArgumentError("edge colors must match point count")
            closed = bool(np.all(pts[0] == pts[-1])) and len(pts) > 3
            normals = _chain_normals(pts, closed)
            edges.append(BiColoredEdge(pts, left, right, normals, closed))
        return cls(edges, canvas)


# --- Canny detection --------------------------------------------------------


def canny_edge_map(img: RasterImage, low: float, high: float, sigma: float = 1.4) -> GrayImage:
    """Binary Canny edge map: Gaussian smooth, Sobel, non-maximum suppression
    along the quantized gradient direction, then hysteresis.

    Every arithmetic step runs in float64 with a fixed evaluation order, so
    the output is reproducible bit for bit against a scalar reference.
    """
    if not (high >= low > 0):
        raise InvalidArgumentError("thresholds must satisfy high >= low > 0")
    gray = _filters.luminance(img.data)
    smoothed = _filters.gaussian_blur2d(gray, sigma)
    gx, gy = _filters.sobel_gradients(smoothed)
    mag = _filters.gradient_magnitude(gx, gy)
    nms = _nonmax_suppress(mag, gx, gy)
    edges = _hysteresis(nms, low, high)
    return GrayImage(edges.astype(np.float64))


def _nonmax_suppress(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Keep pixels that are >= both neighbors along the gradient direction.

    The direction is quantized to 4 sectors with multiply/compare only (no
    trig), and border pixels are dropped.
    """
    h, w = mag.shape
    out = np.zeros_like(mag)
    if h < 3 or w < 3:
        return out

    c = np.s_[1:-1, 1:-1]
    m = mag[c]
    adx = np.abs(gx)[c]
    ady = np.abs(gy)[c]
    sign_mix = (gx * gy)[c]

    horiz = ady <= _TAN22 * adx      # gradient ~ horizontal: compare left/right
    vert = (adx <= _TAN22 * ady) & ~horiz
    diag = ~(horiz | vert)
    diag_dr = diag & (sign_mix > 0)  # gradient toward down-right / up-left
    diag_dl = diag & ~diag_dr

    n1 = np.zeros_like(m)
    n2 = np.zeros_like(m)
    n1[horiz] = mag[1:-1, 2:][horiz]
    n2[horiz] = mag[1:-1, :-2][horiz]
    n1[vert] = mag[2:, 1:-1][vert]
    n2[vert] = mag[:-2, 1:-1][vert]
    n1[diag_dr] = mag[2:, 2:][diag_dr]
    n2[diag_dr] = mag[:-2, :-2][diag_dr]
    n1[diag_dl] = mag[2:, :-2][diag_dl]
    n2[diag_dl] = mag[:-2, 2:][diag_dl]

    keep = (m > 0) & (m >= n1) & (m >= n2)
    out[c] = np.where(keep, m, 0.0)
    return out


def _hysteresis(nms: np.ndarray, low: float, high: float) -> np.ndarray:
    weak = nms >= low
    strong = nms >= high
    if not strong.any():
        return np.zeros(nms.shape, dtype=bool)
    labels, _ = ndimage.label(weak, structure=_N8)
    keep = np.unique(labels[strong])
    return np.isin(labels, keep[keep > 0])


def detect_texture_edges(
    img: RasterImage, low: float, high: float, sigma: float = 1.4
) -> list:
    """Canny edges linked into ordered pixel chains.

    The raw edge map is thinned first: non-maximum suppression leaves 2-px
    staircases on diagonal edges, and those would read as wall-to-wall
    junctions to the linker. Junction pixels (3+ edge neighbors) terminate
    chains and belong to none, so every chain has unambiguous tangents.
    Chains are returned in canonical order (sorted by their topmost-leftmost
    point).
    """
    edge_map = canny_edge_map(img, low, high, sigma)
    return link_chains(morphology.thin(edge_map.data > 0.5))


def link_chains(edge_mask: np.ndarray) -> list:
    """Link a binary edge mask into chains of (x, y) points, 8-connected."""
    mask = edge_mask.copy()
    counts = _count_neighbors(mask)
    mask &= counts <= 2
    counts = _count_neighbors(mask)

    h, w = mask.shape
    visited = np.zeros_like(mask)
    chains = []

    def trace(start, banned):
        path = [start]
        visited[start] = True
        prev = banned
        cur = start
        while True:
            nxt = None
            cy, cx = cur
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    ny, nx = cy + dy, cx + dx
                    if (
                        0 <= ny < h
                        and 0 <= nx < w
                        and mask[ny, nx]
                        and not visited[ny, nx]
                        and (ny, nx) != prev
                    ):
                        nxt = (ny, nx)
                        break
                if nxt:
                    break
            if nxt is None:
                return path
            visited[nxt] = True
            path.append(nxt)
            prev, cur = cur, nxt

    endpoints = np.argwhere(mask & (counts == 1))
    for ey, ex in endpoints:
        p = (int(ey), int(ex))
        if visited[p]:
            continue
        path = trace(p, None)
        if len(path) >= 2:
            chains.append(path)

    # Remaining unvisited pixels with neighbors form cycles.
    leftover = np.argwhere(mask & ~visited & (counts == 2))
    for sy, sx in leftover:
        p = (int(sy), int(sx))
        if visited[p]:
            continue
        path = trace(p, None)
        if len(path) >= 2:
            chains.append(path)

    arrays = [
        np.array([(x, y) for (y, x) in path], dtype=np.int64) for path in chains
    ]
    arrays = [_canonical_direction(a) for a in arrays]
    arrays.sort(key=lambda a: (a[:, 1].min(), a[a[:, 1].argmin(), 0], len(a)))
    return arrays


def _count_neighbors(mask: np.ndarray) -> np.ndarray:
    counts = ndimage.convolve(mask.astype(np.int32), _N8, mode="constant", cval=0)
    return counts - mask.astype(np.int32)


def _canonical_direction(chain: np.ndarray) -> np.ndarray:
    a = (chain[0, 1], chain[0, 0])
    b = (chain[-1, 1], chain[-1, 0])
    return chain if a <= b else chain[::-1].copy()


# --- pruning ----------------------------------------------------------------


def remove_outermost(chains: list, cm: ContourMap, band: int) -> list:
    """Drop chain pixels within `band` px (Chebyshev) of the outer silhouette.

    Chains split where pixels are removed, so the op is contractive and
    idempotent at a fixed band. If the contour has no closed outer region,
    distance is taken to all contour pixels instead.
    """
    if not chains:
        return []
    try:
        region = outer_boundary(cm).data > 0.5
        inner = ndimage.binary_erosion(region, structure=_N8, border_value=0)
        curve = region & ~inner
    except OpenContourError:
        curve = cm.mask.data > 0.5
    if not curve.any():
        return [c.copy() for c in chains]
    dist = ndimage.distance_transform_cdt(~curve, metric="chessboard")
    out = []
    for chain in chains:
        keep = dist[chain[:, 1], chain[:, 0]] > band
        out.extend(_split_chain(chain, keep))
    return out


def remove_corners(chains: list, angle_thresh: float, window: int) -> list:
    """Split chains at high-curvature points; the corner point itself is removed.

    The turn at point i is the angle between (P[i] - P[i-w]) and
    (P[i+w] - P[i]); points without +-window context are never corners.
    """
    if window < 2:
        raise InvalidArgumentError("corner window must be >= 2")
    cos_thresh = math.cos(math.radians(angle_thresh))
    out = []
    for chain in chains:
        n = len(chain)
        closed = _is_closed(chain)
        keep = np.ones(n, dtype=bool)
        pts = chain.astype(np.float64)
        idx = range(n) if closed else range(window, n - window)
        for i in idx:
            a = pts[(i - window) % n] if closed else pts[i - window]
            b = pts[i]
            c = pts[(i + window) % n] if closed else pts[i + window]
            v1 = b - a
            v2 = c - b
            n1 = math.hypot(*v1)
            n2 = math.hypot(*v2)
            if n1 == 0 or n2 == 0:
                continue
            cosang = (v1[0] * v2[0] + v1[1] * v2[1]) / (n1 * n2)
            if cosang < cos_thresh:
                keep[i] = False
        out.extend(_split_chain(chain, keep, closed=closed))
    return out


def _is_closed(chain: np.ndarray) -> bool:
    if len(chain) < 4:
        return False
    return np.abs(chain[0] - chain[-1]).max() <= 1


def _split_chain(chain: np.ndarray, keep: np.ndarray, closed: bool = False) -> list:
    if keep.all():
        return [chain.copy()]
    runs = []
    start = None
    for i, k in enumerate(keep):
        if k and start is None:
            start = i
        elif not k and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(keep)))
    if closed and len(runs) >= 2 and runs[0][0] == 0 and runs[-1][1] == len(keep):
        first = runs[0]
        last = runs.pop()
        merged = np.concatenate([chain[last[0] : last[1]], chain[first[0] : first[1]]])
        pieces = [merged] + [chain[a:b] for a, b in runs[1:]]
    else:
        pieces = [chain[a:b] for a, b in runs]
    return [p.copy() for p in pieces if len(p) >= 2]


# --- sampling and rasterization ---------------------------------------------


def _chain_normals(pts: np.ndarray, closed: bool) -> np.ndarray:
    """Unit normals from central-difference tangents, rotated +90 deg (y down)."""
    n = len(pts)
    if closed and np.all(pts[0] == pts[-1]):
        core = pts[:-1]
        m = len(core)
        tang = core[(np.arange(m) + 1) % m] - core[(np.arange(m) - 1) % m]
        tang = np.concatenate([tang, tang[:1]])
    elif closed:
        tang = pts[(np.arange(n) + 1) % n] - pts[(np.arange(n) - 1) % n]
    else:
        tang = np.empty_like(pts)
        tang[0] = pts[1] - pts[0]
        tang[-1] = pts[-1] - pts[-2]
        if n > 2:
            tang[1:-1] = pts[2:] - pts[:-2]
    normals = np.stack([-tang[:, 1], tang[:, 0]], axis=1)
    lengths = np.sqrt((normals ** 2).sum(axis=1))
    safe = np.where(lengths > 0, lengths, 1.0)
    return normals / safe[:, None]


def sample_bicolor(img: RasterImage, chains: list, offset: float = 2.0) -> BiColoredEdgeSet:
    """Sample flank colors at +-offset along the normal of every chain point.

    Points whose samples fall outside the canvas are removed (splitting the
    chain); chains shorter than 2 points are skipped and counted in the
    result metadata.
    """
    if offset < 1:
        raise InvalidArgumentError("sampling offset must be >= 1")
    h, w = img.height, img.width
    edges = []
    skipped = 0
    for chain in chains:
        if len(chain) < 2:
            skipped += 1
            continue
        pts = chain.astype(np.float64)
        closed = _is_closed(chain)
        normals = _chain_normals(pts, closed)
        degenerate = (normals ** 2).sum(axis=1) < 0.5
        lx = pts[:, 0] + offset * normals[:, 0]
        ly = pts[:, 1] + offset * normals[:, 1]
        rx = pts[:, 0] - offset * normals[:, 0]
        ry = pts[:, 1] - offset * normals[:, 1]
        inside = (
            (lx >= 0) & (lx <= w - 1) & (ly >= 0) & (ly <= h - 1)
            & (rx >= 0) & (rx <= w - 1) & (ry >= 0) & (ry <= h - 1)
            & ~degenerate
        )
        left = sample_bilinear(img.data, lx, ly)
        right = sample_bilinear(img.data, rx, ry)
        if inside.all():
            edges.append(BiColoredEdge(pts, left, right, normals, closed))
            continue
        for a, b in _kept_runs(inside):
            if b - a >= 2:
                edges.append(
                    BiColoredEdge(pts[a:b], left[a:b], right[a:b], normals[a:b], False)
                )
        skipped += sum(1 for a, b in _kept_runs(inside) if b - a < 2)
    edges.sort(key=lambda e: (e.points[:, 1].min(), e.points[:, 0].min()))
    return BiColoredEdgeSet(edges, (w, h), skipped_short=skipped)


def _kept_runs(keep: np.ndarray) -> list:
    runs = []
    start = None
    for i, k in enumerate(keep):
        if k and start is None:
            start = i
        elif not k and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(keep)))
    return runs


def rasterize_bicolor(edge_set: BiColoredEdgeSet):
    """Draw each edge as double lines: left color at p + normal, right color
    at p - normal (rounded to pixels). Later edges overwrite earlier ones.

    Returns (color raster, coverage mask); non-covered pixels are (0, 0, 0).
    """
    w, h = edge_set.canvas
    color = np.zeros((h, w, 3), dtype=np.float64)
    coverage = np.zeros((h, w), dtype=np.float64)
    for e in edge_set.edges:
        for side, colors in ((1.0, e.left_colors), (-1.0, e.right_colors)):
            px = np.floor(e.points[:, 0] + side * e.normals[:, 0] + 0.5).astype(np.int64)
            py = np.floor(e.points[:, 1] + side * e.normals[:, 1] + 0.5).astype(np.int64)
            for i in range(len(px)):
                x, y = px[i], py[i]
                if 0 <= x < w and 0 <= y < h:
                    color[y, x] = colors[i]
                    coverage[y, x] = 1.0
    return RasterImage(color), GrayImage(coverage)


# --- brushes ----------------------------------------------------------------


def brush_stroke(
    polyline, brush: BrushSpec, canvas: tuple = (512, 512)
) -> BiColoredEdgeSet:
    """Turn a user stroke into bi-colored edges.

    2-string: one edge along the stroke with constant (left, right) colors.
    4-string: a pinstripe pair offset +-spacing/2 along the normal; the sides
    facing each other carry the stripe color, the outer sides the ground.
    A stroke whose first and last points coincide yields closed edges with
    continuous normals.
    """
    pts_in = np.asarray(polyline, dtype=np.float64)
    if pts_in.ndim != 2 or pts_in.shape[1] != 2 or len(pts_in) < 2:
        raise InvalidArgumentError("polyline must contain at least 2 (x, y) points")
    colors = [np.asarray(c, dtype=np.float64) for c in brush.colors]
    if brush.kind == "2-string":
        if len(colors) != 2:
            raise InvalidArgumentError("2-string brush needs exactly 2 colors")
    elif brush.kind == "4-string":
        if len(colors) not in (2, 3):
            raise InvalidArgumentError("4-string brush needs 2 or 3 colors")
    else:
        raise InvalidArgumentError(f"unknown brush kind {brush.kind!r}")

    closed = bool(np.all(pts_in[0] == pts_in[-1])) and len(pts_in) > 2
    dense = _densify(pts_in, closed)
    normals = _chain_normals(dense, closed)
    n = len(dense)

    if brush.kind == "2-string":
        left = np.tile(colors[0], (n, 1))
        right = np.tile(colors[1], (n, 1))
        edge = BiColoredEdge(dense, left, right, normals, closed)
        return BiColoredEdgeSet([edge], canvas)

    stripe = colors[0]
    ground_l = colors[1]
    ground_r = colors[2] if len(colors) == 3 else colors[1]
    half = brush.spacing / 2.0
    edges = []
    for side, outer in ((1.0, ground_l), (-1.0, ground_r)):
        rail = dense + side * half * normals
        rail = _densify(rail, closed)
        rail_normals = _chain_normals(rail, closed)
        m = len(rail)
        if side > 0:
            left, right = np.tile(outer, (m, 1)), np.tile(stripe, (m, 1))
        else:
            left, right = np.tile(stripe, (m, 1)), np.tile(outer, (m, 1))
        edges.append(BiColoredEdge(rail, left, right, rail_normals, closed))
    return BiColoredEdgeSet(edges, canvas)


def _densify(pts: np.ndarray, closed: bool) -> np.ndarray:
    """Resample a polyline at <= 1 px steps (keeps the duplicate endpoint of
    closed strokes)."""
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        seg = b - a
        dist = math.hypot(seg[0], seg[1])
        if dist == 0:
            continue
        steps = max(1, int(math.ceil(dist)))
        for k in range(1, steps + 1):
            out.append(a + seg * (k / steps))
    dense = np.array(out, dtype=np.float64)
    if closed and not np.all(dense[0] == dense[-1]):
        dense = np.vstack([dense, dense[:1]])
    return dense
