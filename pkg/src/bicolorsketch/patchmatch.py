"""Texture expansion by PatchMatch-style EM synthesis.

A nearest-neighbor field (NNF) maps every target patch to its best source
patch; synthesis alternates NNF improvement (jump-flood propagation plus
random search) with a target update that averages all overlapping source
patches. Both steps minimize the same sum-of-SSD energy, so the energy is
non-increasing within a scale. All randomness flows through one seeded
generator drawn in a fixed array order, making output bit-identical across
runs and thread counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import InvalidArgumentError, RasterImage, resample


@dataclass(frozen=True)
class PMCfg:
    patch_size: int = 7
    iters: int = 5     # EM iterations per scale
    scales: int = 3    # pyramid levels (factor 2 apart)
    nnf_sweeps: int = 2  # propagation+search rounds per EM iteration


@dataclass
class NearestNeighborField:
    """Per-target-anchor source offsets and their cached patch distances.

    ``offsets[ay, ax]`` is the (sx, sy) top-left corner of the source patch
    matched to the target patch at (ax, ay); ``distances`` caches the SSD
    between the two. Anchors cover every position where a patch_size square
    fits fully inside the target.
    """

    patch_size: int
    offsets: np.ndarray    # (Ha, Wa, 2) int64, columns (sx, sy)
    distances: np.ndarray  # (Ha, Wa) float64

    def validate(self, target: np.ndarray, source: np.ndarray) -> None:
        p = self.patch_size
        hs, ws = source.shape[:2]
        sx = self.offsets[:, :, 0]
        sy = self.offsets[:, :, 1]
        if sx.min() < 0 or sy.min() < 0 or sx.max() > ws - p or sy.max() > hs - p:
            raise ValueError("NNF offsets address patches outside the source")
        actual = _patch_ssd(target, source, sx, sy, p)
        if not np.allclose(actual, self.distances, rtol=0, atol=1e-9):
            raise ValueError("cached NNF distances are stale")


def nnf_energy(nnf: NearestNeighborField) -> float:
    return float(nnf.distances.sum())


def _anchor_dims(shape, p: int):
    h, w = shape[:2]
    if h < p or w < p:
        raise InvalidArgumentError(f"image smaller than patch size {p}")
    return h - p + 1, w - p + 1


def _patch_ssd(
    target: np.ndarray, source: np.ndarray, sx: np.ndarray, sy: np.ndarray, p: int
) -> np.ndarray:
    """SSD between every target patch and the source patch it points to.

    The target side reads contiguous slices; the source side gathers with
    integer index arrays. Cost is patch_size^2 fused slice operations.
    """
    ha, wa = sx.shape
    total = np.zeros((ha, wa), dtype=np.float64)
    for du in range(p):
        for dv in range(p):
            diff = target[du : du + ha, dv : dv + wa] - source[sy + du, sx + dv]
            total += (diff * diff).sum(axis=2)
    return total


def identity_nnf(image: np.ndarray, patch_size: int) -> NearestNeighborField:
    """The NNF of an image onto itself with every patch matched in place."""
    ha, wa = _anchor_dims(image.shape, patch_size)
    ax, ay = np.meshgrid(np.arange(wa), np.arange(ha))
    offsets = np.stack([ax, ay], axis=2).astype(np.int64)
    distances = np.zeros((ha, wa), dtype=np.float64)
    return NearestNeighborField(patch_size, offsets, distances)


def random_nnf(
    target: np.ndarray, source: np.ndarray, patch_size: int, rng: np.random.Generator
) -> NearestNeighborField:
    ha, wa = _anchor_dims(target.shape, patch_size)
    hs, ws = _anchor_dims(source.shape, patch_size)
    sx = rng.integers(0, ws, size=(ha, wa))
    sy = rng.integers(0, hs, size=(ha, wa))
    offsets = np.stack([sx, sy], axis=2).astype(np.int64)
    distances = _patch_ssd(target, source, offsets[:, :, 0], offsets[:, :, 1], patch_size)
    return NearestNeighborField(patch_size, offsets, distances)


def rebuild_distances(
    nnf: NearestNeighborField, target: np.ndarray, source: np.ndarray
) -> NearestNeighborField:
    """Refresh cached distances after the target changed under a fixed NNF."""
    d = _patch_ssd(target, source, nnf.offsets[:, :, 0], nnf.offsets[:, :, 1], nnf.patch_size)
    return NearestNeighborField(nnf.patch_size, nnf.offsets.copy(), d)


def _try_candidates(
    nnf: NearestNeighborField,
    target: np.ndarray,
    source: np.ndarray,
    cand_sx: np.ndarray,
    cand_sy: np.ndarray,
) -> NearestNeighborField:
    """Accept candidate offsets wherever they strictly beat the cached distance."""
    p = nnf.patch_size
    hs, ws = source.shape[:2]
    valid = (
        (cand_sx >= 0) & (cand_sx <= ws - p) & (cand_sy >= 0) & (cand_sy <= hs - p)
    )
    safe_sx = np.where(valid, cand_sx, 0)
    safe_sy = np.where(valid, cand_sy, 0)
    d = _patch_ssd(target, source, safe_sx, safe_sy, p)
    d = np.where(valid, d, np.inf)
    better = d < nnf.distances
    offsets = nnf.offsets.copy()
    offsets[:, :, 0] = np.where(better, safe_sx, offsets[:, :, 0])
    offsets[:, :, 1] = np.where(better, safe_sy, offsets[:, :, 1])
    distances = np.where(better, d, nnf.distances)
    return NearestNeighborField(p, offsets, distances)


def propagation_sweep(
    nnf: NearestNeighborField, target: np.ndarray, source: np.ndarray
) -> NearestNeighborField:
    """One jump-flood propagation schedule.

    For step sizes halving from the field extent down to 1, each anchor
    tests the offsets of its four neighbors at that step, shifted to stay
    coherent. Every pass reads a snapshot of the field and applies all
    improvements synchronously, so the result does not depend on pixel
    visiting order.
    """
    ha, wa = nnf.distances.shape
    step = 1
    while step * 2 < max(ha, wa):
        step *= 2
    while step >= 1:
        for dy, dx in ((0, -step), (0, step), (-step, 0), (step, 0)):
            if abs(dy) >= ha or abs(dx) >= wa:
                continue  # step longer than the field: no overlap to propagate
            # Neighbor at (ay+dy, ax+dx) proposes its offset shifted by -d.
            cand = np.full_like(nnf.offsets, -1)
            src_y = slice(max(dy, 0), ha + min(dy, 0))
            src_x = slice(max(dx, 0), wa + min(dx, 0))
            dst_y = slice(max(-dy, 0), ha + min(-dy, 0))
            dst_x = slice(max(-dx, 0), wa + min(-dx, 0))
            cand[dst_y, dst_x, 0] = nnf.offsets[src_y, src_x, 0] - dx
            cand[dst_y, dst_x, 1] = nnf.offsets[src_y, src_x, 1] - dy
            nnf = _try_candidates(nnf, target, source, cand[:, :, 0], cand[:, :, 1])
        step //= 2
    return nnf


def random_search_sweep(
    nnf: NearestNeighborField,
    target: np.ndarray,
    source: np.ndarray,
    rng: np.random.Generator,
) -> NearestNeighborField:
    """Radius-halving random search around every anchor's current offset.

    Random displacements are drawn as whole arrays per radius level, so the
    draw order is fixed by construction rather than by loop scheduling.
    """
    ha, wa = nnf.distances.shape
    radius = max(source.shape[0], source.shape[1])
    while radius >= 1:
        dx = rng.integers(-radius, radius + 1, size=(ha, wa))
        dy = rng.integers(-radius, radius + 1, size=(ha, wa))
        cand_sx = nnf.offsets[:, :, 0] + dx
        cand_sy = nnf.offsets[:, :, 1] + dy
        nnf = _try_candidates(nnf, target, source, cand_sx, cand_sy)
        radius //= 2
    return nnf


def nnf_search(
    target: np.ndarray,
    source: np.ndarray,
    patch_size: int,
    rng: np.random.Generator,
    init: NearestNeighborField = None,
    sweeps: int = 2,
) -> NearestNeighborField:
    """Full NNF optimization: init (or refresh), then alternating sweeps."""
    if init is None:
        nnf = random_nnf(target, source, patch_size, rng)
    else:
        nnf = rebuild_distances(init, target, source)
    for _ in range(sweeps):
        nnf = propagation_sweep(nnf, target, source)
        nnf = random_search_sweep(nnf, target, source, rng)
    return nnf


def vote_average(
    nnf: NearestNeighborField, source: np.ndarray, target_shape: tuple
) -> np.ndarray:
    """Rebuild the target as the uniform average of all overlapping patches.

    This is the exact minimizer of the NNF energy over target pixels, which
    is what makes the EM iteration monotone.
    """
    p = nnf.patch_size
    ha, wa = nnf.distances.shape
    h, w = target_shape[:2]
    acc = np.zeros((h, w, 3), dtype=np.float64)
    cnt = np.zeros((h, w, 1), dtype=np.float64)
    sx = nnf.offsets[:, :, 0]
    sy = nnf.offsets[:, :, 1]
    for du in range(p):
        for dv in range(p):
            acc[du : du + ha, dv : dv + wa] += source[sy + du, sx + dv]
            cnt[du : du + ha, dv : dv + wa] += 1.0
    return acc / cnt


def _tile_init(src: np.ndarray, out_w: int, out_h: int, rng: np.random.Generator) -> np.ndarray:
    """Tile the source over the target with a random phase roll per tile.

    A target of exactly the source size is returned unchanged (identity
    init), which keeps the no-iteration case an exact no-op.
    """
    hs, ws = src.shape[:2]
    if (out_h, out_w) == (hs, ws):
        return src.copy()
    out = np.empty((out_h, out_w, 3), dtype=np.float64)
    for ty in range(0, out_h, hs):
        for tx in range(0, out_w, ws):
            jy = int(rng.integers(hs))
            jx = int(rng.integers(ws))
            block = np.roll(src, (-jy, -jx), axis=(0, 1))
            bh = min(hs, out_h - ty)
            bw = min(ws, out_w - tx)
            out[ty : ty + bh, tx : tx + bw] = block[:bh, :bw]
    return out


def expand_texture(
    patch: RasterImage, out_w: int, out_h: int, cfg: PMCfg = PMCfg(), seed: int = 0
) -> RasterImage:
    """Expand a texture patch to (out_w, out_h) by coarse-to-fine EM synthesis."""
    p = cfg.patch_size
    if patch.width < p or patch.height < p:
        raise InvalidArgumentError(f"patch must be at least {p}x{p}")
    if out_w < p or out_h < p:
        raise InvalidArgumentError(f"output must be at least {p}x{p}")
    rng = np.random.Generator(np.random.PCG64(seed))

    if cfg.iters < 1:
        return RasterImage(_tile_init(patch.data, out_w, out_h, rng))

    # Coarse-to-fine factors, e.g. 4, 2, 1; levels too small for a patch drop
    # out (factor 1 always survives, by the size checks above).
    levels = []
    for factor in (2 ** k for k in range(cfg.scales - 1, -1, -1)):
        sw, sh = round(patch.width / factor), round(patch.height / factor)
        tw, th = round(out_w / factor), round(out_h / factor)
        if min(sw, sh, tw, th) >= p:
            levels.append((sw, sh, tw, th))

    target = None
    for sw, sh, tw, th in levels:
        src = resample(patch, sw, sh).data
        if target is None:
            target = _tile_init(src, tw, th, rng)
        else:
            target = resample(RasterImage(target), tw, th).data
        nnf = None
        for _ in range(cfg.iters):
            nnf = nnf_search(target, src, p, rng, init=nnf, sweeps=cfg.nnf_sweeps)
            target = vote_average(nnf, src, (th, tw))
    return RasterImage(target)
