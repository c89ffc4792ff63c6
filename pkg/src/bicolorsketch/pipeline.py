"""Dataset construction: garment photos to training triples.

Each source image yields a contour map, a bi-colored edge set, and (for
garments dominated by pure-color areas) a shading-edge map plus the
decomposed shading image. The corpus builder writes one directory per
sample and a manifest; everything it writes is deterministic, so reruns on
unchanged input are byte-stable, and samples whose source hash is already
on disk are skipped.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bicolor import (
    BiColoredEdgeSet,
    detect_texture_edges,
    rasterize_bicolor,
    remove_corners,
    remove_outermost,
    sample_bicolor,
)
from .contour import (
    ContourConfig,
    ContourMap,
    OpenContourError,
    extract_contour,
    outer_boundary,
    simplify_contour,
)
from .palette import hierarchical_clusters
from .raster import (
    CANVAS_SIZE,
    GrayImage,
    InvalidArgumentError,
    RasterImage,
    load_rgb_png,
    resample,
    save_gray_png,
    save_rgb_png,
    save_shading_png,
)
from .shading import decompose, shading_edges_for_training

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


@dataclass(frozen=True)
class PipelineCfg:
    canvas: int = CANVAS_SIZE
    contour: ContourConfig = ContourConfig()
    canny_low: float = 0.08
    canny_high: float = 0.2
    canny_sigma: float = 1.4
    outermost_band: int = 3
    corner_angle: float = 60.0
    corner_window: int = 5
    sample_offset: float = 2.0
    cluster_dist_thresh: float = 0.12
    min_pure_fraction: float = 0.5
    train_fraction: float = 3900 / 4300
    ablation: bool = False


@dataclass
class TrainingSample:
    id: str
    contour: ContourMap
    bicolor: BiColoredEdgeSet
    source: RasterImage
    source_hash: str = ""
    shading_edges: GrayImage = None
    shading: GrayImage = None
    no_mask: bool = False
    pure_fraction: float = 0.0
    cluster_count: int = 0

    def validate(self) -> None:
        size = self.contour.mask.shape
        if size != self.source.shape[:2]:
            raise ValueError("sample rasters must share the canonical canvas")
        if not self.contour.mask.is_binary():
            raise ValueError("contour must be binary")
        self.bicolor.validate()
        if (self.shading_edges is None) != (self.shading is None):
            raise ValueError("shading fields must be present together")
        if self.shading is not None:
            if not self.shading_edges.is_binary():
                raise ValueError("shading edges must be binary")
            if self.shading.data.min() < 0:
                raise ValueError("shading must be >= 0")


def build_sample(img: RasterImage, cfg: PipelineCfg = PipelineCfg(), sample_id: str = "sample") -> TrainingSample:
    """Run the full extraction chain on one photo.

    Open-contour images still produce contour and texture layers but carry
    the no_mask flag and no shading pair; closed ones gain the shading pair
    when the largest color cluster covers at least min_pure_fraction of the
    garment.
    """
    if img.shape[:2] != (cfg.canvas, cfg.canvas):
        img = resample(img, cfg.canvas, cfg.canvas)

    contour = simplify_contour(extract_contour(img, cfg.contour), cfg.contour.min_branch_len)
    chains = detect_texture_edges(img, cfg.canny_low, cfg.canny_high, cfg.canny_sigma)
    chains = remove_outermost(chains, contour, cfg.outermost_band)
    chains = remove_corners(chains, cfg.corner_angle, cfg.corner_window)
    edges = sample_bicolor(img, chains, cfg.sample_offset)

    sample = TrainingSample(id=sample_id, contour=contour, bicolor=edges, source=img)
    try:
        garment = outer_boundary(contour)
    except OpenContourError:
        sample.no_mask = True
        return sample

    clusters = hierarchical_clusters(img, garment, cfg.cluster_dist_thresh)
    sample.cluster_count = clusters.k
    sample.pure_fraction = float(clusters.counts[0] / clusters.counts.sum())
    if sample.pure_fraction >= cfg.min_pure_fraction:
        sample.shading_edges = shading_edges_for_training(img, garment, clusters)
        sample.shading = decompose(img, garment, clusters).shading
    return sample


def _stable_split(name: str, train_fraction: float) -> str:
    digest = hashlib.sha256(name.encode("utf-8")).hexdigest()
    value = int(digest[:8], 16) / 0xFFFFFFFF
    return "train" if value < train_fraction else "val"


def _write_sample(sample: TrainingSample, out_dir: Path, cfg: PipelineCfg) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    save_rgb_png(sample.source, out_dir / "source.png")
    save_gray_png(sample.contour.mask, out_dir / "contour.png")
    color, coverage = rasterize_bicolor(sample.bicolor)
    save_rgb_png(color, out_dir / "bicolor.png")
    (out_dir / "bicolor.json").write_text(
        json.dumps(sample.bicolor.to_json_dict(), sort_keys=True) + "\n"
    )
    if sample.shading is not None:
        save_gray_png(sample.shading_edges, out_dir / "shading_edges.png")
        save_shading_png(sample.shading, out_dir / "shading.u16.png")
    meta = {
        "id": sample.id,
        "source_hash": sample.source_hash,
        "canvas": cfg.canvas,
        "no_mask": sample.no_mask,
        "has_shading": sample.shading is not None,
        "pure_fraction": round(sample.pure_fraction, 6),
        "cluster_count": sample.cluster_count,
        "edge_count": len(sample.bicolor.edges),
        "skipped_short": sample.bicolor.skipped_short,
    }
    if cfg.ablation:
        meta["ablation"] = _write_ablation_layers(sample, out_dir)
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return meta


def _write_ablation_layers(sample: TrainingSample, out_dir: Path) -> dict:
    """Sparse color points and a center texture patch for comparison runs.

    Point count, point sizes and the patch size follow the training-time
    randomization ranges (50-100 points of 1x1..9x9, patch 50x50..70x70),
    seeded from the source hash so reruns are stable.
    """
    seed = int(sample.source_hash[:8] or "0", 16)
    rng = np.random.Generator(np.random.PCG64(seed))
    h, w = sample.source.shape[:2]

    points = np.ones((h, w, 3), dtype=np.float64)
    n_points = int(rng.integers(50, 101))
    for _ in range(n_points):
        size = int(rng.integers(1, 10))
        y = int(rng.integers(0, h - size + 1))
        x = int(rng.integers(0, w - size + 1))
        points[y : y + size, x : x + size] = sample.source.data[y, x]
    save_rgb_png(RasterImage(points), out_dir / "ablation_points.png")

    patch = int(rng.integers(50, 71))
    y0 = (h - patch) // 2
    x0 = (w - patch) // 2
    crop = sample.source.data[y0 : y0 + patch, x0 : x0 + patch]
    save_rgb_png(RasterImage(crop), out_dir / "ablation_patch.png")
    return {"points": n_points, "patch_size": patch}


def build_corpus(src_dir, out_dir, cfg: PipelineCfg = PipelineCfg()) -> dict:
    """Process every image under src_dir into out_dir/<id>/ plus manifest.json.

    Unreadable or failing images are recorded under "failures" and skipped;
    samples whose stored source hash matches are not reprocessed. The
    manifest carries no timestamps, so identical input yields identical
    bytes.
    """
    src = Path(src_dir)
    out = Path(out_dir)
    if not src.is_dir():
        raise InvalidArgumentError(f"not a directory: {src}")
    out.mkdir(parents=True, exist_ok=True)

    files = sorted(
        p for p in src.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file()
    )
    samples = []
    failures = []
    split_counts = {"train": 0, "val": 0}
    for path in files:
        sample_id = path.stem
        sample_dir = out / sample_id
        source_hash = hashlib.sha256(path.read_bytes()).hexdigest()
        split = _stable_split(path.name, cfg.train_fraction)

        meta_path = sample_dir / "meta.json"
        meta = None
        if meta_path.exists():
            try:
                cached = json.loads(meta_path.read_text())
                if cached.get("source_hash") == source_hash:
                    meta = cached
            except (json.JSONDecodeError, OSError):
                meta = None
        if meta is None:
            try:
                img = load_rgb_png(path)
                sample = build_sample(img, cfg, sample_id=sample_id)
                sample.source_hash = source_hash
                sample.validate()
                meta = _write_sample(sample, sample_dir, cfg)
            except (InvalidArgumentError, ValueError, OSError) as exc:
                failures.append({"file": path.name, "error": str(exc)})
                continue
        split_counts[split] += 1
        samples.append(
            {
                "id": sample_id,
                "split": split,
                "source_hash": source_hash,
                "no_mask": bool(meta["no_mask"]),
                "has_shading": bool(meta["has_shading"]),
            }
        )

    manifest = {
        "canvas": cfg.canvas,
        "count": len(samples),
        "split_counts": split_counts,
        "samples": samples,
        "failures": failures,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
