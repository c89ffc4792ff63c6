"""Command-line interface: one thin subcommand per pipeline operation.

Outputs are deterministic for fixed inputs and seeds, so downstream
Makefiles can cache them. Set BICOLOR_LOG_LEVEL to control verbosity.
"""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path

import click

from .bicolor import (
    detect_texture_edges,
    rasterize_bicolor,
    remove_corners,
    remove_outermost,
    sample_bicolor,
)
from .config import AppConfig, load_config
from .contour import ContourMap, OpenContourError, extract_contour, simplify_contour
from .document import DesignDocument
from .losses import kl_color_loss
from .palette import (
    hierarchical_clusters,
    kmeans_clusters,
    recolor_clusters,
    recolor_edges,
    stats_from_labels,
)
from .patchmatch import expand_texture
from .pipeline import build_corpus
from .raster import (
    GrayImage,
    InvalidArgumentError,
    load_mask_png,
    load_rgb_png,
    save_gray_png,
    save_rgb_png,
    save_shading_png,
)
from .shading import render_shading
from .synthesizer import full_pipeline

log = logging.getLogger("bicolorsketch")


class _PipelineGroup(click.Group):
    """Surface pipeline errors as one-line failures, not tracebacks."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (InvalidArgumentError, OpenContourError) as exc:
            raise click.ClickException(str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"invalid JSON: {exc}") from exc


@click.group(cls=_PipelineGroup)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="TOML config with a [defaults] table.")
@click.option("--seed", type=int, default=None, help="Override the configured random seed.")
@click.pass_context
def main(ctx, config_path, seed):
    logging.basicConfig(level=os.environ.get("BICOLOR_LOG_LEVEL", "WARNING").upper())
    cfg = load_config(config_path)
    if seed is not None:
        cfg = AppConfig(**{**cfg.__dict__, "seed": seed})
    ctx.obj = cfg
    ctx.meta["seed_override"] = seed


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_obj
def extract(cfg: AppConfig, image_path, out_dir):
    """Extract contour and bi-colored edges from a garment photo."""
    img = load_rgb_png(image_path)
    contour = simplify_contour(extract_contour(img, cfg.contour), cfg.contour.min_branch_len)
    chains = detect_texture_edges(img, cfg.canny.low, cfg.canny.high, cfg.canny.sigma)
    try:
        chains = remove_outermost(chains, contour, cfg.pipeline.outermost_band)
    except OpenContourError:
        pass  # open sketch: nothing to trim against
    chains = remove_corners(chains, cfg.pipeline.corner_angle, cfg.pipeline.corner_window)
    edges = sample_bicolor(img, chains, cfg.pipeline.sample_offset)
    color, coverage = rasterize_bicolor(edges)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_gray_png(contour.mask, out / "contour.png")
    save_rgb_png(color, out / "bicolor.png")
    save_gray_png(coverage, out / "coverage.png")
    (out / "bicolor.json").write_text(
        json.dumps(edges.to_json_dict(), sort_keys=True) + "\n"
    )
    log.info("extracted %d edges from %s", len(edges.edges), image_path)


@main.command()
@click.option("--doc", "doc_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--mode", type=click.Choice(["harmonic", "voronoi"]), default=None)
@click.option("--shading-out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def synth(ctx, doc_path, out_path, mode, shading_out):
    """Synthesize the final image from a design document."""
    cfg: AppConfig = ctx.obj
    doc = DesignDocument.from_json_dict(json.loads(Path(doc_path).read_text()))
    synth_cfg = cfg.synth
    if mode is not None:
        synth_cfg = type(synth_cfg)(**{**synth_cfg.__dict__, "mode": mode})
    # only an explicit --seed beats the seed stored in the document
    seed_override = ctx.meta.get("seed_override")
    if seed_override is not None:
        doc.seed = seed_override
    result = full_pipeline(doc, synth_cfg, cfg.shade)
    save_rgb_png(result.image, out_path)
    if shading_out:
        save_shading_png(result.shading, shading_out)
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command()
@click.option("--contour", "contour_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--edges", "edges_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def shade(cfg: AppConfig, contour_path, edges_path, out_path):
    """Render a 16-bit shading image from shading-edge curves."""
    contour = ContourMap(load_mask_png(contour_path), provenance="user-drawn")
    edges = load_mask_png(edges_path)
    save_shading_png(render_shading(contour, edges, cfg.shade), out_path)


@main.command()
@click.option("--patch", "patch_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--size", required=True, help="Output size as WxH, e.g. 256x256.")
@click.option("-o", "--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def expand(cfg: AppConfig, patch_path, size, out_path):
    """Expand a texture patch to the requested size."""
    try:
        w_str, h_str = size.lower().split("x", 1)
        w, h = int(w_str), int(h_str)
    except ValueError:
        raise click.BadParameter("size must look like 256x256", param_hint="--size")
    patch = load_rgb_png(patch_path)
    out = expand_texture(patch, w, h, cfg.patchmatch, cfg.seed)
    save_rgb_png(out, out_path)


@main.command()
@click.option("--doc", "doc_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--image", "image_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--mask", "mask_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--from", "from_rgb", default=None, help="Source color r,g,b (document mode).")
@click.option("--to", "to_rgb", required=True, help="Target color r,g,b.")
@click.option("--tol", type=float, default=0.0, help="Color match tolerance, 8-bit units.")
@click.option("--k", type=int, default=None, help="Cluster count (image mode).")
@click.option("--cluster", type=int, default=None, help="Cluster index to recolor (image mode).")
@click.option("-o", "--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def recolor(cfg: AppConfig, doc_path, image_path, mask_path, from_rgb, to_rgb, tol, k, cluster, out_path):
    """Recolor a document's edge samples, or an image's color cluster."""
    to_color = _parse_rgb(to_rgb, "--to")
    if (doc_path is None) == (image_path is None):
        raise click.UsageError("pass exactly one of --doc or --image")
    if doc_path is not None:
        if from_rgb is None:
            raise click.UsageError("--from is required in document mode")
        src = _parse_rgb(from_rgb, "--from")
        doc = DesignDocument.from_json_dict(json.loads(Path(doc_path).read_text()))
        before = doc.texture_layer.to_json_dict()
        doc.texture_layer = recolor_edges(
            doc.texture_layer,
            tuple(c / 255.0 for c in src),
            tuple(c / 255.0 for c in to_color),
            tol / 255.0,
        )
        if doc.texture_layer.to_json_dict() == before:
            click.echo("warning: recolor changed no samples", err=True)
        doc.palette = doc.texture_layer.colors_in_use()
        Path(out_path).write_text(
            json.dumps(doc.to_json_dict(), sort_keys=True) + "\n"
        )
    else:
        if k is None or cluster is None:
            raise click.UsageError("--k and --cluster are required in image mode")
        img = load_rgb_png(image_path)
        mask = load_mask_png(mask_path) if mask_path else GrayImage.full(img.width, img.height, 1.0)
        stats = kmeans_clusters(img, mask, k, cfg.seed)
        out = recolor_clusters(img, stats, {cluster: tuple(c / 255.0 for c in to_color)})
        save_rgb_png(out, out_path)


def _parse_rgb(text: str, param: str) -> tuple:
    try:
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 3 or not all(0 <= p <= 255 for p in parts):
            raise ValueError
    except ValueError:
        raise click.BadParameter("expected r,g,b with 8-bit components", param_hint=param)
    return tuple(parts)


@main.group()
def metrics():
    """Evaluation metrics."""


@metrics.command()
@click.option("--ref", "ref_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--cand", "cand_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mask", "mask_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, default=None, help="Use seeded K-means instead of hierarchical clustering.")
@click.pass_obj
def kl(cfg: AppConfig, ref_path, cand_path, mask_path, k):
    """Color-distribution KL divergence between a reference and a candidate."""
    ref = load_rgb_png(ref_path)
    cand = load_rgb_png(cand_path)
    mask = load_mask_png(mask_path)
    if k is None:
        ref_stats = hierarchical_clusters(ref, mask, cfg.pipeline.cluster_dist_thresh)
    else:
        ref_stats = kmeans_clusters(ref, mask, k, cfg.seed)
    cand_stats = stats_from_labels(cand, ref_stats.label_map)
    value = kl_color_loss(ref_stats, cand_stats)
    click.echo(json.dumps({"kl": value, "k": ref_stats.k}))


@main.group()
def dataset():
    """Dataset construction."""


@dataset.command()
@click.option("--src", "src_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_obj
def build(cfg: AppConfig, src_dir, out_dir):
    """Build a training corpus from a directory of garment photos."""
    manifest = build_corpus(src_dir, out_dir, cfg.pipeline)
    click.echo(
        json.dumps(
            {
                "count": manifest["count"],
                "failures": len(manifest["failures"]),
                "split_counts": manifest["split_counts"],
            }
        )
    )


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.pass_obj
def serve(cfg: AppConfig, port, host):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(cfg), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
