"""HTTP facade: stateless JSON endpoints under /v1/ for the sketch editor.

Images travel as base64 PNG strings inside JSON bodies. Error mapping:
400 for schema violations (detail names the offending field path), 415 for
undecodable image payloads, 422 for open contours, 404 for unknown colors
or cluster indices in recolor mappings. Every handler is a pure function of
its request body plus the immutable server config, so identical requests
produce byte-identical responses.
"""

from __future__ import annotations

import base64

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .bicolor import (
    detect_texture_edges,
    rasterize_bicolor,
    remove_corners,
    remove_outermost,
    sample_bicolor,
)
from .config import AppConfig
from .contour import OpenContourError, extract_contour, simplify_contour
from .document import DesignDocument, strokes_from_mask, strokes_to_json
from .palette import kmeans_clusters, recolor_clusters, recolor_edges
from .patchmatch import expand_texture
from .raster import (
    GrayImage,
    InvalidArgumentError,
    RasterImage,
    gray_to_png_bytes,
    load_mask_png,
    load_rgb_png,
    resample,
    rgb_to_png_bytes,
    shading_to_png_bytes,
)
from .synthesizer import full_pipeline

CANVAS = 512


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def _decode_png(field: str, value) -> RasterImage:
    if not isinstance(value, str):
        raise InvalidArgumentError(f"{field}: must be a base64 PNG string")
    try:
        raw = base64.b64decode(value, validate=True)
    except ValueError as exc:
        raise HTTPException(status_code=415, detail=f"{field}: invalid base64") from exc
    try:
        return load_rgb_png(raw)
    except InvalidArgumentError as exc:
        raise HTTPException(status_code=415, detail=f"{field}: {exc}") from exc


def _require_int(body: dict, field: str, lo: int, hi: int) -> int:
    value = body.get(field)
    if not isinstance(value, int) or isinstance(value, bool) or not lo <= value <= hi:
        raise InvalidArgumentError(f"{field}: must be an integer in [{lo}, {hi}]")
    return value


def _rgb_from_json(field: str, value) -> tuple:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 3
        or not all(isinstance(c, int) and 0 <= c <= 255 for c in value)
    ):
        raise InvalidArgumentError(f"{field}: must be [r, g, b] in 0..255")
    return tuple(value)


def create_app(config: AppConfig = None) -> FastAPI:
    cfg = config or AppConfig()
    app = FastAPI(title="bicolorsketch", version="1.0.0", docs_url=None, redoc_url=None)

    @app.exception_handler(InvalidArgumentError)
    async def _invalid_argument(_req: Request, exc: InvalidArgumentError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(OpenContourError)
    async def _open_contour(_req: Request, exc: OpenContourError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _schema_error(_req: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
        msg = first.get("msg", "invalid request")
        return JSONResponse(status_code=400, content={"detail": f"{loc}: {msg}".lstrip(": ")})

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.post("/v1/synthesize")
    async def synthesize_endpoint(body: dict):
        doc = DesignDocument.from_json_dict(body)
        result = full_pipeline(doc, cfg.synth, cfg.shade)
        return {
            "image": _b64(rgb_to_png_bytes(result.image)),
            "shading": _b64(shading_to_png_bytes(result.shading)),
            "warnings": result.warnings,
        }

    @app.post("/v1/extract")
    async def extract_endpoint(body: dict):
        img = _decode_png("image", body.get("image"))
        if img.shape[:2] != (CANVAS, CANVAS):
            img = resample(img, CANVAS, CANVAS)
        contour = simplify_contour(
            extract_contour(img, cfg.contour), cfg.contour.min_branch_len
        )
        chains = detect_texture_edges(img, cfg.canny.low, cfg.canny.high, cfg.canny.sigma)
        try:
            chains = remove_outermost(chains, contour, cfg.pipeline.outermost_band)
        except OpenContourError:
            pass  # blank or open sketch: nothing to trim against
        chains = remove_corners(chains, cfg.pipeline.corner_angle, cfg.pipeline.corner_window)
        edges = sample_bicolor(img, chains, cfg.pipeline.sample_offset)
        color, coverage = rasterize_bicolor(edges)
        return {
            "canvas": {"w": CANVAS, "h": CANVAS},
            "contour_layer": {"strokes": strokes_to_json(strokes_from_mask(contour.mask))},
            "texture_layer": edges.to_json_dict(),
            "contour_png": _b64(gray_to_png_bytes(contour.mask)),
            "bicolor_png": _b64(rgb_to_png_bytes(color)),
            "coverage_png": _b64(gray_to_png_bytes(coverage)),
        }

    @app.post("/v1/expand-texture")
    async def expand_endpoint(body: dict):
        patch = _decode_png("patch", body.get("patch"))
        w = _require_int(body, "w", cfg.patchmatch.patch_size, 4096)
        h = _require_int(body, "h", cfg.patchmatch.patch_size, 4096)
        seed = _require_int(body, "seed", 0, 2 ** 31 - 1) if "seed" in body else 0
        out = expand_texture(patch, w, h, cfg.patchmatch, seed)
        chains = detect_texture_edges(out, cfg.canny.low, cfg.canny.high, cfg.canny.sigma)
        edges = sample_bicolor(out, chains, cfg.pipeline.sample_offset)
        return {
            "image": _b64(rgb_to_png_bytes(out)),
            "texture_layer": edges.to_json_dict(),
        }

    @app.post("/v1/recolor")
    async def recolor_endpoint(body: dict):
        if "document" in body:
            return _recolor_document(body)
        if "image" in body:
            return _recolor_image(body)
        raise InvalidArgumentError("document: provide either document or image")

    def _recolor_document(body: dict) -> dict:
        doc_json = body.get("document")
        if not isinstance(doc_json, dict):
            raise InvalidArgumentError("document: must be an object")
        doc = DesignDocument.from_json_dict(doc_json)
        mapping = _parse_mapping(body, value_key="from")
        tol = body.get("tol", 0)
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol < 0:
            raise InvalidArgumentError("tol: must be >= 0")

        known = set(doc.texture_layer.colors_in_use())
        edges = doc.texture_layer
        for src, dst in mapping:
            if src not in known:
                raise HTTPException(status_code=404, detail=f"unknown color {list(src)}")
            edges = recolor_edges(
                edges,
                tuple(c / 255.0 for c in src),
                tuple(c / 255.0 for c in dst),
                tol / 255.0,
            )
        doc.texture_layer = edges
        doc.palette = edges.colors_in_use()
        return {"document": doc.to_json_dict()}

    def _recolor_image(body: dict) -> dict:
        img = _decode_png("image", body.get("image"))
        mask = None
        if "mask" in body and body["mask"] is not None:
            if not isinstance(body["mask"], str):
                raise InvalidArgumentError("mask: must be a base64 PNG string")
            try:
                mask = load_mask_png(base64.b64decode(body["mask"], validate=True))
            except (ValueError, InvalidArgumentError) as exc:
                raise HTTPException(status_code=415, detail=f"mask: {exc}") from exc
        if mask is None:
            mask = GrayImage.full(img.width, img.height, 1.0)
        k = _require_int(body, "k", 1, 64)
        seed = _require_int(body, "seed", 0, 2 ** 31 - 1) if "seed" in body else 0
        stats = kmeans_clusters(img, mask, k, seed)

        raw = body.get("mapping")
        if not isinstance(raw, list) or not raw:
            raise InvalidArgumentError("mapping: must be a nonempty list")
        mapping = {}
        for i, entry in enumerate(raw):
            if not isinstance(entry, dict):
                raise InvalidArgumentError(f"mapping[{i}]: must be an object")
            idx = entry.get("cluster")
            if not isinstance(idx, int) or isinstance(idx, bool):
                raise InvalidArgumentError(f"mapping[{i}].cluster: must be an integer")
            if idx < 0 or idx >= stats.k:
                raise HTTPException(status_code=404, detail=f"unknown cluster {idx}")
            rgb = _rgb_from_json(f"mapping[{i}].to", entry.get("to"))
            mapping[idx] = tuple(c / 255.0 for c in rgb)
        out = recolor_clusters(img, stats, mapping)
        return {"image": _b64(rgb_to_png_bytes(out)), "stats": stats.to_json_dict()}

    def _parse_mapping(body: dict, value_key: str) -> list:
        raw = body.get("mapping")
        if not isinstance(raw, list) or not raw:
            raise InvalidArgumentError("mapping: must be a nonempty list")
        pairs = []
        for i, entry in enumerate(raw):
            if not isinstance(entry, dict):
                raise InvalidArgumentError(f"mapping[{i}]: must be an object")
            src = _rgb_from_json(f"mapping[{i}].{value_key}", entry.get(value_key))
            dst = _rgb_from_json(f"mapping[{i}].to", entry.get("to"))
            pairs.append((src, dst))
        return pairs

    return app


app = create_app()
