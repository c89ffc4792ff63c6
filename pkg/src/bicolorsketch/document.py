"""The design document: the editor's save file and the synthesis request body.

Layers arrive as vectors (polyline strokes for contour and shading, the
bi-colored edge set for texture) so clients can undo and recolor without
raster loss; rasterization happens here, at the lowest level that needs
pixels. Schema violations raise InvalidArgumentError with a dotted field
path in the message so callers can surface the offending field.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass, field

import numpy as np

from .bicolor import BiColoredEdgeSet, link_chains
from .contour import ContourMap
from .raster import (
    GrayImage,
    InvalidArgumentError,
    RasterImage,
    load_rgb_png,
    rgb_to_png_bytes,
)

MODES = ("pure", "sparse", "dense")


@dataclass
class DesignDocument:
    canvas: tuple  # (width, height)
    contour_layer: ContourMap
    texture_layer: BiColoredEdgeSet
    shading_layer: GrayImage
    mode: str = "sparse"
    dense_patch: RasterImage = None
    palette: list = field(default_factory=list)
    seed: int = 0
    contour_strokes: list = field(default_factory=list)
    shading_strokes: list = field(default_factory=list)

    def validate(self) -> None:
        w, h = self.canvas
        if w < 1 or h < 1:
            raise InvalidArgumentError("canvas: dimensions must be >= 1")
        if self.mode not in MODES:
            raise InvalidArgumentError(f"mode: must be one of {MODES}")
        if self.contour_layer.mask.shape != (h, w):
            raise InvalidArgumentError("contour_layer: canvas size mismatch")
        if self.shading_layer.shape != (h, w):
            raise InvalidArgumentError("shading_layer: canvas size mismatch")
        if not self.shading_layer.is_binary():
            raise InvalidArgumentError("shading_layer: must be binary")
        if tuple(self.texture_layer.canvas) != (w, h):
            raise InvalidArgumentError("texture_layer.canvas: canvas size mismatch")
        self.texture_layer.validate()
        if self.mode == "dense" and self.dense_patch is None:
            raise InvalidArgumentError("dense_patch: required when mode is dense")

    def to_json_dict(self) -> dict:
        doc = {
            "canvas": {"w": int(self.canvas[0]), "h": int(self.canvas[1])},
            "mode": self.mode,
            "seed": int(self.seed),
            "contour_layer": {"strokes": strokes_to_json(self.contour_strokes)},
            "texture_layer": self.texture_layer.to_json_dict(),
            "shading_layer": {"strokes": strokes_to_json(self.shading_strokes)},
            "dense_patch": None,
            "palette": [[int(c) for c in rgb] for rgb in self.palette],
        }
        if self.dense_patch is not None:
            doc["dense_patch"] = base64.b64encode(
                rgb_to_png_bytes(self.dense_patch)
            ).decode("ascii")
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DesignDocument":
        canvas_obj = _require(doc, "canvas", dict)
        w = _require(canvas_obj, "w", int, path="canvas.w")
        h = _require(canvas_obj, "h", int, path="canvas.h")
        if w < 1 or h < 1 or w > 4096 or h > 4096:
            raise InvalidArgumentError("canvas: dimensions must be in [1, 4096]")

        mode = doc.get("mode", "sparse")
        if mode not in MODES:
            raise InvalidArgumentError(f"mode: must be one of {MODES}")
        seed = doc.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise InvalidArgumentError("seed: must be a non-negative integer")

        contour_strokes = _parse_strokes(
            _require(doc, "contour_layer", dict), w, h, path="contour_layer"
        )
        shading_strokes = _parse_strokes(
            _require(doc, "shading_layer", dict), w, h, path="shading_layer"
        )
        texture_obj = _require(doc, "texture_layer", dict)
        try:
            texture = BiColoredEdgeSet.from_json_dict(texture_obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"texture_layer: {exc}") from exc
        if tuple(texture.canvas) != (w, h):
            raise InvalidArgumentError("texture_layer.canvas: canvas size mismatch")

        patch = None
        patch_b64 = doc.get("dense_patch")
        if patch_b64 is not None:
            if not isinstance(patch_b64, str):
                raise InvalidArgumentError("dense_patch: must be a base64 string")
            try:
                patch = load_rgb_png(base64.b64decode(patch_b64, validate=True))
            except (ValueError, InvalidArgumentError) as exc:
                raise InvalidArgumentError(f"dense_patch: {exc}") from exc

        palette = doc.get("palette", [])
        if not isinstance(palette, list):
            raise InvalidArgumentError("palette: must be a list of [r, g, b]")
        clean_palette = []
        for i, rgb in enumerate(palette):
            if (
                not isinstance(rgb, (list, tuple))
                or len(rgb) != 3
                or not all(isinstance(c, int) and 0 <= c <= 255 for c in rgb)
            ):
                raise InvalidArgumentError(f"palette[{i}]: must be [r, g, b] in 0..255")
            clean_palette.append(tuple(rgb))

        out = cls(
            canvas=(w, h),
            contour_layer=ContourMap(
                rasterize_strokes(contour_strokes, w, h), provenance="user-drawn"
            ),
            texture_layer=texture,
            shading_layer=rasterize_strokes(shading_strokes, w, h),
            mode=mode,
            dense_patch=patch,
            palette=clean_palette,
            seed=seed,
            contour_strokes=contour_strokes,
            shading_strokes=shading_strokes,
        )
        out.validate()
        return out


def _require(obj: dict, key: str, typ, path: str = None):
    path = path or key
    if not isinstance(obj, dict) or key not in obj:
        raise InvalidArgumentError(f"{path}: missing required field")
    value = obj[key]
    if (typ is int and isinstance(value, bool)) or not isinstance(value, typ):
        raise InvalidArgumentError(f"{path}: expected {typ.__name__}")
    return value


def strokes_to_json(strokes: list) -> list:
    return [[[float(x), float(y)] for x, y in stroke] for stroke in strokes]


def _parse_strokes(layer: dict, w: int, h: int, path: str) -> list:
    raw = layer.get("strokes")
    if not isinstance(raw, list):
        raise InvalidArgumentError(f"{path}.strokes: must be a list")
    strokes = []
    for i, stroke in enumerate(raw):
        if not isinstance(stroke, list) or len(stroke) < 1:
            raise InvalidArgumentError(f"{path}.strokes[{i}]: must be a nonempty point list")
        pts = []
        for j, pt in enumerate(stroke):
            if (
                not isinstance(pt, (list, tuple))
                or len(pt) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pt)
            ):
                raise InvalidArgumentError(f"{path}.strokes[{i}][{j}]: must be [x, y]")
            x, y = float(pt[0]), float(pt[1])
            if not (0 <= x <= w - 1 and 0 <= y <= h - 1):
                raise InvalidArgumentError(f"{path}.strokes[{i}][{j}]: outside canvas")
            pts.append((x, y))
        strokes.append(pts)
    return strokes


def rasterize_strokes(strokes: list, w: int, h: int) -> GrayImage:
    """Rasterize polyline strokes to a binary mask.

    Segments are stepped at most 1 px apart and rounded, so consecutive
    mask pixels of a stroke are 8-connected; single-point strokes mark one
    pixel (used for exact mask round trips through the stroke form).
    """
    mask = np.zeros((h, w), dtype=np.float64)
    for stroke in strokes:
        pts = np.asarray(stroke, dtype=np.float64)
        prev = pts[0]
        _plot(mask, prev, w, h)
        for cur in pts[1:]:
            seg = cur - prev
            dist = float(np.abs(seg).max())
            steps = max(1, int(np.ceil(dist)))
            for k in range(1, steps + 1):
                _plot(mask, prev + seg * (k / steps), w, h)
            prev = cur
    return GrayImage(mask)


def _plot(mask: np.ndarray, pt: np.ndarray, w: int, h: int) -> None:
    x = int(np.floor(pt[0] + 0.5))
    y = int(np.floor(pt[1] + 0.5))
    if 0 <= x < w and 0 <= y < h:
        mask[y, x] = 1.0


def strokes_from_mask(mask: GrayImage) -> list:
    """Vector strokes that rasterize back to exactly the given mask.

    Linked pixel chains cover everything except junction pixels, which are
    emitted as single-point strokes.
    """
    binary = mask.data > 0.5
    chains = link_chains(binary)
    covered = np.zeros_like(binary)
    strokes = []
    for chain in chains:
        covered[chain[:, 1], chain[:, 0]] = True
        strokes.append([(float(x), float(y)) for x, y in chain])
    for y, x in np.argwhere(binary & ~covered):
        strokes.append([(float(x), float(y))])
    return strokes
