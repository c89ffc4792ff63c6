"""Pixel containers, color math, resampling and PNG I/O shared by every module.

Images are dense float64 grids in a nominal [0, 1] range (shading values may
exceed 1). Quantization to 8-bit (or 16-bit for shading) happens only at file
boundaries. The canonical working canvas is 512x512.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

CANVAS_SIZE = 512

# 16-bit shading PNGs store round(value * SHADING_SCALE), i.e. a [0, 16) range.
SHADING_SCALE = 4096


class InvalidArgumentError(ValueError):
    """Raised when an operation receives arguments violating its contract."""


def _check_finite(data: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(data)):
        raise InvalidArgumentError(f"{what} contains non-finite values")


@dataclass(frozen=True)
class RasterImage:
    """An RGB image: float64 array of shape (height, width, 3).

    Treated as immutable: operations return new instances and never write
    into ``data`` after construction.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise InvalidArgumentError(f"RasterImage expects (H, W, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidArgumentError("RasterImage dimensions must be >= 1")
        _check_finite(arr, "RasterImage")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @classmethod
    def full(cls, width: int, height: int, color=(1.0, 1.0, 1.0)) -> "RasterImage":
        data = np.empty((height, width, 3), dtype=np.float64)
        data[...] = np.asarray(color, dtype=np.float64)
        return cls(data)


@dataclass(frozen=True)
class GrayImage:
    """A scalar image: float64 array of shape (height, width).

    Used for binary masks (values in {0, 1}) and for shading fields
    (values >= 0, possibly above 1).
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidArgumentError(f"GrayImage expects (H, W), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidArgumentError("GrayImage dimensions must be >= 1")
        _check_finite(arr, "GrayImage")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def is_binary(self) -> bool:
        return bool(np.all((self.data == 0.0) | (self.data == 1.0)))

    @classmethod
    def zeros(cls, width: int, height: int) -> "GrayImage":
        return cls(np.zeros((height, width), dtype=np.float64))

    @classmethod
    def full(cls, width: int, height: int, value: float) -> "GrayImage":
        return cls(np.full((height, width), float(value), dtype=np.float64))


@dataclass(frozen=True)
class RepresentationStack:
    """The synthesizer input: a binary contour plus a rasterized color-edge layer.

    ``bicolor`` is exactly (0, 0, 0) wherever ``coverage`` is 0; the coverage
    mask (rather than a sentinel color) tells true black strokes apart from
    empty background.
    """

    contour: GrayImage
    bicolor: RasterImage
    coverage: GrayImage

    def __post_init__(self):
        if self.contour.shape != self.coverage.shape or self.bicolor.shape[:2] != self.contour.shape:
            raise InvalidArgumentError("RepresentationStack layers must share dimensions")
        if not self.contour.is_binary() or not self.coverage.is_binary():
            raise InvalidArgumentError("contour and coverage must be binary")
        off = self.coverage.data == 0.0
        if np.any(self.bicolor.data[off] != 0.0):
            raise InvalidArgumentError("bicolor must be null (0,0,0) outside coverage")


def resample(img: RasterImage, new_width: int, new_height: int) -> RasterImage:
    """Bilinear resampling to the requested size.

    Pixel centers are aligned (a pixel index x maps to source coordinate
    (x + 0.5) * w_in / w_out - 0.5) with edge clamping, so resampling an
    image to its own size reproduces it exactly and output values stay
    inside the input's [min, max].
    """
    if new_width < 1 or new_height < 1:
        raise InvalidArgumentError("resample target dimensions must be >= 1")
    data = img.data
    h, w = data.shape[:2]
    if (new_width, new_height) == (w, h):
        return RasterImage(data.copy())
    out = _bilinear_grid(data, w, h, new_width, new_height)
    return RasterImage(out)


def resample_gray(img: GrayImage, new_width: int, new_height: int) -> GrayImage:
    if new_width < 1 or new_height < 1:
        raise InvalidArgumentError("resample target dimensions must be >= 1")
    data = img.data
    h, w = data.shape
    if (new_width, new_height) == (w, h):
        return GrayImage(data.copy())
    out = _bilinear_grid(data[:, :, None], w, h, new_width, new_height)[:, :, 0]
    return GrayImage(out)


def _bilinear_grid(data: np.ndarray, w: int, h: int, new_w: int, new_h: int) -> np.ndarray:
    sx = (np.arange(new_w, dtype=np.float64) + 0.5) * (w / new_w) - 0.5
    sy = (np.arange(new_h, dtype=np.float64) + 0.5) * (h / new_h) - 0.5
    x0 = np.floor(sx)
    y0 = np.floor(sy)
    fx = sx - x0
    fy = sy - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)

    fy_col = fy[:, None, None]
    fx_row = fx[None, :, None]
    top = data[y0c][:, x0c] * (1.0 - fx_row) + data[y0c][:, x1c] * fx_row
    bot = data[y1c][:, x0c] * (1.0 - fx_row) + data[y1c][:, x1c] * fx_row
    return top * (1.0 - fy_col) + bot * fy_col


def sample_bilinear(data: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Bilinear point samples of an (H, W, C) array at float coordinates.

    Coordinates are clamped to the image rectangle; callers that need
    out-of-bounds detection test bounds themselves first.
    """
    h, w = data.shape[:2]
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, w - 1.0)
    y = np.clip(np.asarray(y, dtype=np.float64), 0.0, h - 1.0)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    top = data[y0, x0] * (1.0 - fx) + data[y0, x1] * fx
    bot = data[y1, x0] * (1.0 - fx) + data[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def pointwise_product(r: RasterImage, s: GrayImage) -> RasterImage:
    """Per-pixel product of a color image and a scalar field, out[p,c] = r[p,c]*s[p]."""
    if r.shape[:2] != s.shape:
        raise InvalidArgumentError(
            f"pointwise_product dimension mismatch: {r.shape[:2]} vs {s.shape}"
        )
    return RasterImage(r.data * s.data[:, :, None])


# --- PNG boundaries ---------------------------------------------------------

PathOrBytes = Union[str, Path, bytes]


def rgb_to_png_bytes(img: RasterImage) -> bytes:
    arr = np.clip(np.floor(img.data * 255.0 + 0.5), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def gray_to_png_bytes(img: GrayImage) -> bytes:
    arr = np.clip(np.floor(img.data * 255.0 + 0.5), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def shading_to_png_bytes(img: GrayImage) -> bytes:
    """16-bit grayscale PNG; fixed point with SHADING_SCALE = shading 1.0."""
    arr = np.clip(np.floor(img.data * SHADING_SCALE + 0.5), 0, 65535).astype(np.uint16)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def _open_image(src: PathOrBytes) -> Image.Image:
    try:
        if isinstance(src, bytes):
            return Image.open(io.BytesIO(src))
        return Image.open(src)
    except (UnidentifiedImageError, OSError) as exc:
        raise InvalidArgumentError(f"cannot decode image: {exc}") from exc


def load_rgb_png(src: PathOrBytes) -> RasterImage:
    with _open_image(src) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    return RasterImage(arr)


def load_gray_png(src: PathOrBytes) -> GrayImage:
    with _open_image(src) as im:
        arr = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    return GrayImage(arr)


def load_mask_png(src: PathOrBytes) -> GrayImage:
    """Load an 8-bit mask PNG and binarize at 128."""
    with _open_image(src) as im:
        arr = np.asarray(im.convert("L"), dtype=np.float64)
    return GrayImage((arr >= 128.0).astype(np.float64))


def load_shading_png(src: PathOrBytes) -> GrayImage:
    with _open_image(src) as im:
        arr = np.asarray(im)
    if arr.dtype not in (np.uint16, np.int32):
        raise InvalidArgumentError("shading PNGs must be 16-bit grayscale")
    return GrayImage(arr.astype(np.float64) / SHADING_SCALE)


def save_rgb_png(img: RasterImage, path: Union[str, Path]) -> None:
    Path(path).write_bytes(rgb_to_png_bytes(img))


def save_gray_png(img: GrayImage, path: Union[str, Path]) -> None:
    Path(path).write_bytes(gray_to_png_bytes(img))


def save_shading_png(img: GrayImage, path: Union[str, Path]) -> None:
    Path(path).write_bytes(shading_to_png_bytes(img))
