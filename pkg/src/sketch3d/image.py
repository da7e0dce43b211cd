"""8-bit raster images: representation, color conversion, filtering, resampling.

Conventions used throughout the package:

- Pixel data is row-major numpy, shape (h, w) for grayscale and
  (h, w, 3) for RGB, dtype uint8.  Intermediate filtering runs in
  float64 and is quantized back to 8 bits only at operation
  boundaries, with ties rounding up (floor(x + 0.5), equivalent to
  round-half-away-from-zero on the nonnegative intensity range).
- Grayscale conversion uses the Rec.601 weights 0.299/0.587/0.114.
- Gaussian blur replicates edge pixels and truncates the kernel at
  radius ceil(3*sigma), normalized to unit sum.
- Resize is bilinear with pixel-center alignment; aspect ratio is the
  caller's problem.

All operations are pure: inputs are never mutated and identical inputs
yield byte-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage

from sketch3d import kernels
from sketch3d.errors import InvalidParameterError

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """Quantize float intensities to uint8: floor(x+0.5) clipped to [0, 255]."""
    return np.clip(np.floor(values + 0.5), 0.0, 255.0).astype(np.uint8)


@dataclass(frozen=True)
class Image:
    """An 8-bit raster image, 1 (gray) or 3 (RGB) channels."""

    array: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=np.uint8)
        if arr.ndim == 3 and arr.shape[2] == 1:
            arr = arr[:, :, 0]
        if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
            raise InvalidParameterError(
                f"image must be (h, w) or (h, w, 3) uint8, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidParameterError("image dimensions must be >= 1")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @property
    def width(self) -> int:
        return self.array.shape[1]

    @property
    def height(self) -> int:
        return self.array.shape[0]

    @property
    def channels(self) -> int:
        return 1 if self.array.ndim == 2 else 3

    def planes(self) -> np.ndarray:
        """View as (h, w, c) regardless of channel count."""
        if self.array.ndim == 2:
            return self.array[:, :, None]
        return self.array

    @classmethod
    def load(cls, path) -> "Image":
        with PILImage.open(path) as im:
            if im.mode not in ("L", "RGB"):
                im = im.convert("RGB" if im.mode not in ("1", "I;16", "I") else "L")
            return cls(np.asarray(im))

    def save(self, path) -> None:
        PILImage.fromarray(self.array).save(path)


@dataclass(frozen=True)
class FloatImage:
    """Real-valued raster used for intermediate precision; finite values only."""

    array: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.array, dtype=np.float64))
        if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
            raise InvalidParameterError(
                f"float image must be (h, w) or (h, w, 3), got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("float image contains NaN or Inf")
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @property
    def width(self) -> int:
        return self.array.shape[1]

    @property
    def height(self) -> int:
        return self.array.shape[0]

    @property
    def channels(self) -> int:
        return 1 if self.array.ndim == 2 else 3


def to_grayscale(img: Image) -> Image:
    """Rec.601 luma; single-channel inputs pass through unchanged."""
    if img.channels == 1:
        return img
    rgb = img.array.astype(np.float64)
    luma = (GRAY_WEIGHTS[0] * rgb[:, :, 0] + GRAY_WEIGHTS[1] * rgb[:, :, 1]
            + GRAY_WEIGHTS[2] * rgb[:, :, 2])
    return Image(quantize_u8(luma))


def invert(img: Image) -> Image:
    return Image(255 - img.array)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1-D Gaussian taps at radius ceil(3*sigma), normalized to sum 1."""
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    return taps / taps.sum()


def _blur_channel(plane: np.ndarray, taps: np.ndarray) -> np.ndarray:
    radius = (len(taps) - 1) // 2
    padded = np.pad(plane, ((radius, radius), (0, 0)), mode="edge")
    out = np.zeros_like(plane)
    for k in range(len(taps)):  # fixed accumulation order keeps results reproducible
        out += taps[k] * padded[k:k + plane.shape[0], :]
    padded = np.pad(out, ((0, 0), (radius, radius)), mode="edge")
    out = np.zeros_like(plane)
    for k in range(len(taps)):
        out += taps[k] * padded[:, k:k + plane.shape[1]]
    return out


def gaussian_blur(img, sigma: float):
    """Separable Gaussian blur with edge replication; preserves image kind."""
    taps = gaussian_kernel(sigma)
    if isinstance(img, FloatImage):
        planes = img.array if img.array.ndim == 3 else img.array[:, :, None]
        blurred = np.dstack([_blur_channel(planes[:, :, c], taps)
                             for c in range(planes.shape[2])])
        return FloatImage(blurred[:, :, 0] if img.channels == 1 else blurred)
    planes = img.planes().astype(np.float64)
    blurred = np.dstack([_blur_channel(planes[:, :, c], taps)
                         for c in range(planes.shape[2])])
    out = quantize_u8(blurred)
    return Image(out[:, :, 0] if img.channels == 1 else out)


def resize(img: Image, new_w: int, new_h: int) -> Image:
    """Bilinear resize to exactly (new_w, new_h)."""
    if new_w < 1 or new_h < 1:
        raise InvalidParameterError(f"target size must be >= 1, got {new_w}x{new_h}")
    if new_w == img.width and new_h == img.height:
        return img
    out = kernels.resize_bilinear_u8(img.planes(), new_w, new_h)
    return Image(out[:, :, 0] if img.channels == 1 else out)


def crop(img: Image, x: int, y: int, w: int, h: int) -> Image:
    """Exact pixel copy of the rectangle; must lie fully inside the image."""
    if w < 1 or h < 1:
        raise InvalidParameterError(f"crop size must be >= 1, got {w}x{h}")
    if x < 0 or y < 0 or x + w > img.width or y + h > img.height:
        raise InvalidParameterError(
            f"crop rect ({x},{y},{w},{h}) exceeds image {img.width}x{img.height}")
    return Image(img.array[y:y + h, x:x + w].copy())


def gray_to_rgb(img: Image) -> Image:
    """Replicate a single channel to 3; RGB passes through."""
    if img.channels == 3:
        return img
    return Image(np.repeat(img.array[:, :, None], 3, axis=2))


def load_depth_png16(path) -> np.ndarray:
    """Read a single-channel 16-bit PNG as a uint16 array."""
    with PILImage.open(path) as im:
        if im.mode not in ("I;16", "I"):
            raise InvalidParameterError(
                f"expected 16-bit grayscale PNG, got mode {im.mode}")
        arr = np.asarray(im)
    if arr.dtype == np.int32:
        arr = arr.astype(np.uint16)
    return arr.astype(np.uint16)


def save_depth_png16(values: np.ndarray, path) -> None:
    """Write a uint16 array as a single-channel 16-bit PNG."""
    arr = np.ascontiguousarray(values, dtype=np.uint16)
    PILImage.fromarray(arr).save(path, format="PNG")
