"""Pencil-sketch synthesis: dodge blending followed by high-pass stylization.

The dodge step divides the grayscale photo by a blurred inverted copy of
itself (scaled by 256), which renders shading as paper-white and leaves
dark strokes along edges.  The stylize step keeps only the high-pass
residual around a mid-gray offset and negates it, which matches the
noisier look of sketches found in the wild.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sketch3d.errors import InvalidParameterError
from sketch3d.image import Image, gaussian_blur, invert, quantize_u8, to_grayscale

DODGE_SCALE = 256.0


@dataclass(frozen=True)
class SketchParams:
    blur_sigma: float = 8.0       # mask smoothing scale
    dodge_scale: float = DODGE_SCALE
    highpass_sigma: float = 4.0
    highpass_offset: int = 128

    def __post_init__(self):
        if self.blur_sigma <= 0 or self.highpass_sigma <= 0:
            raise InvalidParameterError("sketch sigmas must be > 0")

    def scaled(self, blur_scale: float = 1.0, highpass_scale: float = 1.0) -> "SketchParams":
        return SketchParams(
            blur_sigma=self.blur_sigma * blur_scale,
            dodge_scale=self.dodge_scale,
            highpass_sigma=self.highpass_sigma * highpass_scale,
            highpass_offset=self.highpass_offset,
        )


def dodge(gray: Image, params: SketchParams = SketchParams()) -> Image:
    """Divide gray by its blurred-inverted mask, scaled by 256.

    mask = invert(blur(invert(gray))); out = clamp(round(gray*256/mask));
    zero-mask pixels map to pure white (the flat-dark-region limit).
    """
    if gray.channels != 1:
        raise InvalidParameterError("dodge expects a single-channel image")
    mask = invert(gaussian_blur(invert(gray), params.blur_sigma))
    g = gray.array.astype(np.float64)
    m = mask.array.astype(np.float64)
    zero = mask.array == 0
    out = quantize_u8(g * params.dodge_scale / np.where(zero, 1.0, m))
    out[zero] = 255
    return Image(out)


def stylize(pencil: Image, params: SketchParams = SketchParams()) -> Image:
    """High-pass residual around highpass_offset, then negation."""
    if pencil.channels != 1:
        raise InvalidParameterError("stylize expects a single-channel image")
    blurred = gaussian_blur(pencil, params.highpass_sigma)
    hp = (pencil.array.astype(np.int32) - blurred.array.astype(np.int32)
          + params.highpass_offset)
    hp = np.clip(hp, 0, 255).astype(np.uint8)
    return invert(Image(hp))


def sketchify(photo: Image, params: SketchParams = SketchParams()) -> Image:
    """Full photo -> sketch conversion: grayscale, dodge, stylize."""
    return stylize(dodge(to_grayscale(photo), params), params)
