import math

import numpy as np
import pytest

from sketch3d.errors import InvalidParameterError
from sketch3d.image import Image
from sketch3d.sketch import SketchParams, dodge, sketchify, stylize


def brute_force_blur_u8(arr: np.ndarray, sigma: float) -> np.ndarray:
    """Independent dense 2-D convolution with edge replication."""
    radius = math.ceil(3 * sigma)
    offsets = np.arange(-radius, radius + 1)
    k1 = np.exp(-offsets.astype(float) ** 2 / (2 * sigma * sigma))
    k2 = np.outer(k1, k1)
    k2 /= k2.sum()
    h, w = arr.shape
    padded = np.pad(arr.astype(float), radius, mode="edge")
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            out[i, j] = (padded[i:i + 2 * radius + 1, j:j + 2 * radius + 1] * k2).sum()
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def brute_force_dodge(gray: np.ndarray, params: SketchParams) -> np.ndarray:
    mask = 255 - brute_force_blur_u8(255 - gray, params.blur_sigma)
    out = np.zeros_like(gray)
    for i in range(gray.shape[0]):
        for j in range(gray.shape[1]):
            if mask[i, j] == 0:
                out[i, j] = 255
            else:
                v = math.floor(gray[i, j] * params.dodge_scale / mask[i, j] + 0.5)
                out[i, j] = min(max(v, 0), 255)
    return out


def brute_force_stylize(pencil: np.ndarray, params: SketchParams) -> np.ndarray:
    blurred = brute_force_blur_u8(pencil, params.highpass_sigma)
    out = np.zeros_like(pencil)
    for i in range(pencil.shape[0]):
        for j in range(pencil.shape[1]):
            hp = int(pencil[i, j]) - int(blurred[i, j]) + params.highpass_offset
            out[i, j] = 255 - min(max(hp, 0), 255)
    return out


def test_dodge_constant_goes_near_white():
    for c in (10, 128, 250):
        img = Image(np.full((24, 24), c, np.uint8))
        out = dodge(img).array
        assert (out >= 254).all()


def test_dodge_all_zero_is_white():
    out = dodge(Image(np.zeros((16, 16), np.uint8))).array
    assert (out == 255).all()


def test_dodge_rejects_multichannel():
    with pytest.raises(InvalidParameterError):
        dodge(Image(np.zeros((16, 16, 3), np.uint8)))


def test_dodge_matches_brute_force_on_step_edge():
    params = SketchParams(blur_sigma=2.0)
    arr = np.zeros((16, 16), np.uint8)
    arr[:, 8:] = 255
    got = dodge(Image(arr), params).array
    expected = brute_force_dodge(arr, params)
    assert np.array_equal(got, expected)
    # flat regions render near-white; a dark band survives on the dark side
    assert (got[:, :2] == 255).all()
    assert (got[:, 14:] >= 254).all()
    assert (got[:, 4:8] == 0).all()


def test_stylize_constant_gives_127():
    for c in (0, 60, 255):
        out = stylize(Image(np.full((20, 20), c, np.uint8))).array
        assert (out == 127).all()


def test_stylize_removes_dc_offset():
    a = Image(np.full((32, 32), 100, np.uint8))
    b = Image(np.full((32, 32), 140, np.uint8))
    oa = stylize(a).array
    ob = stylize(b).array
    assert np.array_equal(oa[8:-8, 8:-8], ob[8:-8, 8:-8])


def test_stylize_matches_brute_force_on_line():
    params = SketchParams(highpass_sigma=1.5)
    arr = np.full((32, 32), 255, np.uint8)
    arr[15:17, :] = 20
    got = stylize(Image(arr), params).array
    expected = brute_force_stylize(arr, params)
    assert np.array_equal(got, expected)
    # negative of the edge response: the line area ends darker than background
    assert got[16, 16] > got[5, 16]


def test_stylize_mean_near_inverted_offset():
    out = stylize(Image(np.full((40, 40), 77, np.uint8))).array
    assert abs(out.mean() - (255 - 128)) <= 2


def test_sketchify_deterministic(rng):
    photo = Image(rng.integers(0, 256, (48, 64, 3), dtype=np.uint8))
    a = sketchify(photo).array
    b = sketchify(photo).array
    assert np.array_equal(a, b)


def test_sketchify_all_white_gives_uniform_127():
    photo = Image(np.full((32, 32, 3), 255, np.uint8))
    out = sketchify(photo)
    assert out.channels == 1
    assert (out.array == 127).all()


def test_sketchify_twice_stays_valid(rng):
    photo = Image(rng.integers(0, 256, (48, 48, 3), dtype=np.uint8))
    once = sketchify(photo)
    twice = sketchify(once)
    assert twice.channels == 1
    assert (twice.width, twice.height) == (photo.width, photo.height)


def test_dodge_never_darkens(rng):
    # every mask value is <= 255, so the 256/mask gain is >= 1 everywhere
    gray = Image(rng.integers(0, 256, (32, 32), dtype=np.uint8))
    out = dodge(gray).array
    assert (out >= gray.array).all()


def test_dodge_and_stylize_preserve_dimensions(rng):
    gray = Image(rng.integers(0, 256, (21, 34), dtype=np.uint8))
    assert dodge(gray).array.shape == (21, 34)
    assert stylize(gray).array.shape == (21, 34)


def test_params_validation():
    with pytest.raises(InvalidParameterError):
        SketchParams(blur_sigma=0)
    with pytest.raises(InvalidParameterError):
        SketchParams(highpass_sigma=-1)
