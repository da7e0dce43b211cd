"""Oriented corner keypoints with 256-bit binary descriptors, plus matching.

Detection runs a FAST-9 segment test (threshold 20) over an 8-level
1.2x image pyramid, suppresses non-maxima, ranks survivors by Harris
response, and keeps the strongest ``max_features``.  Each keypoint gets
an intensity-centroid orientation over a radius-15 disc and a 256-bit
descriptor of box-smoothed pixel comparisons whose test pattern is
fixed by a module seed and steered by the keypoint orientation, so the
whole path is deterministic.

Matching is brute-force Hamming with Lowe's 0.75 ratio test plus a
mutual-best cross-check; ties on the second neighbor fail the strict
ratio inequality by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sketch3d import kernels
from sketch3d.errors import InvalidParameterError
from sketch3d.image import Image, resize, to_grayscale

FAST_THRESHOLD = 20
PYRAMID_SCALE = 1.2
PYRAMID_LEVELS = 8
ORIENTATION_RADIUS = 15
HARRIS_BLOCK = 7
HARRIS_K = 0.04
PATCH_MARGIN = 24          # covers rotated pattern reach + box smoothing
PATTERN_SEED = 0x51B3D1   # fixed pattern seed; never derived per run
RATIO_THRESHOLD = 0.75

_FAST_DX = np.array([0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3, -3, -3, -2, -1], dtype=np.int32)
_FAST_DY = np.array([-3, -3, -2, -1, 0, 1, 2, 3, 3, 3, 2, 1, 0, -1, -2, -3], dtype=np.int32)


def _disc_offsets(radius: int) -> tuple[np.ndarray, np.ndarray]:
    dys, dxs = [], []
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= radius * radius:
                dys.append(dy)
                dxs.append(dx)
    return np.array(dys, dtype=np.int32), np.array(dxs, dtype=np.int32)


def _window_offsets(block: int) -> tuple[np.ndarray, np.ndarray]:
    r = block // 2
    grid = np.arange(-r, r + 1, dtype=np.int32)
    wdy, wdx = np.meshgrid(grid, grid, indexing="ij")
    return wdy.ravel(), wdx.ravel()


def _test_pattern(seed: int = PATTERN_SEED) -> np.ndarray:
    """256 (px, py, qx, qy) comparison offsets, Gaussian about the center."""
    rng = np.random.Generator(np.random.PCG64(seed))
    coords = rng.normal(0.0, 6.2, size=(256, 4))
    return np.clip(np.floor(coords + 0.5), -13, 13).astype(np.int32)


_DISC_DY, _DISC_DX = _disc_offsets(ORIENTATION_RADIUS)
_WIN_DY, _WIN_DX = _window_offsets(HARRIS_BLOCK)
PATTERN = _test_pattern()


@dataclass(frozen=True)
class Keypoint:
    x: float                 # level-0 frame
    y: float
    scale_level: int
    orientation: float       # radians in [0, 2*pi)
    response: float


@dataclass(frozen=True)
class Descriptor:
    bits: bytes              # 256 bits packed LSB-first into 32 bytes

    def __post_init__(self):
        if len(self.bits) != 32:
            raise InvalidParameterError("descriptor must be exactly 32 bytes")

    def distance(self, other: "Descriptor") -> int:
        return sum((a ^ b).bit_count() for a, b in zip(self.bits, other.bits))

    def hex(self) -> str:
        return self.bits.hex()


@dataclass(frozen=True)
class Match:
    index_a: int
    index_b: int
    distance: int


def _box5(img: np.ndarray) -> np.ndarray:
    """5x5 box sums via an integral image; zero on the 2-px border."""
    h, w = img.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(np.cumsum(img, axis=0, dtype=np.int64), axis=1, out=ii[1:, 1:])
    box = np.zeros((h, w), dtype=np.int64)
    box[2:h - 2, 2:w - 2] = (ii[5:, 5:] - ii[:-5, 5:] - ii[5:, :-5] + ii[:-5, :-5])
    return box


def _level_dims(w: int, h: int, level: int) -> tuple[int, int]:
    s = PYRAMID_SCALE ** level
    return max(1, round(w / s)), max(1, round(h / s))


def _select_across_levels(levels_all, ys_all, xs_all, resp_all, per_level, max_features):
    """Pick up to max_features candidate indices, spread across levels.

    Each level gets a quota proportional to its pixel area (largest
    remainder rounding); within a level candidates are ranked by Harris
    response with raster-order tie-breaks.  Capacity a level cannot fill
    is handed to the strongest remaining candidates globally.
    """
    ranking = np.lexsort((xs_all, ys_all, levels_all, -resp_all))
    total = len(ranking)
    if total <= max_features:
        return ranking

    areas = {e[0]: e[1].shape[0] * e[1].shape[1] for e in per_level}
    area_sum = sum(areas.values())
    shares = {lv: max_features * areas[lv] / area_sum for lv in areas}
    quotas = {lv: int(shares[lv]) for lv in areas}
    leftover = max_features - sum(quotas.values())
    for lv in sorted(areas, key=lambda lv: (-(shares[lv] - quotas[lv]), lv)):
        if leftover <= 0:
            break
        quotas[lv] += 1
        leftover -= 1

    taken = []
    used = {lv: 0 for lv in areas}
    spare = []
    for idx in ranking:
        lv = int(levels_all[idx])
        if used[lv] < quotas[lv]:
            used[lv] += 1
            taken.append(idx)
        else:
            spare.append(idx)
    room = max_features - len(taken)
    if room > 0:
        taken.extend(spare[:room])
    out = np.array(taken[:max_features])
    pos = {int(i): p for p, i in enumerate(ranking)}
    return out[np.argsort([pos[int(i)] for i in out])]


def detect_and_describe(img: Image, max_features: int):
    """Detect oriented corners and build descriptors across the pyramid.

    Returns a list of (Keypoint, Descriptor) ordered by descending
    Harris response (ties broken by level, then raster position).
    Images too small for the sampling patch yield an empty list.
    """
    if max_features < 1:
        raise InvalidParameterError(f"max_features must be >= 1, got {max_features}")
    gray = to_grayscale(img)

    per_level = []
    for level in range(PYRAMID_LEVELS):
        lw, lh = _level_dims(gray.width, gray.height, level)
        if lw <= 2 * PATCH_MARGIN or lh <= 2 * PATCH_MARGIN:
            continue
        level_img = gray if level == 0 else resize(gray, lw, lh)
        arr = level_img.array
        scores = kernels.fast_scores(arr, FAST_THRESHOLD, PATCH_MARGIN, _FAST_DY, _FAST_DX)
        ys, xs = kernels.nms_peaks(scores)
        if len(ys) == 0:
            continue
        sxx, syy, sxy = kernels.harris_moments(arr, ys, xs, _WIN_DY, _WIN_DX)
        sxx = sxx.astype(np.float64)
        syy = syy.astype(np.float64)
        sxy = sxy.astype(np.float64)
        response = (sxx * syy - sxy * sxy) - HARRIS_K * (sxx + syy) * (sxx + syy)
        per_level.append((level, arr, ys, xs, response))

    if not per_level:
        return []

    levels_all = np.concatenate([np.full(len(e[2]), e[0], dtype=np.int32) for e in per_level])
    ys_all = np.concatenate([e[2] for e in per_level])
    xs_all = np.concatenate([e[3] for e in per_level])
    resp_all = np.concatenate([e[4] for e in per_level])
    order = _select_across_levels(levels_all, ys_all, xs_all, resp_all,
                                  per_level, max_features)

    arrays = {e[0]: e[1] for e in per_level}
    results = []
    for level in sorted(arrays):
        sel = order[levels_all[order] == level]
        if len(sel) == 0:
            continue
        arr = arrays[level]
        ys = ys_all[sel]
        xs = xs_all[sel]
        m10, m01 = kernels.disc_moments(arr, ys, xs, _DISC_DY, _DISC_DX)
        angles = np.empty(len(sel), dtype=np.float64)
        cosv = np.empty(len(sel), dtype=np.float64)
        sinv = np.empty(len(sel), dtype=np.float64)
        for i in range(len(sel)):
            a = math.atan2(float(m01[i]), float(m10[i]))
            if a < 0.0:
                a += 2.0 * math.pi
            angles[i] = a
            cosv[i] = math.cos(a)
            sinv[i] = math.sin(a)
        descs = kernels.brief_bits(_box5(arr), ys, xs, cosv, sinv, PATTERN)
        # invert the pixel-center resize mapping so level coords land on the
        # exact level-0 positions the resampling drew them from
        scale_x = gray.width / arr.shape[1]
        scale_y = gray.height / arr.shape[0]
        for i, gi in enumerate(sel):
            kp = Keypoint(
                x=(float(xs[i]) + 0.5) * scale_x - 0.5,
                y=(float(ys[i]) + 0.5) * scale_y - 0.5,
                scale_level=level,
                orientation=float(angles[i]),
                response=float(resp_all[gi]),
            )
            results.append((int(gi), kp, Descriptor(bytes(descs[i].tobytes()))))

    rank = {int(gi): pos for pos, gi in enumerate(order)}
    results.sort(key=lambda item: rank[item[0]])
    return [(kp, d) for _, kp, d in results]


def descriptor_array(descriptors) -> np.ndarray:
    """Pack a sequence of Descriptors into a (n, 32) uint8 array."""
    if not descriptors:
        return np.zeros((0, 32), dtype=np.uint8)
    return np.frombuffer(b"".join(d.bits for d in descriptors),
                         dtype=np.uint8).reshape(len(descriptors), 32)


def match_features(a, b) -> list[Match]:
    """Ratio-tested, cross-checked nearest-neighbor matches, ascending distance."""
    da = descriptor_array(a)
    db = descriptor_array(b)
    n, m = len(da), len(db)
    if n == 0 or m == 0:
        return []
    table = kernels.hamming_table(da, db)
    j1 = table.argmin(axis=1)
    d1 = table[np.arange(n), j1]
    if m >= 2:
        d2 = np.partition(table, 1, axis=1)[:, 1].astype(np.float64)
    else:
        d2 = np.full(n, np.inf)
    best_a_of_b = table.argmin(axis=0)
    keep = (d1 < RATIO_THRESHOLD * d2) & (best_a_of_b[j1] == np.arange(n))
    matches = [Match(int(i), int(j1[i]), int(d1[i])) for i in np.nonzero(keep)[0]]
    matches.sort(key=lambda mt: (mt.distance, mt.index_a, mt.index_b))
    return matches
