"""Independent reference implementations used by tests.

Everything here recomputes expected values by a different route than
the package (dense convolution instead of separable, pinned-corner
linear solve instead of SVD DLT, per-pixel loops instead of vectorized
kernels) so the two sides cannot share a bug.
"""

import math

import numpy as np


def solve_h_from_corners(src, dst):
    """8x8 linear solve with h22 pinned to 1."""
    a, b = [], []
    for (x, y), (u, v) in zip(src, dst):
        a.append([x, y, 1, 0, 0, 0, -u * x, -u * y])
        b.append(u)
        a.append([0, 0, 0, x, y, 1, -v * x, -v * y])
        b.append(v)
    h = np.linalg.solve(np.array(a, float), np.array(b, float))
    return np.append(h, 1.0).reshape(3, 3)


def project(m, pts):
    pts = np.asarray(pts, float)
    ones = np.ones((len(pts), 1))
    out = np.hstack([pts, ones]) @ m.T
    return out[:, :2] / out[:, 2:3]


def random_truth_homography(rng, w=400.0, h=300.0, shift=0.15):
    src = [(0.0, 0.0), (w - 1, 0.0), (0.0, h - 1), (w - 1, h - 1)]
    dst = [(x + rng.uniform(-shift * w, shift * w),
            y + rng.uniform(-shift * w, shift * w)) for x, y in src]
    return solve_h_from_corners(src, dst)


def dense_blur_u8(arr, sigma):
    """Direct 2-D convolution with edge replication, quantized like the package."""
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


def dense_dodge(gray, blur_sigma, scale=256.0):
    mask = 255 - dense_blur_u8(255 - gray, blur_sigma)
    out = np.zeros_like(gray)
    for i in range(gray.shape[0]):
        for j in range(gray.shape[1]):
            if mask[i, j] == 0:
                out[i, j] = 255
            else:
                v = math.floor(gray[i, j] * scale / mask[i, j] + 0.5)
                out[i, j] = min(max(v, 0), 255)
    return out


def dense_stylize(pencil, hp_sigma, offset=128):
    blurred = dense_blur_u8(pencil, hp_sigma)
    out = np.zeros_like(pencil)
    for i in range(pencil.shape[0]):
        for j in range(pencil.shape[1]):
            hp = int(pencil[i, j]) - int(blurred[i, j]) + offset
            out[i, j] = 255 - min(max(hp, 0), 255)
    return out
