"""Projective transforms: normalized DLT, RANSAC, warping, mean translation.

Homographies are canonicalized to Frobenius norm 1 with the last
nonzero row-major entry positive, so equality of projective maps is
plain matrix closeness.  DLT pre-conditions both point sets (centroid
to origin, mean radius sqrt(2)); without that the 1e-6 recovery target
is unreachable on image-scale coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sketch3d import kernels
from sketch3d.errors import (
    DegenerateGeometryError,
    InsufficientDataError,
    InvalidParameterError,
    NoConsensusError,
    PointAtInfinityError,
)
from sketch3d.image import Image

_DET_EPS = 1e-12
_SV_RATIO_EPS = 1e-9


def canonicalize(m: np.ndarray) -> np.ndarray:
    """Scale to Frobenius norm 1 and make the last nonzero entry positive."""
    m = np.asarray(m, dtype=np.float64)
    norm = np.linalg.norm(m)
    if not np.isfinite(norm) or norm == 0.0:
        raise DegenerateGeometryError("cannot canonicalize a zero/non-finite matrix")
    out = m / norm
    flat = out.ravel()
    for i in range(8, -1, -1):
        if abs(flat[i]) > _DET_EPS:
            if flat[i] < 0:
                out = -out
            break
    return out


@dataclass(frozen=True)
class Homography:
    """A 3x3 invertible projective map, stored in canonical form."""

    m: np.ndarray

    def __post_init__(self):
        mat = canonicalize(np.asarray(self.m, dtype=np.float64).reshape(3, 3))
        if abs(np.linalg.det(mat)) <= _DET_EPS:
            raise DegenerateGeometryError("homography is not invertible")
        mat.setflags(write=False)
        object.__setattr__(self, "m", mat)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, dx: float, dy: float) -> "Homography":
        return cls(np.array([[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]]))

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.m))

    def compose(self, other: "Homography") -> "Homography":
        """self after other: (self @ other)(p) = self(other(p))."""
        return Homography(self.m @ other.m)

    def to_json_list(self) -> list[float]:
        return [float(v) for v in self.m.ravel()]

    @classmethod
    def from_json_list(cls, values) -> "Homography":
        vals = [float(v) for v in values]
        if len(vals) != 9:
            raise InsufficientDataError("homography JSON must hold 9 numbers")
        return cls(np.array(vals).reshape(3, 3))


@dataclass(frozen=True)
class PointPair:
    p1: tuple[float, float]
    p2: tuple[float, float]


@dataclass(frozen=True)
class RansacConfig:
    max_iterations: int = 2000
    inlier_threshold: float = 3.0    # symmetric transfer error, pixels
    min_inliers: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.inlier_threshold <= 0:
            raise InvalidParameterError("inlier threshold must be > 0")
        if self.max_iterations < 1:
            raise InvalidParameterError("max_iterations must be >= 1")


def _as_arrays(pairs) -> tuple[np.ndarray, np.ndarray]:
    p1 = np.array([p.p1 for p in pairs], dtype=np.float64)
    p2 = np.array([p.p2 for p in pairs], dtype=np.float64)
    return p1, p2


def _normalizing_transform(pts: np.ndarray) -> np.ndarray:
    centroid = pts.mean(axis=0)
    radii = np.sqrt(((pts - centroid) ** 2).sum(axis=1))
    mean_radius = radii.mean()
    if mean_radius <= _DET_EPS:
        raise DegenerateGeometryError("points are (nearly) coincident")
    s = np.sqrt(2.0) / mean_radius
    return np.array([[s, 0.0, -s * centroid[0]],
                     [0.0, s, -s * centroid[1]],
                     [0.0, 0.0, 1.0]])


def _apply3(t: np.ndarray, pts: np.ndarray) -> np.ndarray:
    ones = np.ones((len(pts), 1))
    mapped = np.hstack([pts, ones]) @ t.T
    return mapped[:, :2] / mapped[:, 2:3]


def dlt(pairs) -> Homography:
    """Direct linear transform fit of p1 -> p2 with Hartley normalization."""
    if len(pairs) < 4:
        raise InsufficientDataError(f"DLT needs >= 4 pairs, got {len(pairs)}")
    p1, p2 = _as_arrays(pairs)
    if not (np.all(np.isfinite(p1)) and np.all(np.isfinite(p2))):
        raise DegenerateGeometryError("non-finite point coordinates")
    t1 = _normalizing_transform(p1)
    t2 = _normalizing_transform(p2)
    n1 = _apply3(t1, p1)
    n2 = _apply3(t2, p2)

    n = len(pairs)
    a = np.zeros((2 * n, 9))
    a[0::2, 0:2] = n1
    a[0::2, 2] = 1.0
    a[0::2, 6:8] = -n2[:, 0:1] * n1
    a[0::2, 8] = -n2[:, 0]
    a[1::2, 3:5] = n1
    a[1::2, 5] = 1.0
    a[1::2, 6:8] = -n2[:, 1:2] * n1
    a[1::2, 8] = -n2[:, 1]

    _, sv, vt = np.linalg.svd(a)
    # rank < 8 (or an ambiguous null space) means the configuration is degenerate
    if sv[7] <= _SV_RATIO_EPS * sv[0]:
        raise DegenerateGeometryError("degenerate point configuration (rank < 8)")
    if len(sv) > 8 and sv[7] - sv[8] <= _SV_RATIO_EPS * sv[0]:
        raise DegenerateGeometryError("ambiguous null space (tied singular values)")
    h_norm = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t2) @ h_norm @ t1
    return Homography(h)


def apply_homography(h: Homography, p) -> tuple[float, float]:
    x, y = float(p[0]), float(p[1])
    w = h.m[2, 0] * x + h.m[2, 1] * y + h.m[2, 2]
    if abs(w) <= _DET_EPS:
        raise PointAtInfinityError(f"point {p} maps to infinity")
    return ((h.m[0, 0] * x + h.m[0, 1] * y + h.m[0, 2]) / w,
            (h.m[1, 0] * x + h.m[1, 1] * y + h.m[1, 2]) / w)


def apply_homography_many(h: Homography, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64)
    ones = np.ones((len(pts), 1))
    mapped = np.hstack([pts, ones]) @ h.m.T
    w = mapped[:, 2]
    if np.any(np.abs(w) <= _DET_EPS):
        raise PointAtInfinityError("a point maps to infinity")
    return mapped[:, :2] / w[:, None]


def symmetric_transfer_errors(h: Homography, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Forward reprojection distance plus backward distance, per pair."""
    hinv = h.inverse()
    fwd = apply_homography_many(h, p1) - p2
    bwd = apply_homography_many(hinv, p2) - p1
    return np.sqrt((fwd ** 2).sum(axis=1)) + np.sqrt((bwd ** 2).sum(axis=1))


def ransac_homography(pairs, cfg: RansacConfig = RansacConfig()):
    """Seeded consensus fit; returns (Homography, sorted inlier indices).

    Minimal 4-point samples are scored by symmetric transfer error
    against ``cfg.inlier_threshold``; the best consensus set is refit
    with DLT and the inlier set recomputed under the refit model.  The
    iteration count adapts to the observed inlier ratio (99.9%
    confidence) but never exceeds ``cfg.max_iterations``.
    """
    n = len(pairs)
    if n < 4:
        raise InsufficientDataError(f"RANSAC needs >= 4 pairs, got {n}")
    p1, p2 = _as_arrays(pairs)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    best_count = 0
    best_inliers = None
    needed = cfg.max_iterations
    it = 0
    while it < needed:
        sample = rng.choice(n, size=4, replace=False)
        it += 1
        try:
            h = dlt([pairs[i] for i in sample])
            errors = symmetric_transfer_errors(h, p1, p2)
        except (DegenerateGeometryError, PointAtInfinityError):
            # near-collinear sample or an inverse too ill-conditioned to score
            continue
        inliers = np.nonzero(errors < cfg.inlier_threshold)[0]
        if len(inliers) > best_count:
            best_count = len(inliers)
            best_inliers = inliers
            ratio = best_count / n
            if ratio > 0:
                miss = 1.0 - ratio ** 4
                if miss <= 1e-12:
                    adaptive = it
                else:
                    adaptive = int(np.ceil(np.log(1e-3) / np.log(miss)))
                needed = min(cfg.max_iterations, max(it, adaptive))

    if best_inliers is None or best_count < max(cfg.min_inliers, 4):
        raise NoConsensusError(
            f"best consensus {best_count} below min_inliers {cfg.min_inliers}",
            best_inliers=best_count)

    refit = dlt([pairs[i] for i in best_inliers])
    errors = symmetric_transfer_errors(refit, p1, p2)
    final_inliers = np.nonzero(errors < cfg.inlier_threshold)[0]
    if len(final_inliers) < cfg.min_inliers:
        raise NoConsensusError(
            f"refit consensus {len(final_inliers)} below min_inliers {cfg.min_inliers}",
            best_inliers=len(final_inliers))
    return refit, [int(i) for i in final_inliers]


def mean_translation(pairs) -> tuple[float, float]:
    """Component-wise mean of p2 - p1."""
    if len(pairs) == 0:
        raise InsufficientDataError("mean_translation needs >= 1 pair")
    p1, p2 = _as_arrays(pairs)
    d = (p2 - p1).mean(axis=0)
    return float(d[0]), float(d[1])


@dataclass(frozen=True)
class WarpResult:
    image: Image
    offset: tuple[int, int]          # top-left of the canvas in destination frame
    mask: np.ndarray = field(repr=False)   # uint8, 1 = source coverage


def warp_image(img: Image, h: Homography, output_rect=None, fill: int = 255) -> WarpResult:
    """Warp ``img`` by ``h`` with inverse mapping and bilinear sampling.

    The canvas is the bounding box of the warped source corners unless
    ``output_rect`` = (x, y, w, h) pins it explicitly.  Out-of-source
    pixels take ``fill`` (white by default: sketches live on white
    paper) and are 0 in the coverage mask.
    """
    corners = np.array([[0.0, 0.0],
                        [img.width - 1.0, 0.0],
                        [0.0, img.height - 1.0],
                        [img.width - 1.0, img.height - 1.0]])
    if output_rect is None:
        try:
            warped = apply_homography_many(h, corners)
        except PointAtInfinityError as exc:
            raise DegenerateGeometryError(f"source corners map to infinity: {exc}") from exc
        # snap near-integer corners so exact maps do not inflate the canvas
        nearest = np.floor(warped + 0.5)
        warped = np.where(np.abs(warped - nearest) < 1e-9, nearest, warped)
        ox = int(np.floor(warped[:, 0].min()))
        oy = int(np.floor(warped[:, 1].min()))
        out_w = int(np.ceil(warped[:, 0].max())) - ox + 1
        out_h = int(np.ceil(warped[:, 1].max())) - oy + 1
    else:
        ox, oy, out_w, out_h = (int(v) for v in output_rect)
        if out_w < 1 or out_h < 1:
            raise DegenerateGeometryError("output rect must be at least 1x1")
    hinv = h.inverse()
    out, mask = kernels.warp_bilinear_u8(
        img.planes(), np.ascontiguousarray(hinv.m), ox, oy, out_w, out_h,
        np.uint8(fill))
    result = Image(out[:, :, 0] if img.channels == 1 else out)
    return WarpResult(image=result, offset=(ox, oy), mask=mask)
