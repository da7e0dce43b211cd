"""Pairwise and sequential drawing stitching.

A stitch is four stages: match features, fit a robust homography and
warp drawing 1 into drawing 2's perspective, re-match on the warped
raster, then overlay drawing 2 by the mean translation of the
re-matched consensus.  Drawing 2's pixels always win on overlap (hard
overwrite, no blending).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sketch3d.errors import InvalidParameterError, NoConsensusError, StitchFailureError
from sketch3d.features import detect_and_describe, match_features
from sketch3d.geometry import (
    Homography,
    PointPair,
    RansacConfig,
    mean_translation,
    ransac_homography,
    warp_image,
)
from sketch3d.image import Image, gray_to_rgb, to_grayscale

DEFAULT_MAX_FEATURES = 1500
MIN_STAGE2_MATCHES = 3


@dataclass
class StitchResult:
    canvas: Image
    homography: Homography                 # drawing1 -> drawing2 frame
    translation: tuple[float, float]       # drawing2 placement in the shared frame
    stage1_matches: int
    stage2_matches: int
    ransac_inliers: int
    inlier_ratio: float
    steps: list = field(default_factory=list)


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _translation_consensus(deltas: np.ndarray, threshold: float) -> np.ndarray:
    """Indices of the largest set agreeing with one observed translation.

    Every delta is tried as the candidate model (1-point hypotheses are
    cheap), so the result is deterministic without sampling.  Ties keep
    the earliest candidate.
    """
    best_idx = None
    best_count = -1
    for i in range(len(deltas)):
        close = np.sqrt(((deltas - deltas[i]) ** 2).sum(axis=1)) < threshold
        count = int(close.sum())
        if count > best_count:
            best_count = count
            best_idx = close
    return np.nonzero(best_idx)[0]


def stitch_pair(d1: Image, d2: Image, cfg: RansacConfig = RansacConfig(),
                max_features: int = DEFAULT_MAX_FEATURES) -> StitchResult:
    """Stitch drawing 1 onto drawing 2's perspective; d2 ends up on top."""
    if min(d1.width, d1.height, d2.width, d2.height) < 64:
        raise InvalidParameterError("stitch inputs must be at least 64x64")

    feats1 = detect_and_describe(to_grayscale(d1), max_features)
    feats2 = detect_and_describe(to_grayscale(d2), max_features)
    matches = match_features([f[1] for f in feats1], [f[1] for f in feats2])
    stage1 = len(matches)
    if stage1 < 4:
        raise StitchFailureError(
            f"only {stage1} feature matches between the drawings", stage1_matches=stage1)

    pairs = [PointPair((feats1[m.index_a][0].x, feats1[m.index_a][0].y),
                       (feats2[m.index_b][0].x, feats2[m.index_b][0].y))
             for m in matches]
    try:
        hom, inliers = ransac_homography(pairs, cfg)
    except NoConsensusError as exc:
        raise StitchFailureError(
            f"no homography consensus ({exc})", stage1_matches=stage1) from exc
    inlier_ratio = len(inliers) / stage1

    rgb = d1.channels == 3 or d2.channels == 3
    vis1 = gray_to_rgb(d1) if rgb else d1
    vis2 = gray_to_rgb(d2) if rgb else d2
    warped = warp_image(vis1, hom)
    ox, oy = warped.offset

    feats_w = detect_and_describe(to_grayscale(warped.image), max_features)
    matches_w = match_features([f[1] for f in feats_w], [f[1] for f in feats2])
    stage2 = len(matches_w)
    if stage2 < MIN_STAGE2_MATCHES:
        raise StitchFailureError(
            f"only {stage2} matches after warping", stage1_matches=stage1,
            stage2_matches=stage2)

    # deltas give drawing 2's placement relative to the warped drawing 1,
    # both expressed in drawing 2's frame
    p_w = np.array([(feats_w[m.index_a][0].x + ox, feats_w[m.index_a][0].y + oy)
                    for m in matches_w])
    p_2 = np.array([(feats2[m.index_b][0].x, feats2[m.index_b][0].y)
                    for m in matches_w])
    deltas = p_w - p_2
    consensus = _translation_consensus(deltas, cfg.inlier_threshold)
    tx, ty = mean_translation(
        [PointPair(tuple(p_2[i]), tuple(p_w[i])) for i in consensus])

    tix, tiy = _round_half_up(tx), _round_half_up(ty)
    min_x = min(ox, tix)
    min_y = min(oy, tiy)
    max_x = max(ox + warped.image.width, tix + vis2.width)
    max_y = max(oy + warped.image.height, tiy + vis2.height)
    canvas = np.full((max_y - min_y, max_x - min_x) + ((3,) if rgb else ()),
                     255, dtype=np.uint8)

    wa = warped.image.array
    wy, wx = oy - min_y, ox - min_x
    region = canvas[wy:wy + warped.image.height, wx:wx + warped.image.width]
    cov = warped.mask.astype(bool)
    region[cov] = wa[cov]

    dy, dx = tiy - min_y, tix - min_x
    canvas[dy:dy + vis2.height, dx:dx + vis2.width] = vis2.array

    return StitchResult(
        canvas=Image(canvas),
        homography=hom,
        translation=(float(tx), float(ty)),
        stage1_matches=stage1,
        stage2_matches=stage2,
        ransac_inliers=len(inliers),
        inlier_ratio=inlier_ratio,
    )


def stitch_many(drawings, cfg: RansacConfig = RansacConfig(),
                max_features: int = DEFAULT_MAX_FEATURES) -> StitchResult:
    """Left fold of stitch_pair over an ordered drawing list."""
    if len(drawings) < 2:
        raise InvalidParameterError("stitch_many needs at least 2 drawings")
    steps = []
    acc = drawings[0]
    result = None
    for k, nxt in enumerate(drawings[1:], start=1):
        try:
            result = stitch_pair(acc, nxt, cfg, max_features)
        except StitchFailureError as exc:
            raise StitchFailureError(
                f"stitch failed at step {k}: {exc}",
                stage1_matches=exc.stage1_matches,
                stage2_matches=exc.stage2_matches,
                step=k) from exc
        steps.append({
            "step": k,
            "stage1_matches": result.stage1_matches,
            "stage2_matches": result.stage2_matches,
            "inlier_ratio": result.inlier_ratio,
            "translation": list(result.translation),
        })
        acc = result.canvas
    result.steps = steps
    return result
