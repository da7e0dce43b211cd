"""Pure-numpy implementations of the hot per-pixel kernels.

This module is the fallback used when the compiled extension
(:mod:`sketch3d.kernels._core`) is unavailable.  Both backends must
produce byte-identical outputs: every float expression here is written
in the same operand order as its C counterpart, all reductions run over
integers, and quantization is floor(x + 0.5).  Keep the two files in
sync when touching either.
"""

import numpy as np


def fast_scores(img, threshold, margin, circle_dy, circle_dx):
    """Segment-test corner scores (0 where the test fails).

    A pixel is a corner when >= 9 contiguous pixels of its 16-pixel
    Bresenham circle are all brighter than center+threshold or all
    darker than center-threshold.  The score is the summed threshold
    excess of the winning polarity.
    """
    h, w = img.shape
    scores = np.zeros((h, w), dtype=np.int32)
    if h <= 2 * margin or w <= 2 * margin:
        return scores
    center = img[margin:h - margin, margin:w - margin].astype(np.int32)
    ih, iw = center.shape

    bright_bits = np.zeros((ih, iw), dtype=np.uint32)
    dark_bits = np.zeros((ih, iw), dtype=np.uint32)
    s_bright = np.zeros((ih, iw), dtype=np.int32)
    s_dark = np.zeros((ih, iw), dtype=np.int32)
    for k in range(16):
        dy = int(circle_dy[k])
        dx = int(circle_dx[k])
        ring = img[margin + dy:margin + dy + ih, margin + dx:margin + dx + iw].astype(np.int32)
        diff = ring - center
        bright = diff > threshold
        dark = diff < -threshold
        bright_bits |= bright.astype(np.uint32) << np.uint32(k)
        dark_bits |= dark.astype(np.uint32) << np.uint32(k)
        s_bright += np.where(bright, diff - threshold, 0)
        s_dark += np.where(dark, -diff - threshold, 0)

    def has_run9(bits):
        # double the 16-bit ring so circular runs become linear
        y = bits | (bits << np.uint32(16))
        for _ in range(8):
            y &= y << np.uint32(1)
        return y != 0

    is_bright = has_run9(bright_bits)
    is_dark = has_run9(dark_bits)
    inner = np.where(is_bright, s_bright, np.where(is_dark, s_dark, 0)).astype(np.int32)
    scores[margin:h - margin, margin:w - margin] = inner
    return scores


def nms_peaks(scores):
    """3x3 non-maximal suppression with a deterministic plateau rule.

    A positive-score pixel survives iff its score is strictly greater
    than every neighbor later in raster order and >= every earlier
    neighbor (the raster-last pixel of an equal-score plateau wins).
    Returns (ys, xs) int32 arrays in raster order.
    """
    h, w = scores.shape
    padded = np.full((h + 2, w + 2), -1, dtype=np.int32)
    padded[1:-1, 1:-1] = scores
    c = padded[1:-1, 1:-1]
    keep = c > 0
    for dy, dx in ((0, 1), (1, -1), (1, 0), (1, 1)):  # later in raster order
        keep &= c > padded[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx]
    for dy, dx in ((0, -1), (-1, -1), (-1, 0), (-1, 1)):  # earlier
        keep &= c >= padded[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx]
    ys, xs = np.nonzero(keep)
    return ys.astype(np.int32), xs.astype(np.int32)


def disc_moments(img, ys, xs, dys, dxs):
    """First-order intensity moments (m10, m01) over a pixel-offset disc."""
    if len(ys) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    yy = ys.astype(np.intp)[:, None] + dys.astype(np.intp)[None, :]
    xx = xs.astype(np.intp)[:, None] + dxs.astype(np.intp)[None, :]
    patch = img[yy, xx].astype(np.int64)
    m10 = patch @ dxs.astype(np.int64)
    m01 = patch @ dys.astype(np.int64)
    return m10, m01


def harris_moments(img, ys, xs, wdy, wdx):
    """Sobel-gradient second-moment sums (sxx, syy, sxy) over a window.

    wdy/wdx enumerate the window offsets (e.g. a 7x7 block).  All sums
    are exact int64; the float Harris response is formed by the caller.
    """
    n = len(ys)
    if n == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), z.copy()
    im = img.astype(np.int64)
    yy = ys.astype(np.intp)[:, None] + wdy.astype(np.intp)[None, :]
    xx = xs.astype(np.intp)[:, None] + wdx.astype(np.intp)[None, :]
    gx = (im[yy - 1, xx + 1] + 2 * im[yy, xx + 1] + im[yy + 1, xx + 1]
          - im[yy - 1, xx - 1] - 2 * im[yy, xx - 1] - im[yy + 1, xx - 1])
    gy = (im[yy + 1, xx - 1] + 2 * im[yy + 1, xx] + im[yy + 1, xx + 1]
          - im[yy - 1, xx - 1] - 2 * im[yy - 1, xx] - im[yy - 1, xx + 1])
    sxx = np.sum(gx * gx, axis=1)
    syy = np.sum(gy * gy, axis=1)
    sxy = np.sum(gx * gy, axis=1)
    return sxx, syy, sxy


def brief_bits(box, ys, xs, cosv, sinv, pattern):
    """Steered binary tests over box-smoothed intensities.

    box is the 5x5 integer box-sum image; pattern is (256, 4) int32 of
    (px, py, qx, qy) offsets.  Bit j of byte j//8 (LSB-first) is 1 when
    the smoothed intensity at the rotated p is below the one at q.
    """
    n = len(ys)
    if n == 0:
        return np.zeros((0, 32), dtype=np.uint8)
    px = pattern[:, 0].astype(np.float64)
    py = pattern[:, 1].astype(np.float64)
    qx = pattern[:, 2].astype(np.float64)
    qy = pattern[:, 3].astype(np.float64)
    c = cosv[:, None]
    s = sinv[:, None]
    rpx = np.floor(px[None, :] * c - py[None, :] * s + 0.5).astype(np.intp)
    rpy = np.floor(px[None, :] * s + py[None, :] * c + 0.5).astype(np.intp)
    rqx = np.floor(qx[None, :] * c - qy[None, :] * s + 0.5).astype(np.intp)
    rqy = np.floor(qx[None, :] * s + qy[None, :] * c + 0.5).astype(np.intp)
    ybase = ys.astype(np.intp)[:, None]
    xbase = xs.astype(np.intp)[:, None]
    bits = box[ybase + rpy, xbase + rpx] < box[ybase + rqy, xbase + rqx]
    return np.packbits(bits, axis=1, bitorder="little")


def hamming_table(a, b):
    """All-pairs Hamming distances between packed 256-bit descriptors."""
    n, m = len(a), len(b)
    out = np.empty((n, m), dtype=np.int32)
    if n == 0 or m == 0:
        return out
    block = max(1, (1 << 22) // max(m * 32, 1))
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        x = np.bitwise_xor(a[i0:i1, None, :], b[None, :, :])
        out[i0:i1] = np.bitwise_count(x).sum(axis=2, dtype=np.int32)
    return out


def warp_bilinear_u8(src, hinv, ox, oy, out_w, out_h, fill):
    """Inverse-map a u8 image through hinv with bilinear sampling.

    Destination pixel (i, j) sits at canvas coordinate (ox+j, oy+i).
    Returns (out u8[out_h,out_w,C], mask u8[out_h,out_w]) where mask is
    1 wherever the source was sampled and 0 where fill was used.
    """
    h, w, nch = src.shape
    jj, ii = np.meshgrid(np.arange(out_w, dtype=np.float64),
                         np.arange(out_h, dtype=np.float64))
    dx = ox + jj
    dy = oy + ii
    denom = hinv[2, 0] * dx + hinv[2, 1] * dy + hinv[2, 2]
    ok = np.abs(denom) > 1e-12
    safe = np.where(ok, denom, 1.0)
    sx = (hinv[0, 0] * dx + hinv[0, 1] * dy + hinv[0, 2]) / safe
    sy = (hinv[1, 0] * dx + hinv[1, 1] * dy + hinv[1, 2]) / safe
    # snap samples within 1e-9 of the pixel grid so exact integer maps
    # (identity, integer translations) stay lossless despite the
    # canonical-scale round trip
    gx = np.floor(sx + 0.5)
    sx = np.where(np.abs(sx - gx) < 1e-9, gx, sx)
    gy = np.floor(sy + 0.5)
    sy = np.where(np.abs(sy - gy) < 1e-9, gy, sy)
    valid = ok & (sx >= 0.0) & (sx <= w - 1.0) & (sy >= 0.0) & (sy <= h - 1.0)

    x0 = np.floor(np.where(valid, sx, 0.0)).astype(np.intp)
    y0 = np.floor(np.where(valid, sy, 0.0)).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.where(valid, sx, 0.0) - x0
    fy = np.where(valid, sy, 0.0) - y0

    out = np.full((out_h, out_w, nch), fill, dtype=np.uint8)
    for ch in range(nch):
        plane = src[:, :, ch].astype(np.float64)
        p00 = plane[y0, x0]
        p01 = plane[y0, x1]
        p10 = plane[y1, x0]
        p11 = plane[y1, x1]
        val = (1.0 - fy) * ((1.0 - fx) * p00 + fx * p01) + fy * ((1.0 - fx) * p10 + fx * p11)
        q = np.floor(val + 0.5)
        q = np.clip(q, 0.0, 255.0).astype(np.uint8)
        out[:, :, ch] = np.where(valid, q, fill)
    return out, valid.astype(np.uint8)


def resize_bilinear_u8(src, out_w, out_h):
    """Bilinear resize with pixel-center alignment and edge clamping."""
    h, w, nch = src.shape
    scale_x = w / out_w
    scale_y = h / out_h
    sx = (np.arange(out_w, dtype=np.float64) + 0.5) * scale_x - 0.5
    sy = (np.arange(out_h, dtype=np.float64) + 0.5) * scale_y - 0.5
    sx = np.minimum(np.maximum(sx, 0.0), w - 1.0)
    sy = np.minimum(np.maximum(sy, 0.0), h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (sx - x0)[None, :]
    fy = (sy - y0)[:, None]

    out = np.empty((out_h, out_w, nch), dtype=np.uint8)
    for ch in range(nch):
        plane = src[:, :, ch].astype(np.float64)
        p00 = plane[np.ix_(y0, x0)]
        p01 = plane[np.ix_(y0, x1)]
        p10 = plane[np.ix_(y1, x0)]
        p11 = plane[np.ix_(y1, x1)]
        val = (1.0 - fy) * ((1.0 - fx) * p00 + fx * p01) + fy * ((1.0 - fx) * p10 + fx * p11)
        out[:, :, ch] = np.clip(np.floor(val + 0.5), 0.0, 255.0).astype(np.uint8)
    return out
