# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot per-pixel kernels.

Must stay byte-identical to sketch3d/kernels/_core_py.py: same float
expression order, integer reductions, floor(x + 0.5) quantization.  The
build disables FMA contraction (-ffp-contract=off) so the C arithmetic
matches numpy's elementwise semantics exactly.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def fast_scores(const cnp.uint8_t[:, ::1] img, int threshold, int margin,
                const cnp.int32_t[::1] circle_dy, const cnp.int32_t[::1] circle_dx):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    out = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] scores = out
    if h <= 2 * margin or w <= 2 * margin:
        return out

    cdef Py_ssize_t y, x
    cdef int k, center, diff
    cdef unsigned int bright_bits, dark_bits, run
    cdef int s_bright, s_dark
    cdef int i
    for y in range(margin, h - margin):
        for x in range(margin, w - margin):
            center = img[y, x]
            bright_bits = 0
            dark_bits = 0
            s_bright = 0
            s_dark = 0
            for k in range(16):
                diff = img[y + circle_dy[k], x + circle_dx[k]] - center
                if diff > threshold:
                    bright_bits |= (<unsigned int>1) << k
                    s_bright += diff - threshold
                elif diff < -threshold:
                    dark_bits |= (<unsigned int>1) << k
                    s_dark += -diff - threshold
            run = bright_bits | (bright_bits << 16)
            for i in range(8):
                run &= run << 1
            if run != 0:
                scores[y, x] = s_bright
                continue
            run = dark_bits | (dark_bits << 16)
            for i in range(8):
                run &= run << 1
            if run != 0:
                scores[y, x] = s_dark
    return out


def nms_peaks(const cnp.int32_t[:, ::1] scores):
    cdef Py_ssize_t h = scores.shape[0]
    cdef Py_ssize_t w = scores.shape[1]
    cdef Py_ssize_t y, x
    cdef cnp.int32_t s
    ys_list = []
    xs_list = []
    cdef int later_dy[4]
    cdef int later_dx[4]
    cdef int earlier_dy[4]
    cdef int earlier_dx[4]
    later_dy[0] = 0; later_dx[0] = 1
    later_dy[1] = 1; later_dx[1] = -1
    later_dy[2] = 1; later_dx[2] = 0
    later_dy[3] = 1; later_dx[3] = 1
    earlier_dy[0] = 0; earlier_dx[0] = -1
    earlier_dy[1] = -1; earlier_dx[1] = -1
    earlier_dy[2] = -1; earlier_dx[2] = 0
    earlier_dy[3] = -1; earlier_dx[3] = 1
    cdef int k
    cdef Py_ssize_t ny, nx
    cdef cnp.int32_t nb
    cdef bint keep
    for y in range(h):
        for x in range(w):
            s = scores[y, x]
            if s <= 0:
                continue
            keep = True
            for k in range(4):
                ny = y + later_dy[k]
                nx = x + later_dx[k]
                nb = -1
                if 0 <= ny < h and 0 <= nx < w:
                    nb = scores[ny, nx]
                if not s > nb:
                    keep = False
                    break
            if keep:
                for k in range(4):
                    ny = y + earlier_dy[k]
                    nx = x + earlier_dx[k]
                    nb = -1
                    if 0 <= ny < h and 0 <= nx < w:
                        nb = scores[ny, nx]
                    if not s >= nb:
                        keep = False
                        break
            if keep:
                ys_list.append(y)
                xs_list.append(x)
    return (np.asarray(ys_list, dtype=np.int32).reshape(len(ys_list)),
            np.asarray(xs_list, dtype=np.int32).reshape(len(xs_list)))


def disc_moments(const cnp.uint8_t[:, ::1] img, const cnp.int32_t[::1] ys, const cnp.int32_t[::1] xs,
                 const cnp.int32_t[::1] dys, const cnp.int32_t[::1] dxs):
    cdef Py_ssize_t n = ys.shape[0]
    cdef Py_ssize_t npts = dys.shape[0]
    m10_arr = np.zeros(n, dtype=np.int64)
    m01_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] m10 = m10_arr
    cdef cnp.int64_t[::1] m01 = m01_arr
    cdef Py_ssize_t i, k
    cdef cnp.int64_t a10, a01, v
    for i in range(n):
        a10 = 0
        a01 = 0
        for k in range(npts):
            v = img[ys[i] + dys[k], xs[i] + dxs[k]]
            a10 += v * dxs[k]
            a01 += v * dys[k]
        m10[i] = a10
        m01[i] = a01
    return m10_arr, m01_arr


def harris_moments(const cnp.uint8_t[:, ::1] img, const cnp.int32_t[::1] ys, const cnp.int32_t[::1] xs,
                   const cnp.int32_t[::1] wdy, const cnp.int32_t[::1] wdx):
    cdef Py_ssize_t n = ys.shape[0]
    cdef Py_ssize_t npts = wdy.shape[0]
    sxx_arr = np.zeros(n, dtype=np.int64)
    syy_arr = np.zeros(n, dtype=np.int64)
    sxy_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] sxx = sxx_arr
    cdef cnp.int64_t[::1] syy = syy_arr
    cdef cnp.int64_t[::1] sxy = sxy_arr
    cdef Py_ssize_t i, k, y, x
    cdef cnp.int64_t gx, gy, axx, ayy, axy
    for i in range(n):
        axx = 0
        ayy = 0
        axy = 0
        for k in range(npts):
            y = ys[i] + wdy[k]
            x = xs[i] + wdx[k]
            gx = (img[y - 1, x + 1] + 2 * <cnp.int64_t>img[y, x + 1] + img[y + 1, x + 1]
                  - img[y - 1, x - 1] - 2 * <cnp.int64_t>img[y, x - 1] - img[y + 1, x - 1])
            gy = (img[y + 1, x - 1] + 2 * <cnp.int64_t>img[y + 1, x] + img[y + 1, x + 1]
                  - img[y - 1, x - 1] - 2 * <cnp.int64_t>img[y - 1, x] - img[y - 1, x + 1])
            axx += gx * gx
            ayy += gy * gy
            axy += gx * gy
        sxx[i] = axx
        syy[i] = ayy
        sxy[i] = axy
    return sxx_arr, syy_arr, sxy_arr


def brief_bits(const cnp.int64_t[:, ::1] box, const cnp.int32_t[::1] ys, const cnp.int32_t[::1] xs,
               const cnp.float64_t[::1] cosv, const cnp.float64_t[::1] sinv,
               const cnp.int32_t[:, ::1] pattern):
    cdef Py_ssize_t n = ys.shape[0]
    out = np.zeros((n, 32), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] desc = out
    cdef Py_ssize_t i, j
    cdef double c, s, px, py, qx, qy
    cdef Py_ssize_t rpx, rpy, rqx, rqy, yb, xb
    for i in range(n):
        c = cosv[i]
        s = sinv[i]
        yb = ys[i]
        xb = xs[i]
        for j in range(256):
            px = pattern[j, 0]
            py = pattern[j, 1]
            qx = pattern[j, 2]
            qy = pattern[j, 3]
            rpx = <Py_ssize_t>floor(px * c - py * s + 0.5)
            rpy = <Py_ssize_t>floor(px * s + py * c + 0.5)
            rqx = <Py_ssize_t>floor(qx * c - qy * s + 0.5)
            rqy = <Py_ssize_t>floor(qx * s + qy * c + 0.5)
            if box[yb + rpy, xb + rpx] < box[yb + rqy, xb + rqx]:
                desc[i, j >> 3] |= <cnp.uint8_t>(1 << (j & 7))
    return out


def hamming_table(const cnp.uint8_t[:, ::1] a, const cnp.uint8_t[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    out = np.empty((n, m), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] table = out
    if n == 0 or m == 0:
        return out
    cdef const unsigned long long[:, ::1] aw = np.ascontiguousarray(a).view(np.uint64)
    cdef const unsigned long long[:, ::1] bw = np.ascontiguousarray(b).view(np.uint64)
    cdef Py_ssize_t i, j
    cdef unsigned long long x0, x1, x2, x3
    for i in range(n):
        for j in range(m):
            x0 = aw[i, 0] ^ bw[j, 0]
            x1 = aw[i, 1] ^ bw[j, 1]
            x2 = aw[i, 2] ^ bw[j, 2]
            x3 = aw[i, 3] ^ bw[j, 3]
            table[i, j] = (__builtin_popcountll(x0) + __builtin_popcountll(x1)
                           + __builtin_popcountll(x2) + __builtin_popcountll(x3))
    return out


def warp_bilinear_u8(const cnp.uint8_t[:, :, ::1] src, const cnp.float64_t[:, ::1] hinv,
                     long ox, long oy, Py_ssize_t out_w, Py_ssize_t out_h,
                     cnp.uint8_t fill):
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    cdef Py_ssize_t nch = src.shape[2]
    out = np.full((out_h, out_w, nch), fill, dtype=np.uint8)
    mask = np.zeros((out_h, out_w), dtype=np.uint8)
    cdef cnp.uint8_t[:, :, ::1] dst = out
    cdef cnp.uint8_t[:, ::1] msk = mask
    cdef double h00 = hinv[0, 0], h01 = hinv[0, 1], h02 = hinv[0, 2]
    cdef double h10 = hinv[1, 0], h11 = hinv[1, 1], h12 = hinv[1, 2]
    cdef double h20 = hinv[2, 0], h21 = hinv[2, 1], h22 = hinv[2, 2]
    cdef Py_ssize_t i, j, ch, x0, y0, x1, y1
    cdef double dx, dy, denom, sx, sy, fx, fy, val, q, g
    for i in range(out_h):
        for j in range(out_w):
            dx = ox + j
            dy = oy + i
            denom = h20 * dx + h21 * dy + h22
            if denom <= 1e-12 and denom >= -1e-12:
                continue
            sx = (h00 * dx + h01 * dy + h02) / denom
            sy = (h10 * dx + h11 * dy + h12) / denom
            # grid snap: keep exact integer maps lossless (see numpy twin)
            g = floor(sx + 0.5)
            if sx - g < 1e-9 and sx - g > -1e-9:
                sx = g
            g = floor(sy + 0.5)
            if sy - g < 1e-9 and sy - g > -1e-9:
                sy = g
            if not (sx >= 0.0 and sx <= w - 1.0 and sy >= 0.0 and sy <= h - 1.0):
                continue
            x0 = <Py_ssize_t>floor(sx)
            y0 = <Py_ssize_t>floor(sy)
            x1 = x0 + 1
            if x1 > w - 1:
                x1 = w - 1
            y1 = y0 + 1
            if y1 > h - 1:
                y1 = h - 1
            fx = sx - x0
            fy = sy - y0
            msk[i, j] = 1
            for ch in range(nch):
                val = ((1.0 - fy) * ((1.0 - fx) * <double>src[y0, x0, ch] + fx * <double>src[y0, x1, ch])
                       + fy * ((1.0 - fx) * <double>src[y1, x0, ch] + fx * <double>src[y1, x1, ch]))
                q = floor(val + 0.5)
                if q < 0.0:
                    q = 0.0
                elif q > 255.0:
                    q = 255.0
                dst[i, j, ch] = <cnp.uint8_t>q
    return out, mask


def resize_bilinear_u8(const cnp.uint8_t[:, :, ::1] src, Py_ssize_t out_w, Py_ssize_t out_h):
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    cdef Py_ssize_t nch = src.shape[2]
    out = np.empty((out_h, out_w, nch), dtype=np.uint8)
    cdef cnp.uint8_t[:, :, ::1] dst = out
    cdef double scale_x = (<double>w) / (<double>out_w)
    cdef double scale_y = (<double>h) / (<double>out_h)
    cdef Py_ssize_t i, j, ch, x0, y0, x1, y1
    cdef double sx, sy, fx, fy, val, q
    for i in range(out_h):
        sy = (i + 0.5) * scale_y - 0.5
        if sy < 0.0:
            sy = 0.0
        if sy > h - 1.0:
            sy = h - 1.0
        y0 = <Py_ssize_t>floor(sy)
        y1 = y0 + 1
        if y1 > h - 1:
            y1 = h - 1
        fy = sy - y0
        for j in range(out_w):
            sx = (j + 0.5) * scale_x - 0.5
            if sx < 0.0:
                sx = 0.0
            if sx > w - 1.0:
                sx = w - 1.0
            x0 = <Py_ssize_t>floor(sx)
            x1 = x0 + 1
            if x1 > w - 1:
                x1 = w - 1
            fx = sx - x0
            for ch in range(nch):
                val = ((1.0 - fy) * ((1.0 - fx) * <double>src[y0, x0, ch] + fx * <double>src[y0, x1, ch])
                       + fy * ((1.0 - fx) * <double>src[y1, x0, ch] + fx * <double>src[y1, x1, ch]))
                q = floor(val + 0.5)
                if q < 0.0:
                    q = 0.0
                elif q > 255.0:
                    q = 255.0
                dst[i, j, ch] = <cnp.uint8_t>q
    return out
