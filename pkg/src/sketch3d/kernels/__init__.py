"""Kernel backend selection.

The compiled Cython extension is preferred; the pure-numpy fallback is
used when it is missing (source checkout without a build) or when
SKETCH3D_FORCE_PYTHON_KERNELS=1 is set.  Both produce byte-identical
results, so the choice only affects speed.  ``backend`` names the
active one ("compiled" or "python").
"""

import os

from sketch3d.kernels import _core_py

if os.environ.get("SKETCH3D_FORCE_PYTHON_KERNELS") == "1":
    _impl = _core_py
    backend = "python"
else:
    try:
        from sketch3d.kernels import _core as _impl
        backend = "compiled"
    except ImportError:
        _impl = _core_py
        backend = "python"

fast_scores = _impl.fast_scores
nms_peaks = _impl.nms_peaks
disc_moments = _impl.disc_moments
harris_moments = _impl.harris_moments
brief_bits = _impl.brief_bits
hamming_table = _impl.hamming_table
warp_bilinear_u8 = _impl.warp_bilinear_u8
resize_bilinear_u8 = _impl.resize_bilinear_u8
