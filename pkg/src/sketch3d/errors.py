"""Exception hierarchy shared by all pipeline stages.

Every error that the CLI maps to an exit code lives here so that the
mapping stays in one place (see :mod:`sketch3d.cli`).
"""


class Sketch3DError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(Sketch3DError):
    """A caller-supplied parameter violates an operation's contract."""


class InsufficientDataError(Sketch3DError):
    """Too few inputs for the requested estimate (points, pairs, files)."""


class DegenerateGeometryError(Sketch3DError):
    """Point configuration or matrix is rank-deficient / non-invertible."""


class PointAtInfinityError(Sketch3DError):
    """A projective map sent a finite point to the plane at infinity."""


class NoConsensusError(Sketch3DError):
    """Robust estimation could not assemble a large enough inlier set."""

    def __init__(self, message, best_inliers=0):
        super().__init__(message)
        self.best_inliers = best_inliers


class StitchFailureError(Sketch3DError):
    """Stitching aborted; carries the match diagnostics of the failed stage.

    ``step`` is the 1-based index of the failed pair when stitching a
    sequence, or None for a single pair.
    """

    def __init__(self, message, stage1_matches=0, stage2_matches=None, step=None):
        super().__init__(message)
        self.stage1_matches = stage1_matches
        self.stage2_matches = stage2_matches
        self.step = step


class DegenerateDepthError(Sketch3DError):
    """Depth map is constant; no relief can be normalized out of it."""


class AdapterFailureError(Sketch3DError):
    """External adapter process failed; ``reason`` is a stable identifier.

    Reasons: "timeout", "nonzero-exit", "missing-output", "invalid-output",
    "not-runnable".
    """

    def __init__(self, message, reason, detail=""):
        super().__init__(message)
        self.reason = reason
        self.detail = detail
