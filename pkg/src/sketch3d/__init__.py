"""sketch3d: stitch multi-view sketches, synthesize pencil drawings,
and turn depth maps into textured meshes.

The heavy per-pixel kernels live in a compiled extension with a pure
numpy fallback; ``sketch3d.kernels.backend`` reports which one loaded.
"""

__version__ = "0.1.0"

from sketch3d.errors import (
    AdapterFailureError,
    DegenerateDepthError,
    DegenerateGeometryError,
    InsufficientDataError,
    InvalidParameterError,
    NoConsensusError,
    PointAtInfinityError,
    Sketch3DError,
    StitchFailureError,
)
from sketch3d.image import FloatImage, Image, crop, gaussian_blur, invert, resize, to_grayscale
from sketch3d.sketch import SketchParams, dodge, sketchify, stylize
from sketch3d.features import Descriptor, Keypoint, Match, detect_and_describe, match_features
from sketch3d.geometry import (
    Homography,
    PointPair,
    RansacConfig,
    apply_homography,
    dlt,
    mean_translation,
    ransac_homography,
    warp_image,
)
from sketch3d.stitch import StitchResult, stitch_many, stitch_pair
from sketch3d.mesh import DepthMap, TexturedMesh, depth_to_mesh, export_obj, normalize_depth, parse_obj
from sketch3d.dataset import DatasetManifest, build_dataset, crop_fraction
from sketch3d.evalharness import MatchReport, ToyPair, evaluate_stitch, make_synthetic_sketch, make_toy_pair, sweep
from sketch3d.pipeline import AdapterSpec, PipelineConfig, conformance_report, invoke_adapter, run_pipeline
