"""Neural adapters for the sketch3d pipeline.

Two console scripts implement the pipeline's process-and-file adapter
protocol with real PyTorch models behind them: a sketch-to-image
generator and a single-image relative-depth estimator.
"""

__version__ = "0.1.0"

from sketch3d_adapters.checkpoints import CheckpointError, CheckpointRef, init_checkpoint
from sketch3d_adapters.models import HourglassDepthNet, ResnetGenerator, build_model
