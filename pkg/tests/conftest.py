import numpy as np
import pytest

from sketch3d.evalharness import make_synthetic_sketch
from sketch3d.image import Image


@pytest.fixture(scope="session")
def line_sketch():
    """One 512x384 synthetic line drawing shared by stitching tests."""
    return make_synthetic_sketch(512, 384, seed=42)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noise_image(rng):
    return Image(rng.integers(0, 256, size=(64, 64), dtype=np.uint8))
