import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from inkcount import synth
from inkcount.cube import HyperCube

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def band_constant_cube():
    """2x2x3 cube whose bands are constant 10, 20, 30."""
    data = np.empty((2, 2, 3), dtype=np.float32)
    data[:, :, :] = [10.0, 20.0, 30.0]
    return HyperCube(data, wavelengths=(500.0, 600.0, 700.0))


@pytest.fixture(scope="session")
def small_doc():
    """12 lines, 7 inks at reduced size (fast)."""
    return synth.generate(synth.SynthConfig(rows=240, cols=200, bands=40, noise=0.01, seed=3))
