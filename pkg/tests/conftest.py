import numpy as np
import pytest
from hypothesis import settings

from vpmcf.profile import GridSpec, RadialProfile

# Property tests draw from a fixed seed so reruns are reproducible.
settings.register_profile("repro", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repro")


@pytest.fixture
def cosine_profile():
    """rho = 2 + cos(2 pi x) on [0, 1], n = 2, N = 512."""
    grid = GridSpec(0.0, 1.0, 512, 2)
    return RadialProfile.from_function(grid, lambda x: 2.0 + np.cos(2 * np.pi * x))
