import os

import numpy as np
import pytest

# Keep test output quiet and never pick up a developer's config file.
os.environ.setdefault("LOG_LEVEL", "WARNING")
os.environ.pop("GMCS_CONFIG", None)

from src.schemas.system_params import SystemParams


@pytest.fixture
def params() -> SystemParams:
    """Reference operating point."""
    return SystemParams()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def small_params() -> SystemParams:
    """Short pattern and record for fast end-to-end runs."""
    return SystemParams(pattern_period=256, n_symbols=4096, block_slots=1024, seed=7)
