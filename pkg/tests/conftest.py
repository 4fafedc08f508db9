from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from arraydir.array_model import read_array

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

REPO = Path(__file__).resolve().parents[1]
REFERENCE_ARRAY = REPO / "data" / "reference_array.json"
STEERING_DEG = (101.44, 267.75)


@pytest.fixture(scope="session")
def ref_array():
    return read_array(REFERENCE_ARRAY)


@pytest.fixture
def rng():
    return np.random.default_rng(20181105)
