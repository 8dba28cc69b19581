import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from swarmpart.environment import Environment


@pytest.fixture
def unit_square():
    return Environment.unit_box(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
