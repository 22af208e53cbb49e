import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lambdaseg import ImageGrid


@pytest.fixture
def corner_image():
    """The 2x2 worked example: three 10s and one 200."""
    return ImageGrid.from_array([[10, 10], [10, 200]])


@pytest.fixture
def constant_image():
    return ImageGrid.from_array(np.full((4, 4), 7))


@pytest.fixture
def tri_image():
    """1x3 image with three distinct values."""
    return ImageGrid.from_array([[0, 128, 255]])
