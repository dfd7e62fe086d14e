import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from contourflow import contour_flow, signed_distance, synthesize


@pytest.fixture(scope="session")
def disk_mask():
    _, gt = synthesize("disk", 128, radius=30)
    return gt


@pytest.fixture(scope="session")
def disk_phi(disk_mask):
    return signed_distance(disk_mask)


@pytest.fixture(scope="session")
def disk_flow(disk_phi):
    return contour_flow(disk_phi)


@pytest.fixture(scope="session")
def letter_c_mask():
    _, gt = synthesize("letter_c", 128)
    return gt


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
