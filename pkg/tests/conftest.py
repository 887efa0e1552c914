import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def rand_matrix(rng, m, n):
    return np.asfortranarray(rng.standard_normal((m, n)))


def low_rank(rng, m, n, r):
    return np.asfortranarray(rng.standard_normal((m, r)) @ rng.standard_normal((r, n)))
