import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from consensus_seminorms import _backend
from consensus_seminorms.certify import counterexample_matrix


@pytest.fixture(params=sorted(_backend.available_backends()))
def kernel_backend(request):
    """Run a test under every available kernel backend."""
    prev = _backend.current_backend()
    _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def counterexample_s():
    return counterexample_matrix()
