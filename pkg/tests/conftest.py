import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from xyzgaudin.elliptic import ModulusContext


@pytest.fixture(scope="session")
def ctx_i():
    return ModulusContext(1j)


@pytest.fixture(scope="session")
def ctx_08():
    return ModulusContext(0.8j)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
