import numpy as np
import pytest

from rslab.elliptic import EllipticParams
from rslab.rmatrix import ModelParams


@pytest.fixture
def ep_i() -> EllipticParams:
    return EllipticParams(tau=1j)


@pytest.fixture
def ep_08() -> EllipticParams:
    return EllipticParams(tau=0.8j)


@pytest.fixture
def params_m2() -> ModelParams:
    return ModelParams(M=2, N=3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240)
