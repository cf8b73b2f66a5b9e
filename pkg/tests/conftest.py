import numpy as np
import pytest

from src.models.coherence import CoherenceModel, coherence_frameworks, coherence_grid
from src.models.lifetime import lifetime_frameworks, lifetime_grid
from src.numerics.quadrature import linear_grid, log_grid, logit_grid


@pytest.fixture
def unit_grid():
    return linear_grid(0.0, 1.0, 201)


@pytest.fixture
def scale_grid():
    return log_grid(0.1, 10.0, 257)


@pytest.fixture
def weight_grid():
    return logit_grid(1e-3, 1 - 1e-3, 257)


@pytest.fixture
def generator():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def coherence_setup():
    grid = coherence_grid(0.95, 513)
    return CoherenceModel(0.1), coherence_frameworks(grid, 0.1)


@pytest.fixture(scope="session")
def lifetime_setup():
    grid = lifetime_grid(10.0, 1.0, 1025)
    return grid, lifetime_frameworks(grid, 1.0)


@pytest.fixture
def tiny_coherence_config():
    return {
        "case": "coherence",
        "framework": "both",
        "prior_width": 0.95,
        "true_zeta": 0.72,
        "shots": 5,
        "repetitions": 3,
        "grid_nodes": 129,
        "seed": 11,
    }
