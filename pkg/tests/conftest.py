import pytest

from sdwbound.asymptotics import eps0
from sdwbound.config import RunConfig
from sdwbound.params import deformation


@pytest.fixture
def config():
    return RunConfig()


@pytest.fixture
def coarse_config():
    """Faster settings for tests that only need qualitative answers"""
    return RunConfig().with_overrides({'grid.points_per_decade': 16, 'solver.tol': 1e-9})


@pytest.fixture
def near_optimum():
    """r_s = 3 at the asymptotic optimal deformation"""
    return deformation(3.0, eps0(3.0, 0.5), 0.5)
