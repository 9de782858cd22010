import numpy as np
import pytest

from spiralflow.forcing import Forcing
from spiralflow.geometry import DomainSpec, Hole, build_grid
from spiralflow.theta import SpiralCenter, ThetaField


@pytest.fixture(scope="session")
def annulus_domain():
    return DomainSpec(2.0, (Hole((0.0, 0.0), 0.5, 1),))


@pytest.fixture(scope="session")
def annulus_grid(annulus_domain):
    return build_grid(annulus_domain, 0.05)


@pytest.fixture(scope="session")
def annulus_theta(annulus_grid):
    return ThetaField(annulus_grid, (SpiralCenter(0.0, 0.0, 1),))


@pytest.fixture(scope="session")
def pair_domain():
    return DomainSpec(3.0, (Hole((-0.8, 0.0), 0.3, 1), Hole((0.8, 0.0), 0.3, -1)))


@pytest.fixture()
def constant_forcing():
    return Forcing.constant(3.0)


def angular_profile(grid, amplitude=0.3):
    """amp * x1/|x|, the standard compatible initial surface."""
    xs, ys = grid.node_mesh()
    rho = np.maximum(np.hypot(xs, ys), 1e-12)
    return amplitude * xs / rho
