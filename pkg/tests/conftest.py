import numpy as np
import pytest

from polyrecon import fixtures
from polyrecon.scan import Grid, ScanSurface, simulate_pattern


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def triangle():
    return fixtures.unit_triangle()


@pytest.fixture
def square():
    return fixtures.unit_square()


@pytest.fixture
def cube():
    return fixtures.unit_cube()


@pytest.fixture
def tetrahedron():
    return fixtures.regular_tetrahedron()


@pytest.fixture
def octahedron():
    return fixtures.deformed_octahedron()


@pytest.fixture
def hexagon():
    return fixtures.grid_hexagon()


def _pattern(P, count):
    surface = ScanSurface.for_dim(P.dim)
    return simulate_pattern(P, surface, Grid.for_surface(surface, [count]), lam=0.01)


@pytest.fixture(scope='session')
def hexagon_pattern():
    P = fixtures.grid_hexagon()
    return P, _pattern(P, 512)


@pytest.fixture(scope='session')
def triangle_pattern():
    P = fixtures.unit_triangle()
    return P, _pattern(P, 512)


@pytest.fixture(scope='session')
def tetrahedron_pattern():
    P = fixtures.grid_tetrahedron()
    return P, _pattern(P, 256)


@pytest.fixture(scope='session')
def pyramid_pattern():
    P = fixtures.grid_pyramid()
    return P, _pattern(P, 512)
