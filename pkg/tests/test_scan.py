import math

import numpy as np
import pytest

from polyrecon.constants import EWALD_MIN_POLAR
from polyrecon.detect import DetectionConfig, detect, smooth
from polyrecon.exceptions import ValidationError
from polyrecon.fourier import phi
from polyrecon.geometry import facet_data
from polyrecon.scan import (
    WRAP_FLIP,
    WRAP_NONE,
    WRAP_PERIODIC,
    Grid,
    Pattern,
    ScanSurface,
    fold,
    sigma,
    simulate_pattern,
)


def test_surface_aliases_and_defaults():
    assert ScanSurface('semicircle').kind == 'semicircle2d'
    assert ScanSurface.for_dim(3).kind == 'hemisphere3d'
    assert ScanSurface('ewald').wraps == (WRAP_NONE, WRAP_PERIODIC)
    assert ScanSurface('hemisphere').wraps == (WRAP_PERIODIC, WRAP_FLIP)
    with pytest.raises(ValidationError):
        ScanSurface('cylinder')
    with pytest.raises(ValidationError):
        ScanSurface.for_dim(4)


def test_semicircle_and_hemisphere_points():
    np.testing.assert_allclose(sigma(ScanSurface('semicircle'), [0.0]), [1, 0])
    np.testing.assert_allclose(sigma(ScanSurface('semicircle'), [math.pi / 2]), [0, 1], atol=1e-16)
    np.testing.assert_allclose(sigma(ScanSurface('hemisphere'), [0.0, 0.0]), [0, 0, 1])
    np.testing.assert_allclose(sigma(ScanSurface('hemisphere'), [math.pi / 2, 0.0]), [1, 0, 0], atol=1e-16)


def test_ewald_points_and_axis():
    t = [math.pi / 2, 0.0]
    np.testing.assert_allclose(sigma(ScanSurface('ewald', radius=2.0), t), [2, 0, 2], atol=1e-15)
    np.testing.assert_allclose(sigma(ScanSurface('ewald', axis=0), t), [1, 1, 0], atol=1e-15)


def test_sigma_rejects_points_outside_domain():
    with pytest.raises(ValidationError):
        sigma(ScanSurface('semicircle'), [4.0])
    with pytest.raises(ValidationError):
        sigma(ScanSurface('ewald'), [0.0, 1.0])


@pytest.mark.parametrize('kind', ['semicircle', 'hemisphere', 'ewald'])
def test_fold_inverts_sigma(kind, rng):
    surface = ScanSurface(kind, radius=1.5)
    (lo1, hi1), *rest = surface.domain
    for _ in range(20):
        t = [rng.uniform(max(lo1, 0.05), hi1 - 0.05)] + [rng.uniform(lo, hi) for lo, hi in rest]
        s = sigma(surface, t)
        np.testing.assert_allclose(fold(surface, s), t, atol=1e-10)
        np.testing.assert_allclose(fold(surface, -3.0 * s), t, atol=1e-10)


def test_every_direction_is_folded_onto_the_hemisphere(rng):
    surface = ScanSurface('hemisphere')
    for _ in range(50):
        d = rng.normal(size=3)
        image = sigma(surface, fold(surface, d))
        assert abs(abs(image @ d) / np.linalg.norm(d) - 1.0) < 1e-12


def test_ewald_fold_rejects_tangent_and_cap_directions():
    surface = ScanSurface('ewald')
    with pytest.raises(ValidationError, match='tangent'):
        fold(surface, [1.0, 0.0, 0.0])
    with pytest.raises(ValidationError, match='cap'):
        fold(surface, [1.0, 0.0, 0.25 * EWALD_MIN_POLAR])


def test_grid_layout():
    grid = Grid.for_surface(ScanSurface('semicircle'), [512])
    assert grid.size == 512
    assert grid.spacing() == (pytest.approx(math.pi / 512),)
    assert grid.axes()[0][-1] == pytest.approx(math.pi - math.pi / 512)

    grid = Grid.for_surface(ScanSurface('hemisphere'), [4])
    assert grid.shape == (4, 4)
    np.testing.assert_allclose(grid.points()[1], [0.0, math.pi / 4])
    assert grid.covers(ScanSurface('hemisphere')) == (True, True)


def test_grid_validation():
    with pytest.raises(ValidationError):
        Grid([1], [(0.0, 1.0)])
    with pytest.raises(ValidationError):
        Grid([8], [(1.0, 0.0)])
    assert Grid([8], [(0.0, 1.0)]).covers(ScanSurface('semicircle')) == (False,)
    with pytest.raises(ValidationError):
        Grid([8], [(0.0, 4.0)]).check_within(ScanSurface('semicircle'))


def test_psi_is_rescaled_modulus(triangle):
    surface = ScanSurface('ewald', radius=2.0)
    with pytest.raises(ValidationError):
        simulate_pattern(triangle, surface, lam=0.01)

    surface = ScanSurface('semicircle', radius=2.0)
    pattern = simulate_pattern(triangle, surface, Grid.for_surface(surface, [32]), lam=0.05)
    np.testing.assert_array_equal(pattern.psi, pattern.sigma_norm * pattern.abs_phi / 0.05)
    assert pattern.is_consistent()
    np.testing.assert_allclose(pattern.sigma_norm, 2.0)


def test_pattern_matches_pointwise_transform(triangle):
    surface = ScanSurface('semicircle')
    grid = Grid.for_surface(surface, [16])
    pattern = simulate_pattern(triangle, surface, grid, lam=0.02)
    for t, value in zip(grid.points(), pattern.abs_phi.ravel()):
        assert value == pytest.approx(abs(phi(triangle, sigma(surface, t), 0.02)), rel=1e-12, abs=1e-15)


def test_simulation_does_not_depend_on_workers(octahedron):
    surface = ScanSurface('hemisphere')
    grid = Grid.for_surface(surface, [24])
    single = simulate_pattern(octahedron, surface, grid, lam=0.02, workers=1, chunk=50)
    pooled = simulate_pattern(octahedron, surface, grid, lam=0.02, workers=3, chunk=50)
    np.testing.assert_array_equal(single.abs_phi, pooled.abs_phi)


@pytest.mark.parametrize('lam', [0.0, -0.1, 1.5])
def test_wavelength_domain(triangle, lam):
    with pytest.raises(ValidationError):
        simulate_pattern(triangle, ScanSurface('semicircle'), lam=lam)


def test_psi_peaks_approach_edge_lengths(hexagon_pattern):
    P, pattern = hexagon_pattern
    surface = pattern.surface
    psi = pattern.psi.ravel()
    spacing = pattern.grid.spacing()[0]
    for facet in facet_data(P):
        index = int(round(fold(surface, facet.normal)[0] / spacing)) % pattern.grid.counts[0]
        assert psi[index] == pytest.approx(facet.area, rel=0.05)


def test_negative_modulus_rejected():
    surface = ScanSurface('semicircle')
    grid = Grid.for_surface(surface, [8])
    with pytest.raises(ValidationError):
        Pattern(surface, grid, 0.01, -np.ones(8))


@pytest.mark.parametrize('kind,count', [('semicircle', 64), ('hemisphere', 12)])
def test_pattern_ignores_reflection_and_antipodes(kind, count, triangle, octahedron):
    P = triangle if kind == 'semicircle' else octahedron
    surface = ScanSurface(kind)
    grid = Grid.for_surface(surface, [count])
    pattern = simulate_pattern(P, surface, grid, lam=0.02)
    mirrored = simulate_pattern(P.reflected(), surface, grid, lam=0.02)
    np.testing.assert_allclose(mirrored.abs_phi, pattern.abs_phi, rtol=1e-9, atol=1e-14)

    for t in grid.points()[::7]:
        s = sigma(surface, t)
        assert abs(phi(P, -s, 0.02)) == pytest.approx(abs(phi(P, s, 0.02)), rel=1e-9, abs=1e-14)


def test_two_by_two_grid_is_a_valid_pattern(octahedron):
    surface = ScanSurface('hemisphere')
    grid = Grid.for_surface(surface, [2])
    pattern = simulate_pattern(octahedron, surface, grid, lam=0.05)
    assert pattern.psi.shape == (2, 2)
    assert grid.size == 4
    assert np.all(np.isfinite(pattern.psi))
    assert pattern.is_consistent()

    with pytest.raises(ValidationError):
        smooth(pattern, 5)
    indicators = detect(pattern, DetectionConfig(window=1))
    assert indicators.f >= 1
    directions = sigma(surface, grid.points())
    for entry in indicators:
        assert np.max(np.abs(directions @ entry.normal)) == pytest.approx(1.0, abs=1e-12)
