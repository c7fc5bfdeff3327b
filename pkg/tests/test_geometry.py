import math

import numpy as np
import pytest

from polyrecon.exceptions import ValidationError
from polyrecon.fixtures import ambiguous_hexagons, make_fixture, random_polygon, random_polytope_3d
from polyrecon.geometry import (
    Polytope,
    Simplex,
    closure_residual,
    facet_data,
    is_facet_generic,
    triangulate,
    volume,
)
from polyrecon.models import FacetIndicatorSet


def test_volumes_of_reference_shapes(triangle, square, cube, tetrahedron):
    assert volume(triangle) == pytest.approx(0.5)
    assert volume(square) == pytest.approx(1.0)
    assert volume(cube) == pytest.approx(1.0)
    assert volume(tetrahedron) == pytest.approx(1 / (6 * math.sqrt(2)))


def test_triangle_facet_data(triangle):
    facets = facet_data(triangle)
    np.testing.assert_allclose(facets[0].normal, [0, -1], atol=1e-15)
    np.testing.assert_allclose(facets[1].normal, [1 / math.sqrt(2), 1 / math.sqrt(2)])
    np.testing.assert_allclose(facets[2].normal, [-1, 0], atol=1e-15)
    assert [f.area for f in facets] == pytest.approx([1.0, math.sqrt(2), 1.0])


def test_cube_normals_point_outward(cube):
    for facet in facet_data(cube):
        assert facet.normal @ (np.asarray(facet.anchor) - cube.centroid) > 0
        assert facet.area == pytest.approx(1.0)


@pytest.mark.parametrize('name,seed', [
    ('triangle', 0), ('cube', 0), ('tetrahedron', 0), ('octahedron', 0), ('hexagon', 0),
    ('grid-tetrahedron', 0), ('grid-pyramid', 0), ('random-polygon', 3),
    ('random-polytope', 5), ('random-simplex-3d', 7), ('random-simplex-4d', 11),
])
def test_closure_holds_on_fixtures(name, seed):
    P = make_fixture(name, seed)
    total = sum(facet.area for facet in facet_data(P))
    assert np.linalg.norm(closure_residual(P)) <= 1e-9 * total


def test_clockwise_polygon_is_rejected():
    with pytest.raises(ValidationError, match='counterclockwise'):
        Polytope.polygon([[0, 0], [0, 1], [1, 0]])


def test_nonconvex_polygon_is_rejected():
    with pytest.raises(ValidationError):
        Polytope.polygon([[0, 0], [2, 0], [2, 2], [1, 0.5], [0, 2]])


def test_reversed_cube_facet_is_rejected(cube):
    facets = [list(f) for f in cube.facets]
    facets[0] = facets[0][::-1]
    with pytest.raises(ValidationError):
        Polytope(cube.vertices, facets, dim=3)


def test_too_few_vertices():
    with pytest.raises(ValidationError):
        Polytope([[0, 0], [1, 0]], [[0, 1], [1, 0]], dim=2)


def test_facet_index_out_of_range():
    with pytest.raises(ValidationError, match='outside'):
        Polytope([[0, 0], [1, 0], [0, 1]], [[0, 1], [1, 2], [2, 3]], dim=2)


def test_affinely_dependent_simplex():
    with pytest.raises(ValidationError):
        Simplex([[0, 0], [1, 1], [2, 2]])
    with pytest.raises(ValidationError):
        Simplex([[0, 0], [1e3, 0], [2e3, 1e-10]])


@pytest.mark.parametrize('factor', [1e-4, 1.0, 1e3])
def test_simplex_check_is_scale_free(factor, cube):
    corner = factor * np.vstack([np.zeros(3), np.eye(3)])
    assert Simplex(corner).volume == pytest.approx(factor ** 3 / 6)
    assert volume(cube.scaled(factor)) == pytest.approx(factor ** 3)
    assert len(triangulate(cube.scaled(factor))) == len(triangulate(cube))


def test_simplex_to_polytope_orients_facets(rng):
    for dim in (2, 3):
        vertices = rng.normal(size=(dim + 1, dim))
        S = Simplex(vertices)
        P = S.to_polytope()
        assert volume(P) == pytest.approx(S.volume)


def test_triangulation_preserves_volume(square, cube, octahedron):
    assert len(triangulate(square)) == 2
    for P in (square, cube, octahedron):
        assert sum(s.volume for s in triangulate(P)) == pytest.approx(volume(P))


def test_facet_genericity(triangle, cube, octahedron, hexagon):
    assert is_facet_generic(triangle)
    assert is_facet_generic(octahedron)
    assert is_facet_generic(hexagon)
    assert not is_facet_generic(cube)
    assert all(is_facet_generic(P) for P in ambiguous_hexagons())


def test_reflection_negates_normals(octahedron):
    reflected = octahedron.reflected()
    for original, mirrored in zip(facet_data(octahedron), facet_data(reflected)):
        np.testing.assert_allclose(mirrored.normal, -original.normal, atol=1e-12)
        assert mirrored.area == pytest.approx(original.area)
    assert volume(reflected) == pytest.approx(volume(octahedron))


def test_translation_keeps_facets(triangle):
    moved = triangle.translated([3.0, -2.0])
    for a, b in zip(facet_data(triangle), facet_data(moved)):
        np.testing.assert_allclose(a.normal, b.normal)
        assert a.area == pytest.approx(b.area)


def test_scaling(cube):
    assert volume(cube.scaled(2.0)) == pytest.approx(8.0)
    with pytest.raises(ValidationError):
        cube.scaled(0.0)


def test_dict_round_trip(cube):
    restored = Polytope.from_dict(cube.to_dict())
    np.testing.assert_array_equal(restored.vertices, cube.vertices)
    assert restored.facets == cube.facets


def test_from_dict_missing_field():
    with pytest.raises(ValidationError, match='missing'):
        Polytope.from_dict({'dim': 2, 'vertices': [[0, 0], [1, 0], [0, 1]]})


def test_random_generators_are_generic(rng):
    assert is_facet_generic(random_polygon(7, rng))
    P = random_polytope_3d(8, rng)
    assert len(P.vertices) == 8
    assert is_facet_generic(P)


def test_random_polytopes_are_valid_indicator_sources():
    rng = np.random.default_rng(20240611)
    for _ in range(40):
        P = random_polytope_3d(int(rng.integers(5, 9)), rng)
        assert FacetIndicatorSet.from_polytope(P).f == len(P.facets)
