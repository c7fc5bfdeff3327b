"""
Named and seeded random polytopes for experiments and tests
"""
import math
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.spatial import ConvexHull

from polyrecon.constants import DEFAULT_GRID_2D, DEFAULT_GRID_3D
from polyrecon.exceptions import ValidationError
from polyrecon.geometry import Polytope, Simplex, is_facet_generic
from polyrecon.reconstruct import HalfspaceSystem, halfspaces_to_vertices


def unit_triangle() -> Polytope:
    return Polytope.polygon([[0, 0], [1, 0], [0, 1]])


def unit_square() -> Polytope:
    return Polytope.polygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def unit_cube() -> Polytope:
    vertices = [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    facets = [
        [0, 1, 3, 2],  # x = 0
        [4, 6, 7, 5],  # x = 1
        [0, 4, 5, 1],  # y = 0
        [2, 3, 7, 6],  # y = 1
        [0, 2, 6, 4],  # z = 0
        [1, 5, 7, 3],  # z = 1
    ]
    return Polytope(vertices, facets, dim=3)


def regular_tetrahedron(edge: float = 1.0) -> Polytope:
    corners = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return Simplex(corners * edge / (2 * math.sqrt(2))).to_polytope()


def deformed_octahedron(shift=(0.1, 0.0, 0.0)) -> Polytope:
    """Octahedron with its top vertex moved so that no two facets are parallel"""
    top = np.array([0.0, 0.0, 1.0]) + np.asarray(shift, dtype=float)
    vertices = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], top, [0, 0, -1]]
    facets = [
        [4, 0, 2], [4, 2, 1], [4, 1, 3], [4, 3, 0],
        [5, 2, 0], [5, 1, 2], [5, 3, 1], [5, 0, 3],
    ]
    return Polytope(vertices, facets, dim=3)


def _chain_polygon(angles: np.ndarray, lengths: np.ndarray) -> Polytope:
    """Polygon whose edge k has outward normal angle angles[k] and length lengths[k]"""
    order = np.argsort(angles)
    edges = lengths[order, None] * np.stack([-np.sin(angles[order]), np.cos(angles[order])], axis=1)
    vertices = np.vstack([np.zeros(2), np.cumsum(edges, axis=0)[:-1]])
    return Polytope.polygon(vertices - vertices.mean(axis=0))


def grid_hexagon(cells: int = 2 * DEFAULT_GRID_2D) -> Polytope:
    """
    Facet-generic hexagon whose edge normals fall on semicircle grid points.

    The normals are close to two interleaved equilateral triangles; the
    last two edge lengths are solved so the boundary closes.
    """
    steps = np.array([0, 256, 341, 597, 683, 939]) * (cells // 1024)
    angles = steps * (2 * math.pi / cells)
    lengths = np.array([2.5, 2.2, 2.5, 2.2, 0.0, 0.0])
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    fixed = lengths[:4] @ directions[:4]
    lengths[4:] = np.linalg.solve(directions[4:].T, -fixed)
    if np.any(lengths <= 0):
        raise ValidationError("Grid hexagon does not close with positive edge lengths")
    return _chain_polygon(angles, lengths)


def ambiguous_hexagons(a: float = 1.0, b: float = 0.8) -> Tuple[Polytope, Polytope]:
    """
    Two different hexagons with the same unsigned normals and edge lengths.

    Each is the union of the edge sets of two equilateral triangles; flipping
    every normal of the second triangle keeps the boundary closed.
    """
    first = np.radians([0, 120, 240])
    second = np.radians([90, 210, 330])
    lengths = np.array([a] * 3 + [b] * 3)
    one = _chain_polygon(np.concatenate([first, second]), lengths)
    other = _chain_polygon(np.concatenate([first, np.mod(second + math.pi, 2 * math.pi)]), lengths)
    return one, other


def _grid_direction(i: int, j: int, cells: int) -> np.ndarray:
    """Hemisphere direction at grid cell (i, j) of a 256-based grid rescaled to `cells`"""
    step = math.pi / cells
    scale = cells // 256
    t1, t2 = i * scale * step, j * scale * step
    return np.array([math.sin(t1) * math.cos(t2), math.sin(t1) * math.sin(t2), math.cos(t1)])


def grid_tetrahedron(support: float = 0.2, cells: int = DEFAULT_GRID_3D) -> Polytope:
    """Tetrahedron whose facet normals lie (up to sign) on hemisphere grid points"""
    cells_at = [(78, 64, 1), (78, 192, -1), (178, 192, 1), (178, 64, -1)]
    normals = np.array([sign * _grid_direction(i, j, cells) for i, j, sign in cells_at])
    return halfspaces_to_vertices(HalfspaceSystem.from_support(normals, np.full(4, support)))


def grid_pyramid(support: float = 0.6, cells: int = 2 * DEFAULT_GRID_3D) -> Polytope:
    """
    Square pyramid whose facet normals lie (up to sign) on hemisphere grid points.

    The axis points along +y, the base faces -y and the sides rise about 30
    degrees above the base plane. No two facets are close to antipodal, so
    every facet folds onto its own scan cell.
    """
    cells_at = [(128, 128, -1), (128, 43, 1), (43, 128, 1), (128, 213, 1), (213, 128, 1)]
    normals = np.array([sign * _grid_direction(i, j, cells) for i, j, sign in cells_at])
    return halfspaces_to_vertices(HalfspaceSystem.from_support(normals, np.full(len(normals), support)))


def random_simplex(dim: int, rng: np.random.Generator) -> Simplex:
    while True:
        vertices = rng.normal(size=(dim + 1, dim))
        if abs(np.linalg.det((vertices[1:] - vertices[0]).T)) > 1e-2:
            return Simplex(vertices)


def random_polygon(count: int, rng: np.random.Generator, generic: bool = True) -> Polytope:
    """Convex polygon with `count` vertices on a jittered circle"""
    while True:
        angles = np.sort(rng.uniform(0, 2 * math.pi, count))
        radii = rng.uniform(0.8, 1.2)
        points = radii * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        hull = ConvexHull(points)
        if len(hull.vertices) != count:
            continue
        # 2D hulls list their vertices counterclockwise
        polygon = Polytope.polygon(points[hull.vertices])
        if not generic or is_facet_generic(polygon):
            return polygon


def random_polytope_3d(count: int, rng: np.random.Generator, generic: bool = True) -> Polytope:
    """Simplicial 3D polytope with `count` random vertices on the unit sphere"""
    while True:
        points = rng.normal(size=(count, 3))
        points /= np.linalg.norm(points, axis=1, keepdims=True)
        hull = ConvexHull(points)
        if len(hull.vertices) != count:
            continue
        facets = []
        for simplex, equation in zip(hull.simplices, hull.equations):
            a, b, c = points[simplex]
            if np.cross(b - a, c - a) @ equation[:3] < 0:
                simplex = simplex[::-1]
            facets.append([int(k) for k in simplex])
        polytope = Polytope(points, facets, dim=3)
        if not generic or is_facet_generic(polytope):
            return polytope


FIXTURES: Dict[str, Callable[[np.random.Generator], object]] = {
    'triangle': lambda rng: unit_triangle(),
    'square': lambda rng: unit_square(),
    'cube': lambda rng: unit_cube(),
    'tetrahedron': lambda rng: regular_tetrahedron(),
    'grid-tetrahedron': lambda rng: grid_tetrahedron(),
    'octahedron': lambda rng: deformed_octahedron(),
    'grid-pyramid': lambda rng: grid_pyramid(),
    'hexagon': lambda rng: grid_hexagon(),
    'ambiguous-hexagon-a': lambda rng: ambiguous_hexagons()[0],
    'ambiguous-hexagon-b': lambda rng: ambiguous_hexagons()[1],
    'random-simplex-2d': lambda rng: random_simplex(2, rng).to_polytope(),
    'random-simplex-3d': lambda rng: random_simplex(3, rng).to_polytope(),
    'random-simplex-4d': lambda rng: random_simplex(4, rng).to_polytope(),
    'random-polygon': lambda rng: random_polygon(int(rng.integers(5, 9)), rng),
    'random-polytope': lambda rng: random_polytope_3d(int(rng.integers(6, 10)), rng),
}


def make_fixture(name: str, seed: int = 0):
    """Build a named fixture; random fixtures are reproducible from the seed"""
    if name not in FIXTURES:
        raise ValidationError(f"Unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
    return FIXTURES[name](np.random.default_rng(seed))
