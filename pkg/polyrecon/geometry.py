"""
Convex polytopes, simplices and the facet quantities derived from them.

A Polytope is given by its vertices and its facet incidence. Facet vertex
lists carry the orientation: for n=2 each facet is an edge [i, j] traversed
counterclockwise, for n=3 each facet lists its vertices counterclockwise as
seen from outside. For n >= 4 only simplicial facets are supported and the
order inside a facet is free. Orientation is verified, never recomputed, so a
malformed input fails at construction.
"""
import logging
from dataclasses import dataclass
from math import factorial
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import pdist

from polyrecon.constants import FACET_GENERIC_TOL, GEOMETRY_TOL, SIMPLEX_DET_TOL
from polyrecon.exceptions import ValidationError

logger = logging.getLogger(__name__)


def _frozen(array) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Facet:
    """Derived facet data: unit outward normal, area, anchor point p_F and vertex indices"""
    normal: np.ndarray
    area: float
    anchor: np.ndarray
    indices: Tuple[int, ...]


def _facet_frame(points: np.ndarray, dim: int) -> Tuple[np.ndarray, float]:
    """
    Normal and (n-1)-measure of a facet from its ordered vertices.

    For n <= 3 the normal direction follows the vertex order. For n >= 4 the
    facet must be a simplex and the returned normal has arbitrary sign.
    """
    if dim == 2:
        edge = points[1] - points[0]
        length = float(np.hypot(edge[0], edge[1]))
        if length == 0.0:
            return np.zeros(2), 0.0
        return np.array([edge[1], -edge[0]]) / length, length

    if dim == 3:
        # Newell: half the sum of consecutive cross products is the vector area
        vector_area = 0.5 * np.cross(points, np.roll(points, -1, axis=0)).sum(axis=0)
        area = float(np.linalg.norm(vector_area))
        if area == 0.0:
            return np.zeros(3), 0.0
        return vector_area / area, area

    if len(points) != dim:
        raise ValidationError(
            f"Only simplicial facets are supported for dim {dim}; got a facet with {len(points)} vertices"
        )
    edges = points[1:] - points[0]
    gram = edges @ edges.T
    area = float(np.sqrt(max(np.linalg.det(gram), 0.0))) / factorial(dim - 1)
    normal = np.linalg.svd(edges)[2][-1]
    return normal, area


class Simplex:
    """An n-simplex given by n+1 affinely independent vertices"""

    def __init__(self, vertices: Sequence[Sequence[float]]):
        verts = np.array(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] != verts.shape[1] + 1:
            raise ValidationError(
                f"A simplex in R^n needs exactly n+1 points; got array of shape {verts.shape}"
            )
        if not np.all(np.isfinite(verts)):
            raise ValidationError("Simplex vertices must be finite")

        self.dim = verts.shape[1]
        self.vertices = _frozen(verts)
        self.matrix = _frozen((verts[1:] - verts[0]).T)
        self.det = float(np.linalg.det(self.matrix))

        # relative to the longest edge so the check is scale-free
        scale = float(pdist(verts).max()) ** self.dim
        if abs(self.det) <= SIMPLEX_DET_TOL * scale:
            raise ValidationError(
                f"Simplex vertices are affinely dependent (|det T| = {abs(self.det):.3e}, scale {scale:.3e})"
            )

    def __repr__(self):
        return f"Simplex(dim={self.dim}, volume={self.volume:.6g})"

    @property
    def volume(self) -> float:
        return abs(self.det) / factorial(self.dim)

    def to_polytope(self) -> 'Polytope':
        """Facet incidence for the simplex, oriented outward"""
        n = self.dim
        verts = np.asarray(self.vertices)
        facets = []
        for k in range(n + 1):
            indices = [i for i in range(n + 1) if i != k]
            if n in (2, 3):
                normal, _ = _facet_frame(verts[indices], n)
                # the vertex opposite the facet must lie behind it
                if normal @ (verts[k] - verts[indices[0]]) > 0:
                    indices = indices[::-1]
            facets.append(indices)
        return Polytope(verts, facets, dim=n)

    def to_dict(self) -> Dict:
        return self.to_polytope().to_dict()


class Polytope:
    """A validated n-dimensional convex polytope"""

    def __init__(self, vertices: Sequence[Sequence[float]], facets: Sequence[Sequence[int]],
                 dim: int = None, tol: float = GEOMETRY_TOL):
        verts = np.array(vertices, dtype=float)
        if verts.ndim != 2:
            raise ValidationError(f"Vertices must be a list of points; got array of shape {verts.shape}")
        n = verts.shape[1] if dim is None else int(dim)
        if verts.shape[1] != n:
            raise ValidationError(f"Vertices have {verts.shape[1]} coordinates but dim is {n}")
        if n < 2:
            raise ValidationError(f"dim must be at least 2; got {n}")
        if not np.all(np.isfinite(verts)):
            raise ValidationError("Vertices must be finite")

        self.dim = n
        # planarity and support slack, relative to the diameter
        self.tol = max(float(tol), GEOMETRY_TOL)
        self.vertices = _frozen(verts)
        self.facets = tuple(tuple(int(i) for i in facet) for facet in facets)
        self.diameter = self._diameter()
        self.centroid = _frozen(verts.mean(axis=0))
        self._facet_data = self._validate()
        self._volume = sum(simplex.volume for simplex in triangulate(self))

        if self._volume <= GEOMETRY_TOL * self.diameter ** n:
            raise ValidationError(f"Polytope volume must be positive; got {self._volume:.3e}")

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.facets)})"

    @classmethod
    def polygon(cls, vertices: Sequence[Sequence[float]]) -> 'Polytope':
        """Polygon from a counterclockwise vertex list"""
        count = len(vertices)
        return cls(vertices, [[i, (i + 1) % count] for i in range(count)], dim=2)

    @classmethod
    def from_dict(cls, data: Dict) -> 'Polytope':
        """Create Polytope from its JSON dictionary"""
        try:
            return cls(data['vertices'], data['facets'], dim=data['dim'], tol=data.get('tol', GEOMETRY_TOL))
        except KeyError as e:
            raise ValidationError(f"Polytope JSON is missing field {e}") from e
        except TypeError as e:
            raise ValidationError(f"Polytope JSON is malformed: {e}") from e

    def to_dict(self) -> Dict:
        """Convert to dictionary"""
        data = {
            'dim': self.dim,
            'vertices': self.vertices.tolist(),
            'facets': [list(facet) for facet in self.facets],
        }
        if self.tol > GEOMETRY_TOL:
            data['tol'] = self.tol
        return data

    def translated(self, offset: Sequence[float]) -> 'Polytope':
        return Polytope(self.vertices + np.asarray(offset, dtype=float), self.facets, dim=self.dim, tol=self.tol)

    def reflected(self) -> 'Polytope':
        """The point reflection -P"""
        # -I flips orientation in odd dimensions
        facets = [facet[::-1] for facet in self.facets] if self.dim == 3 else self.facets
        return Polytope(-self.vertices, facets, dim=self.dim, tol=self.tol)

    def scaled(self, factor: float) -> 'Polytope':
        if factor <= 0:
            raise ValidationError(f"Scale factor must be positive; got {factor}")
        return Polytope(self.vertices * factor, self.facets, dim=self.dim, tol=self.tol)

    def _diameter(self) -> float:
        diffs = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((diffs ** 2).sum(axis=-1)).max())

    def _validate(self) -> List[Facet]:
        n = self.dim
        verts = np.asarray(self.vertices)
        count = len(verts)
        tol = self.tol * self.diameter

        if count < n + 1:
            raise ValidationError(f"A {n}-polytope needs at least {n + 1} vertices; got {count}")
        if len(self.facets) < n + 1:
            raise ValidationError(f"A {n}-polytope needs at least {n + 1} facets; got {len(self.facets)}")
        if self.diameter == 0.0:
            raise ValidationError("All vertices coincide")

        data = []
        for index, facet in enumerate(self.facets):
            if len(facet) < n or (n == 2 and len(facet) != 2):
                raise ValidationError(f"Facet {index} has {len(facet)} vertices; dim {n} needs at least {n}")
            if len(set(facet)) != len(facet):
                raise ValidationError(f"Facet {index} repeats a vertex")
            if min(facet) < 0 or max(facet) >= count:
                raise ValidationError(f"Facet {index} references a vertex outside 0..{count - 1}")

            points = verts[list(facet)]
            normal, area = _facet_frame(points, n)
            if area <= GEOMETRY_TOL * self.diameter ** (n - 1):
                raise ValidationError(f"Facet {index} is degenerate (zero area)")

            anchor = points[0]
            if np.abs((points - anchor) @ normal).max() > tol:
                raise ValidationError(f"Facet {index} vertices are not coplanar")

            if normal @ (self.centroid - anchor) > 0:
                if n <= 3:
                    orientation = 'counterclockwise' if n == 2 else 'counterclockwise as seen from outside'
                    raise ValidationError(f"Facet {index} is not ordered {orientation}")
                normal = -normal

            if ((verts - anchor) @ normal).max() > tol:
                raise ValidationError(f"Facet {index} does not support the polytope")

            data.append(Facet(normal=_frozen(normal), area=area, anchor=_frozen(anchor), indices=facet))

        # convex position: every vertex is pinned down by n facets with independent normals
        for vertex in range(count):
            normals = [facet.normal for facet in data if vertex in facet.indices]
            if len(normals) < n or np.linalg.matrix_rank(np.array(normals), tol=1e-9) < n:
                raise ValidationError(f"Vertex {vertex} is not a vertex of the polytope")

        if n == 2:
            starts = sorted(facet[0] for facet in self.facets)
            ends = sorted(facet[1] for facet in self.facets)
            if starts != list(range(count)) or ends != list(range(count)):
                raise ValidationError("Polygon edges do not form a single closed chain")

        return data


PolytopeLike = Union[Polytope, Simplex]


def _as_polytope(P: PolytopeLike) -> Polytope:
    return P.to_polytope() if isinstance(P, Simplex) else P


def facet_data(P: PolytopeLike) -> List[Facet]:
    """One Facet per stored facet: outward unit normal, (n-1)-measure, anchor p_F"""
    return list(_as_polytope(P)._facet_data)


def volume(P: PolytopeLike) -> float:
    if isinstance(P, Simplex):
        return P.volume
    return P._volume


def _polygon_cycle(P: Polytope) -> List[int]:
    following = dict(P.facets)
    cycle = [0]
    while len(cycle) < len(P.vertices):
        cycle.append(following[cycle[-1]])
    return cycle


def triangulate(P: PolytopeLike) -> List[Simplex]:
    """
    Split P into simplices meeting in common faces.

    A simplex comes back as itself. Polygons are fanned from vertex 0; higher
    dimensions cone every fanned facet to the vertex centroid.
    """
    if isinstance(P, Simplex):
        return [P]

    verts = np.asarray(P.vertices)
    n = P.dim
    if len(verts) == n + 1:
        return [Simplex(verts)]

    if n == 2:
        cycle = _polygon_cycle(P)
        return [Simplex(verts[[cycle[0], cycle[k], cycle[k + 1]]]) for k in range(1, len(cycle) - 1)]

    apex = verts.mean(axis=0)
    simplices = []
    for facet in P.facets:
        if n == 3:
            for k in range(1, len(facet) - 1):
                simplices.append(Simplex([apex, verts[facet[0]], verts[facet[k]], verts[facet[k + 1]]]))
        else:
            simplices.append(Simplex(np.vstack([apex, verts[list(facet)]])))
    return simplices


def is_facet_generic(P: PolytopeLike) -> bool:
    """True iff no two facets are parallel"""
    normals = np.array([facet.normal for facet in facet_data(P)])
    dots = np.abs(normals @ normals.T)
    np.fill_diagonal(dots, 0.0)
    return bool(dots.max() <= 1.0 - FACET_GENERIC_TOL)


def closure_residual(P: PolytopeLike) -> np.ndarray:
    """Sum of area-weighted outward normals; zero for every closed polytope"""
    return np.sum([facet.area * facet.normal for facet in facet_data(P)], axis=0)
