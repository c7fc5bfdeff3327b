"""
Reconstruction of convex polytopes from facet-indicator sets.

Simplices are recovered in closed form from their unsigned normals and areas.
Otherwise the normal signs are resolved by the closure condition
sum_j eps_j A_j n_j = 0, and the signed set (an extended Gaussian image) is
turned into a polygon by chaining its rotated vectors, or into a 3D polytope
by fitting support parameters until the facet areas match.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from math import factorial
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linprog
from scipy.spatial.distance import pdist

from polyrecon.constants import (
    CLOSURE_TOL,
    DETECTED_SIGN_TOL,
    FACET_GENERIC_TOL,
    FIT_MAX_SWEEPS,
    FIT_MERGE_TOL,
    FIT_MIN_STEP,
    FIT_POLISH_STEPS,
    FIT_TOL,
    GEOMETRY_TOL,
    MAX_SIGN_FACETS,
    SIGN_CHUNK,
    SIMPLEX_DET_TOL,
)
from polyrecon.exceptions import (
    ClosureError,
    EmptyRegionError,
    InconsistentIndicatorError,
    MinkowskiInfeasibleError,
    ReconstructionError,
    SingularInputError,
    UnboundedRegionError,
    ValidationError,
)
from polyrecon.geometry import Polytope, PolytopeLike, Simplex, facet_data
from polyrecon.models import FacetIndicatorSet
from polyrecon.utils import area_residual

logger = logging.getLogger(__name__)

LEQ = '<='
GEQ = '>='

# coordinate descent hands over to the Gauss-Newton polish below this objective
_COARSE_OBJECTIVE = 1e-6


class EGI:
    """Extended Gaussian image: area-weighted outward normals m_j = A_j n_j"""

    def __init__(self, vectors, tol_closure: float = CLOSURE_TOL, check: bool = True):
        m = np.array(vectors, dtype=float)
        if m.ndim != 2 or len(m) == 0:
            raise ValidationError(f"EGI needs a list of vectors; got array of shape {m.shape}")
        lengths = np.linalg.norm(m, axis=1)
        if not np.all(np.isfinite(m)) or np.any(lengths == 0):
            raise ValidationError("EGI vectors must be finite and nonzero")
        m.setflags(write=False)

        self.dim = m.shape[1]
        self.vectors = m
        self.tol_closure = tol_closure

        if np.linalg.matrix_rank(m) < self.dim:
            raise SingularInputError(f"EGI vectors do not span R^{self.dim}")
        if check and self.relative_residual > tol_closure:
            raise ClosureError(
                f"EGI does not close: |sum m_j| / sum |m_j| = {self.relative_residual:.3e} > {tol_closure:g}",
                residual=self.relative_residual,
            )

    def __repr__(self):
        return f"EGI(dim={self.dim}, f={self.f}, residual={self.relative_residual:.3e})"

    @property
    def f(self) -> int:
        return len(self.vectors)

    @property
    def areas(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    @property
    def normals(self) -> np.ndarray:
        return self.vectors / self.areas[:, None]

    @property
    def residual(self) -> np.ndarray:
        return self.vectors.sum(axis=0)

    @property
    def relative_residual(self) -> float:
        return float(np.linalg.norm(self.residual) / self.areas.sum())

    @classmethod
    def from_polytope(cls, P: PolytopeLike) -> 'EGI':
        return cls([facet.area * facet.normal for facet in facet_data(P)])

    @classmethod
    def from_indicators(cls, indicators: FacetIndicatorSet, signs: Sequence[int],
                        tol_closure: float = CLOSURE_TOL, check: bool = True) -> 'EGI':
        signs = np.asarray(signs, dtype=float)
        if signs.shape != (indicators.f,):
            raise ValidationError(f"Need {indicators.f} signs; got {len(signs)}")
        vectors = signs[:, None] * indicators.areas[:, None] * indicators.normals
        return cls(vectors, tol_closure=tol_closure, check=check)

    def closed(self) -> 'EGI':
        """
        Same normals with the smallest area change that makes the vectors sum to zero.
        """
        normals = self.normals
        correction = np.linalg.lstsq(normals.T, -self.residual, rcond=None)[0]
        areas = self.areas + correction
        if np.any(areas <= 0):
            raise ClosureError("Closing the EGI would make an area non-positive", residual=self.relative_residual)
        return EGI(areas[:, None] * normals, tol_closure=self.tol_closure)


@dataclass(frozen=True)
class SignAssignment:
    """Normal signs eps_j with eps_1 = +1 and the relative closure residual they leave"""
    signs: Tuple[int, ...]
    residual: float = 0.0

    def __post_init__(self):
        if not self.signs or self.signs[0] != 1:
            raise ValidationError("The first sign of an assignment is fixed to +1")
        if any(sign not in (1, -1) for sign in self.signs):
            raise ValidationError("Signs must be +1 or -1")

    def egi(self, indicators: FacetIndicatorSet, tol_closure: float = CLOSURE_TOL) -> EGI:
        return EGI.from_indicators(indicators, self.signs, tol_closure=tol_closure)


class HalfspaceSystem:
    """Rows n_j . x R_j b_j with R_j one of <=, >="""

    def __init__(self, normals, relations: Sequence[str], rhs):
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        rhs = np.asarray(rhs, dtype=float).ravel()
        relations = tuple(relations)
        if len(relations) != len(normals) or len(rhs) != len(normals):
            raise ValidationError("Halfspace system needs one relation and one rhs per row")
        if any(relation not in (LEQ, GEQ) for relation in relations):
            raise ValidationError(f"Relations must be '{LEQ}' or '{GEQ}'")
        if np.any(np.linalg.norm(normals, axis=1) == 0):
            raise ValidationError("Halfspace normals must be nonzero")

        self.normals = normals
        self.relations = relations
        self.rhs = rhs

    def __repr__(self):
        return f"HalfspaceSystem(dim={self.dim}, rows={len(self.rhs)})"

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @classmethod
    def from_support(cls, normals, support) -> 'HalfspaceSystem':
        """n_j . x <= h_j for every row"""
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        return cls(normals, [LEQ] * len(normals), support)

    def as_leq(self) -> Tuple[np.ndarray, np.ndarray]:
        """Equivalent system A x <= b with unit rows"""
        sign = np.where(np.array(self.relations) == GEQ, -1.0, 1.0)
        A = self.normals * sign[:, None]
        b = self.rhs * sign
        norms = np.linalg.norm(A, axis=1)
        return A / norms[:, None], b / norms


def cheby_ball(A: np.ndarray, b: np.ndarray) -> Tuple[float, np.ndarray]:
    """Radius and centre of a largest ball inside A x <= b (unit rows)"""
    n = A.shape[1]
    c = np.negative(np.r_[np.zeros(n), 1.0])
    G = np.c_[A, np.ones(len(A))]
    sol = linprog(c, A_ub=G, b_ub=b, bounds=[(None, None)] * n + [(0, None)], method='highs')
    if sol.status == 2:
        raise EmptyRegionError("Halfspace system is infeasible")
    if sol.status != 0:
        raise ReconstructionError(f"Chebyshev ball computation failed: {sol.message}")
    return float(sol.x[-1]), sol.x[:n]


def _check_bounded(A: np.ndarray):
    """Raise UnboundedRegionError if some nonzero direction d has A d <= 0"""
    n = A.shape[1]
    for k in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[k] = -sign
            sol = linprog(c, A_ub=A, b_ub=np.zeros(len(A)), bounds=[(-1, 1)] * n, method='highs')
            if sol.status == 0 and -sol.fun > GEOMETRY_TOL:
                raise UnboundedRegionError(f"Halfspace system is unbounded along direction {sol.x.tolist()}")


def _face_basis(normal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal u, w with u x w = normal"""
    helper = np.eye(3)[int(np.argmin(np.abs(normal)))]
    u = np.cross(normal, helper)
    u /= np.linalg.norm(u)
    return u, np.cross(normal, u)


class _Arrangement:
    """
    Vertex enumeration for fixed unit normals and a variable right-hand side.

    Every n-subset of rows with independent normals is inverted once; a
    candidate vertex is kept when it satisfies all rows.
    """

    def __init__(self, A: np.ndarray):
        self.A = A
        count, n = A.shape
        self.dim = n
        subsets = np.array(list(combinations(range(count), n)), dtype=int).reshape(-1, n)
        matrices = A[subsets]
        regular = np.abs(np.linalg.det(matrices)) > SIMPLEX_DET_TOL
        self.subsets = subsets[regular]
        self.inverses = np.linalg.inv(matrices[regular]) if regular.any() else np.zeros((0, n, n))

    def vertices(self, b: np.ndarray) -> Tuple[np.ndarray, float]:
        if len(self.subsets) == 0:
            return np.zeros((0, self.dim)), 0.0
        candidates = np.einsum('mij,mj->mi', self.inverses, b[self.subsets])
        tol = GEOMETRY_TOL * max(float(np.abs(b).max()), np.finfo(float).tiny)
        feasible = np.all(candidates @ self.A.T <= b + tol, axis=1)
        points = candidates[feasible]

        kept: List[int] = []
        for k in range(len(points)):
            if not kept or np.min(np.linalg.norm(points[kept] - points[k], axis=1)) > 10 * tol:
                kept.append(k)
        return points[kept], tol

    def merged(self, vertices: np.ndarray, b: np.ndarray, tol: float, radius: float) -> np.ndarray:
        """
        Collapse vertex clusters closer than radius.

        Each cluster becomes the least-squares point of every row that one of
        its members lies on (within tol).
        """
        if len(vertices) < 2:
            return vertices
        labels = fcluster(linkage(vertices, method='single'), t=radius, criterion='distance')
        residuals = np.abs(vertices @ self.A.T - b)
        points = []
        for label in np.unique(labels):
            members = labels == label
            if members.sum() == 1:
                points.append(vertices[members][0])
                continue
            rows = np.flatnonzero(residuals[members].min(axis=0) <= tol)
            points.append(np.linalg.lstsq(self.A[rows], b[rows], rcond=None)[0])
        if len(points) < len(vertices):
            logger.debug("Merged %d vertices into %d (radius %.3e)", len(vertices), len(points), radius)
        return np.array(points)

    def faces(self, vertices: np.ndarray, b: np.ndarray, tol: float) -> List[Tuple[int, List[int]]]:
        """(row, oriented vertex indices) for every row that carries a facet; tol is the on-plane distance"""
        n = self.dim
        faces = []
        seen = set()
        residuals = np.abs(vertices @ self.A.T - b)
        for row in range(len(self.A)):
            on = np.flatnonzero(residuals[:, row] <= tol)
            if len(on) < n or frozenset(on.tolist()) in seen:
                continue
            spread = vertices[on] - vertices[on[0]]
            if np.linalg.matrix_rank(spread, tol=tol) != n - 1:
                continue
            seen.add(frozenset(on.tolist()))
            faces.append((row, self._orient(on, vertices, self.A[row])))
        return faces

    def _orient(self, on: np.ndarray, vertices: np.ndarray, normal: np.ndarray) -> List[int]:
        n = self.dim
        if n == 2:
            tangent = np.array([-normal[1], normal[0]])
            projections = vertices[on] @ tangent
            return [int(on[np.argmin(projections)]), int(on[np.argmax(projections)])]
        if n == 3:
            u, w = _face_basis(normal)
            offsets = vertices[on] - vertices[on].mean(axis=0)
            angles = np.arctan2(offsets @ w, offsets @ u)
            return [int(k) for k in on[np.argsort(angles)]]
        if len(on) != n:
            raise ValidationError(f"Only simplicial facets are supported for dim {n}")
        return [int(k) for k in on]

    def face_measures(self, b: np.ndarray) -> np.ndarray:
        """Facet area per row (zero for rows without a facet); dims 2 and 3"""
        vertices, tol = self.vertices(b)
        measures = np.zeros(len(self.A))
        if len(vertices) <= self.dim:
            return measures
        for row, face in self.faces(vertices, b, 10 * tol):
            points = vertices[face]
            if self.dim == 2:
                measures[row] = float(np.linalg.norm(points[1] - points[0]))
            else:
                offsets = points - points.mean(axis=0)
                crossed = np.cross(offsets, np.roll(offsets, -1, axis=0)) @ self.A[row]
                measures[row] = 0.5 * abs(float(crossed.sum()))
        return measures

    def polytope(self, b: np.ndarray, merge: Optional[float] = None) -> Polytope:
        """
        The polytope for right-hand side b.

        With merge set, vertices closer than merge * max|b| are collapsed and
        that distance is used both for facet membership and for validating
        the result.
        """
        vertices, tol = self.vertices(b)
        if len(vertices) <= self.dim:
            raise EmptyRegionError("Halfspace system has no full-dimensional feasible region")
        on_plane = 10 * tol
        if merge is not None:
            radius = merge * float(np.abs(b).max())
            vertices = self.merged(vertices, b, on_plane, radius)
            on_plane = max(on_plane, radius)
            if len(vertices) <= self.dim:
                raise EmptyRegionError("Halfspace system has no full-dimensional feasible region")
        faces = [face for _, face in self.faces(vertices, b, on_plane)]
        # a vertex and its facet anchor can each sit on_plane away from the plane
        relative = max(GEOMETRY_TOL, 2 * on_plane / float(pdist(vertices).max()))
        return Polytope(vertices, faces, dim=self.dim, tol=relative)


def halfspaces_to_vertices(H: HalfspaceSystem) -> Polytope:
    """
    Vertices and facet incidence of a bounded halfspace intersection.

    Boundedness and full-dimensionality are checked with linear programs
    first; vertices come from n-subset intersections filtered for
    feasibility. Redundant rows carry no facet and are dropped.
    """
    A, b = H.as_leq()
    _check_bounded(A)
    radius, _ = cheby_ball(A, b)
    if radius <= GEOMETRY_TOL * max(float(np.abs(b).max()), np.finfo(float).tiny):
        raise EmptyRegionError("Halfspace system has no full-dimensional feasible region")
    return _Arrangement(A).polytope(b)


def simplex_halfspaces(indicators: FacetIndicatorSet) -> Tuple[HalfspaceSystem, List[int]]:
    """
    Halfspace system of the simplex with the given unsigned normals and areas.

    Row 0 is the entry with the largest area and gets n_0 . x <= a. For every
    other row j the sign of n_j . v_j follows from Cramer's rule as
    (-1)^(j+1) det N_0 / det N_j, where N_j holds the normals except n_j as
    columns; a positive sign makes the row n_j . x >= 0. The offset is
    a = ((n-1)! |det N_0| prod_{j>0} A_j)^(1/(n-1)) / A_0.

    Returns the system and the original entry index of each row.
    """
    n = indicators.dim
    if indicators.f != n + 1:
        raise ValidationError(f"A {n}-simplex needs {n + 1} indicator entries; got {indicators.f}")

    areas = indicators.areas
    first = int(np.argmax(areas))
    order = [first] + [k for k in range(indicators.f) if k != first]
    normals = indicators.normals[order]
    areas = areas[order]
    columns = normals.T

    det0 = float(np.linalg.det(np.delete(columns, 0, axis=1)))
    if abs(det0) <= SIMPLEX_DET_TOL:
        raise SingularInputError("Simplex normals are not in general position")

    relations = [LEQ]
    for j in range(1, n + 1):
        detj = float(np.linalg.det(np.delete(columns, j, axis=1)))
        if abs(detj) <= SIMPLEX_DET_TOL:
            raise SingularInputError("Simplex normals are not in general position")
        ratio = (-1) ** (j + 1) * det0 / detj
        relations.append(GEQ if ratio > 0 else LEQ)

    a = (factorial(n - 1) * abs(det0) * float(np.prod(areas[1:]))) ** (1.0 / (n - 1)) / areas[0]
    logger.debug("Simplex offset a=%.6g, relations %s", a, relations)
    return HalfspaceSystem(normals, relations, [a] + [0.0] * n), order


def reconstruct_simplex(indicators: FacetIndicatorSet, tol: Optional[float] = None) -> Simplex:
    """
    The simplex with the given facet-indicator set, up to translation and reflection.

    With tol set, raises InconsistentIndicatorError when the reconstructed
    areas deviate from the input by more than tol (relative).
    """
    system, _ = simplex_halfspaces(indicators)
    simplex = Simplex(halfspaces_to_vertices(system).vertices)

    residual = area_residual(simplex, indicators)
    if tol is not None and residual > tol:
        raise InconsistentIndicatorError(
            f"Reconstructed simplex areas deviate by {residual:.3e} (relative)", residual=residual
        )
    if residual > CLOSURE_TOL:
        logger.warning("Simplex areas deviate from the indicator set by %.3e (relative)", residual)
    return simplex


def _sign_patterns(start: int, stop: int, free: int) -> np.ndarray:
    """Rows of +-1 for pattern numbers start..stop-1 over the free entries"""
    codes = np.arange(start, stop, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(free, dtype=np.int64)) & 1
    return 1 - 2 * bits


def resolve_signs(indicators: FacetIndicatorSet, tol: float = DETECTED_SIGN_TOL) -> List[SignAssignment]:
    """
    Every sign pattern (first sign +1) under which the indicator set closes.

    A pattern survives when |sum eps_j A_j n_j| <= tol * sum A_j. Survivors
    are ordered by residual. Raises MinkowskiInfeasibleError with the best
    residual when nothing survives.
    """
    f = indicators.f
    n = indicators.dim
    if f > MAX_SIGN_FACETS:
        raise ValidationError(f"Sign enumeration supports at most {MAX_SIGN_FACETS} entries; got {f}")
    if f < n + 1:
        raise SingularInputError(f"A {n}-polytope has at least {n + 1} facets; got {f}")
    if np.linalg.matrix_rank(indicators.normals) < n:
        raise SingularInputError(f"Indicator normals do not span R^{n}")

    vectors = indicators.areas[:, None] * indicators.normals
    scale = float(indicators.areas.sum())
    total = 1 << (f - 1)

    found = []
    best_residual = np.inf
    best_code = 0
    for start in range(0, total, SIGN_CHUNK):
        stop = min(start + SIGN_CHUNK, total)
        signs = _sign_patterns(start, stop, f - 1)
        sums = vectors[0] + signs @ vectors[1:]
        residuals = np.linalg.norm(sums, axis=1) / scale

        k = int(np.argmin(residuals))
        if residuals[k] < best_residual:
            best_residual = float(residuals[k])
            best_code = start + k
        for k in np.flatnonzero(residuals <= tol):
            found.append((float(residuals[k]), start + int(k)))

    if not found:
        best_signs = (1,) + tuple(int(x) for x in _sign_patterns(best_code, best_code + 1, f - 1)[0])
        raise MinkowskiInfeasibleError(
            f"No sign assignment closes within tol {tol:g}; best relative residual {best_residual:.3e}",
            best_residual=best_residual,
            best_signs=best_signs,
        )

    found.sort()
    assignments = [
        SignAssignment((1,) + tuple(int(x) for x in _sign_patterns(code, code + 1, f - 1)[0]), residual)
        for residual, code in found
    ]
    logger.debug("%d of %d sign assignments close", len(assignments), total)
    return assignments


def reconstruct_polygon_2d(E: EGI) -> Polytope:
    """
    Polygon with the EGI's outward normals and edge lengths.

    Vectors are sorted by angle, rotated a quarter turn anticlockwise and
    chained head to tail from the origin. The remaining closure gap is spread
    evenly over the vertices.
    """
    if E.dim != 2:
        raise ValidationError(f"reconstruct_polygon_2d needs a 2D EGI; got dim {E.dim}")
    if E.relative_residual > E.tol_closure:
        raise ClosureError(f"EGI does not close ({E.relative_residual:.3e})", residual=E.relative_residual)

    m = np.asarray(E.vectors)
    order = np.argsort(np.arctan2(m[:, 1], m[:, 0]), kind='stable')
    edges = np.stack([-m[order, 1], m[order, 0]], axis=1)

    f = len(edges)
    vertices = np.vstack([np.zeros(2), np.cumsum(edges, axis=0)[:-1]])
    gap = edges.sum(axis=0)
    vertices -= np.outer(np.arange(f) / f, gap)
    return Polytope.polygon(vertices)


@dataclass
class SupportFit:
    """Outcome of a support-parameter fit"""
    support: np.ndarray
    areas: np.ndarray
    objective: float
    residual: float
    sweeps: int
    converged: bool


def _check_generic(normals: np.ndarray):
    dots = np.abs(normals @ normals.T)
    np.fill_diagonal(dots, 0.0)
    if dots.max() > 1.0 - FACET_GENERIC_TOL:
        raise SingularInputError("EGI has parallel normals; only facet-generic polytopes are supported")


def fit_support(E: EGI, max_sweeps: int = FIT_MAX_SWEEPS, tol: float = FIT_TOL,
                polish_steps: int = FIT_POLISH_STEPS) -> SupportFit:
    """
    Support parameters h whose polytope {x: n_j . x <= h_j} has the EGI's areas.

    Starts from h = 1 rescaled to the total area, runs coordinate descent with
    step halving on sum_j (area_j(h) - A_j)^2, then polishes with Gauss-Newton
    steps on a finite-difference Jacobian. A step that empties a facet is
    rejected. The objective target is tol * (sum A_j)^2.
    """
    if E.dim != 3:
        raise ValidationError(f"Support fitting needs a 3D EGI; got dim {E.dim}")
    if E.relative_residual > E.tol_closure:
        raise ClosureError(f"EGI does not close ({E.relative_residual:.3e})", residual=E.relative_residual)

    normals = E.normals
    targets = E.areas
    _check_generic(normals)
    arrangement = _Arrangement(normals)
    total = float(targets.sum())
    floor = GEOMETRY_TOL * total
    goal = tol * total ** 2

    def objective(areas: np.ndarray) -> float:
        return float(((areas - targets) ** 2).sum())

    h = np.ones(len(targets))
    h *= np.sqrt(total / arrangement.face_measures(h).sum())
    current = arrangement.face_measures(h)
    value = objective(current)

    step = np.full(len(h), 0.25 * h.mean())
    min_step = FIT_MIN_STEP * h.mean()
    sweeps = 0
    while sweeps < max_sweeps and value > max(goal, _COARSE_OBJECTIVE * total ** 2) and step.max() > min_step:
        sweeps += 1
        for j in range(len(h)):
            best = None
            for delta in (step[j], -step[j]):
                trial = h.copy()
                trial[j] += delta
                areas = arrangement.face_measures(trial)
                if np.any(areas[current > floor] <= floor):
                    continue
                trial_value = objective(areas)
                if trial_value < value and (best is None or trial_value < best[0]):
                    best = (trial_value, trial, areas)
            if best is None:
                step[j] *= 0.5
            else:
                value, h, current = best

    for _ in range(polish_steps):
        if value <= goal:
            break
        delta = 1e-6 * h.mean()
        jacobian = np.empty((len(h), len(h)))
        for j in range(len(h)):
            offset = np.zeros(len(h))
            offset[j] = delta
            jacobian[:, j] = (arrangement.face_measures(h + offset) - arrangement.face_measures(h - offset)) / (2 * delta)
        direction = np.linalg.lstsq(jacobian, targets - current, rcond=None)[0]

        scale = 1.0
        accepted = False
        while scale > 1e-4:
            trial = h + scale * direction
            areas = arrangement.face_measures(trial)
            if np.all(areas > floor) and objective(areas) < value:
                h, current, value = trial, areas, objective(areas)
                accepted = True
                break
            scale *= 0.5
        if not accepted:
            break

    residual = float(np.max(np.abs(current - targets) / targets))
    converged = value <= goal
    if not converged:
        logger.warning("Support fit stalled after %d sweeps: objective %.3e, max area error %.3e",
                       sweeps, value / total ** 2, residual)
    return SupportFit(support=h, areas=current, objective=value, residual=residual,
                      sweeps=sweeps, converged=converged)


def reconstruct_polytope_3d(E: EGI, max_sweeps: int = FIT_MAX_SWEEPS, tol: float = FIT_TOL) -> Polytope:
    """3D polytope with the EGI's normals and areas, centred at its vertex centroid"""
    fit = fit_support(E, max_sweeps=max_sweeps, tol=tol)
    P = _Arrangement(E.normals).polytope(fit.support, merge=FIT_MERGE_TOL)
    return P.translated(-P.centroid)


@dataclass
class Reconstruction:
    """One candidate polytope for an indicator set"""
    polytope: Polytope
    signs: SignAssignment
    residual: float
    method: str


def _simplex_signs(system: HalfspaceSystem, order: List[int]) -> SignAssignment:
    signs = np.empty(len(order), dtype=int)
    for row, index in enumerate(order):
        signs[index] = 1 if system.relations[row] == LEQ else -1
    signs *= signs[0]
    return SignAssignment(tuple(int(s) for s in signs))


def reconstruct(indicators: FacetIndicatorSet, tol: float = DETECTED_SIGN_TOL) -> List[Reconstruction]:
    """
    Every polytope consistent with an indicator set.

    n+1 entries give the unique simplex; otherwise each surviving sign
    assignment is reconstructed as a polygon (dim 2) or by support fitting
    (dim 3). Results are ordered by closure residual. Antipodal entries raise
    SingularInputError: a facet-generic polytope never produces them.
    """
    n = indicators.dim
    if indicators.f < n + 1:
        raise SingularInputError(f"A {n}-polytope has at least {n + 1} facets; got {indicators.f}")
    try:
        FacetIndicatorSet(n, indicators.entries, strict=True)
    except ValidationError as e:
        raise SingularInputError(str(e)) from e

    if indicators.f == n + 1:
        system, order = simplex_halfspaces(indicators)
        simplex = reconstruct_simplex(indicators)
        return [Reconstruction(polytope=simplex.to_polytope(), signs=_simplex_signs(system, order),
                               residual=area_residual(simplex, indicators), method='simplex')]

    if n not in (2, 3):
        raise ValidationError(f"Non-simplex reconstruction supports dim 2 and 3; got {n}")

    results = []
    failure: Optional[Exception] = None
    for assignment in resolve_signs(indicators, tol):
        try:
            egi = EGI.from_indicators(indicators, assignment.signs, tol_closure=tol).closed()
            if n == 2:
                polytope, method = reconstruct_polygon_2d(egi), 'polygon2d'
            else:
                polytope, method = reconstruct_polytope_3d(egi), 'polytope3d'
        except (ReconstructionError, ValidationError) as e:
            logger.warning("Sign assignment %s could not be reconstructed: %s", assignment.signs, e)
            failure = e
            continue
        results.append(Reconstruction(polytope=polytope, signs=assignment,
                                      residual=area_residual(polytope, indicators), method=method))

    if not results:
        raise failure
    return results
