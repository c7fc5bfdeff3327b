"""
Fourier transforms of convex polytopes: F_P(s) = integral over P of exp(-i s.x) dx.

Polygons and 3D polytopes use the divergence-theorem reduction to edge sums
(2D) and facet/edge double sums (3D). Simplices in up to four dimensions are
integrated by adaptive simplex bisection, which serves as an independent
oracle for the closed forms.

All transforms accept a single wavevector of shape (n,) or a stack of shape
(m, n); a stack returns an array of m complex values.
"""
import logging
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import List, Tuple, Union

import numpy as np

from polyrecon.constants import (
    LIMIT_EPS,
    ORTHOGONAL_TOL,
    PHASE_REDUCE_ABOVE,
    QUAD_BATCH,
    QUAD_MAX_CELLS,
    QUAD_MAX_DEPTH,
    QUAD_MAX_DIM,
    QUAD_MIN_TOL,
    SERIES_CUTOFF,
    SERIES_DEGREE,
    TWO_PI,
)
from polyrecon.exceptions import QuadratureError, ValidationError
from polyrecon.geometry import Polytope, PolytopeLike, Simplex, _as_polytope, facet_data, triangulate

logger = logging.getLogger(__name__)

Amplitude = Union[complex, np.ndarray]

# Taylor coefficients of (exp(-iz) - 1)/z = sum_k (-i)^k z^(k-1) / k!
_SERIES = np.array([(-1j) ** k / factorial(k) for k in range(1, SERIES_DEGREE + 2)])


def _as_wavevectors(s, dim: int) -> Tuple[np.ndarray, bool]:
    s = np.asarray(s, dtype=float)
    single = s.ndim == 1
    s = np.atleast_2d(s)
    if s.ndim != 2 or s.shape[1] != dim:
        raise ValidationError(f"Wavevector must have {dim} components; got array of shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValidationError("Wavevector must be finite")
    return s, single


def _unwrap(values: np.ndarray, single: bool) -> Amplitude:
    return complex(values[0]) if single else values


def _phase(theta) -> np.ndarray:
    """exp(-i theta), reducing large arguments modulo 2 pi first"""
    theta = np.asarray(theta, dtype=float)
    theta = np.where(np.abs(theta) > PHASE_REDUCE_ABOVE, np.remainder(theta, TWO_PI), theta)
    return np.exp(-1j * theta)


def _edge_factor(z: np.ndarray, limit: np.ndarray) -> np.ndarray:
    """(exp(-iz) - 1)/z, replaced by its limit -i wherever `limit` holds"""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape, dtype=complex)

    series = np.abs(z) < SERIES_CUTOFF
    if series.any():
        out[series] = np.polynomial.polynomial.polyval(z[series], _SERIES)
    direct = ~series
    if direct.any():
        zd = z[direct]
        out[direct] = (-2.0 * np.sin(0.5 * zd) ** 2 - 1j * np.sin(zd)) / zd

    out[limit] = -1j
    return out


def _simplex_moments(vertices: np.ndarray, measure: float, center: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """First and second moments of a k-simplex about `center`, given its k-measure"""
    w = vertices - center
    k = len(vertices) - 1
    total = w.sum(axis=0)
    first = measure * total / (k + 1)
    second = measure / ((k + 1) * (k + 2)) * (w.T @ w + np.outer(total, total))
    return first, second


def _low_frequency(P: PolytopeLike, s: np.ndarray) -> np.ndarray:
    """Second-order expansion about the centroid, for |s| diam below the series cutoff"""
    vertices = np.asarray(P.vertices)
    center = vertices.mean(axis=0)
    n = P.dim
    vol = 0.0
    first = np.zeros(n)
    second = np.zeros((n, n))
    for simplex in triangulate(P):
        m1, m2 = _simplex_moments(np.asarray(simplex.vertices), simplex.volume, center)
        vol += simplex.volume
        first += m1
        second += m2

    quadratic = np.einsum('mi,ij,mj->m', s, second, s)
    return _phase(s @ center) * (vol - 1j * (s @ first) - 0.5 * quadratic)


def _split_low_frequency(P: Polytope, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    norms2 = (s ** 2).sum(axis=1)
    low = np.sqrt(norms2) * P.diameter < SERIES_CUTOFF
    if np.any(norms2 == 0.0):
        logger.debug("Zero-frequency wavevector; transform equals the volume")
    return low, norms2


def ft_polygon_2d(P: PolytopeLike, s) -> Amplitude:
    """
    Exact transform of a polygon.

    F(s) = -(1/|s|^2) sum_e (s . nu_e L_e) exp(-i s.a_e) g(s.e), with
    g(z) = (exp(-iz) - 1)/z, a_e the edge start, e the edge vector and
    nu_e L_e its outward normal scaled by the edge length.
    """
    P = _as_polytope(P)
    if P.dim != 2:
        raise ValidationError(f"ft_polygon_2d needs a 2D polytope; got dim {P.dim}")
    s, single = _as_wavevectors(s, 2)
    out = np.empty(len(s), dtype=complex)

    low, norms2 = _split_low_frequency(P, s)
    if low.any():
        out[low] = _low_frequency(P, s[low])

    high = ~low
    if high.any():
        sh = s[high]
        snorm = np.sqrt(norms2[high])
        total = np.zeros(len(sh), dtype=complex)
        verts = np.asarray(P.vertices)
        for start, end in P.facets:
            a = verts[start]
            edge = verts[end] - a
            scaled_normal = np.array([edge[1], -edge[0]])
            z = sh @ edge
            limit = np.abs(z) < LIMIT_EPS * snorm * np.linalg.norm(edge)
            total += (sh @ scaled_normal) * _phase(sh @ a) * _edge_factor(z, limit)
        out[high] = -total / norms2[high]

    return _unwrap(out, single)


def _facet_moments(points: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    """Area and moments of a planar convex polygon about its first vertex"""
    anchor = points[0]
    area = 0.0
    first = np.zeros(3)
    second = np.zeros((3, 3))
    for k in range(1, len(points) - 1):
        triangle = points[[0, k, k + 1]]
        measure = 0.5 * np.linalg.norm(np.cross(triangle[1] - anchor, triangle[2] - anchor))
        m1, m2 = _simplex_moments(triangle, measure, anchor)
        area += measure
        first += m1
        second += m2
    return area, first, second


def _facet_integral(points: np.ndarray, normal: np.ndarray, s: np.ndarray) -> np.ndarray:
    """
    Integral of exp(-i s.(x - p)) over a facet with anchor p = points[0].

    Only the in-plane part s_t of s matters. When |s_t| diam is tiny the
    in-plane edge sum cancels, so a second-order moment expansion is used.
    """
    anchor = points[0]
    s_normal = s @ normal
    s_plane = s - np.outer(s_normal, normal)
    plane2 = (s_plane ** 2).sum(axis=1)
    diffs = points[:, None, :] - points[None, :, :]
    diameter2 = float((diffs ** 2).sum(axis=-1).max())

    out = np.empty(len(s), dtype=complex)
    near = plane2 * diameter2 < LIMIT_EPS

    if near.any():
        area, first, second = _facet_moments(points)
        sn = s_plane[near]
        out[near] = area - 1j * (sn @ first) - 0.5 * np.einsum('mi,ij,mj->m', sn, second, sn)

    far = ~near
    if far.any():
        sf = s_plane[far]
        sf2 = plane2[far]
        sfn = np.sqrt(sf2)
        total = np.zeros(len(sf), dtype=complex)
        count = len(points)
        for k in range(count):
            a = points[k]
            edge = points[(k + 1) % count] - a
            # outward in-plane normal times edge length
            scaled_normal = np.cross(edge, normal)
            z = sf @ edge
            limit = np.abs(z) < LIMIT_EPS * sfn * np.linalg.norm(edge)
            total += (sf @ scaled_normal) * _phase(sf @ (a - anchor)) * _edge_factor(z, limit)
        out[far] = -total / sf2

    return out


def ft_polytope_3d(P: PolytopeLike, s) -> Amplitude:
    """
    Exact transform of a 3D polytope.

    F(s) = (i/|s|^2) sum_F (s.n_F) exp(-i s.p_F) J_F(s), where J_F is the
    facet integral relative to the anchor p_F, itself reduced to an edge sum
    over the facet boundary with the in-plane wavevector.
    """
    P = _as_polytope(P)
    if P.dim != 3:
        raise ValidationError(f"ft_polytope_3d needs a 3D polytope; got dim {P.dim}")
    s, single = _as_wavevectors(s, 3)
    out = np.empty(len(s), dtype=complex)

    low, norms2 = _split_low_frequency(P, s)
    if low.any():
        out[low] = _low_frequency(P, s[low])

    high = ~low
    if high.any():
        sh = s[high]
        total = np.zeros(len(sh), dtype=complex)
        verts = np.asarray(P.vertices)
        for facet in facet_data(P):
            points = verts[list(facet.indices)]
            normal = np.asarray(facet.normal)
            total += (sh @ normal) * _phase(sh @ facet.anchor) * _facet_integral(points, normal, sh)
        out[high] = 1j * total / norms2[high]

    return _unwrap(out, single)


def _compositions(total: int, parts: int) -> List[Tuple[int, ...]]:
    """All tuples of `parts` non-negative integers summing to `total`"""
    result = []
    for bins in combinations_with_replacement(range(parts), total):
        counts = [0] * parts
        for b in bins:
            counts[b] += 1
        result.append(tuple(counts))
    return result


@lru_cache(maxsize=None)
def _grundmann_moller(dim: int, s: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Grundmann-Moller rule of degree 2s+1 on the n-simplex.

    Returns barycentric points (p, n+1) and weights (p,) normalized to sum to
    one, so a cell integral is volume * (weights @ f(points)).
    """
    degree = 2 * s + 1
    points = []
    weights = []
    for i in range(s + 1):
        denominator = degree + dim - 2 * i
        weight = (-1) ** i * 2.0 ** (-2 * s) * denominator ** degree / (
            factorial(i) * factorial(degree + dim - i)
        )
        for beta in _compositions(s - i, dim + 1):
            points.append([(2 * b + 1) / denominator for b in beta])
            weights.append(weight)

    weights = np.array(weights) * factorial(dim)
    return np.array(points), weights


def _quadrature_rules(dim: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shared point set with degree-9 and degree-7 weight vectors"""
    high_points, high_weights = _grundmann_moller(dim, 4)
    low_points, low_weights = _grundmann_moller(dim, 3)
    points = np.vstack([high_points, low_points])
    high = np.concatenate([high_weights, np.zeros(len(low_weights))])
    low = np.concatenate([np.zeros(len(high_weights)), low_weights])
    return points, high, low


def _bisect(cells: np.ndarray) -> np.ndarray:
    """Split every cell across the midpoint of its longest edge"""
    diffs = cells[:, :, None, :] - cells[:, None, :, :]
    lengths = (diffs ** 2).sum(axis=-1)
    corners = cells.shape[1]
    flat = lengths.reshape(len(cells), -1).argmax(axis=1)
    i, j = np.divmod(flat, corners)
    rows = np.arange(len(cells))
    midpoints = 0.5 * (cells[rows, i] + cells[rows, j])

    first = cells.copy()
    first[rows, j] = midpoints
    second = cells.copy()
    second[rows, i] = midpoints
    return np.concatenate([first, second])


def ft_simplex_quadrature(S: Simplex, s, tol: float = 1e-8) -> complex:
    """
    Integrate exp(-i s.x) over a simplex by adaptive longest-edge bisection.

    Each cell is evaluated with embedded degree-9/degree-7 rules; a cell is
    accepted once the two agree to tol * vol(cell), so the total error stays
    below tol * vol(S). Raises QuadratureError with the running estimate when
    the depth or cell budget runs out.
    """
    if not isinstance(S, Simplex):
        raise ValidationError("ft_simplex_quadrature needs a Simplex")
    n = S.dim
    if n > QUAD_MAX_DIM:
        raise ValidationError(f"Quadrature supports dim <= {QUAD_MAX_DIM}; got {n}")
    if not tol >= QUAD_MIN_TOL:
        raise ValidationError(f"Quadrature tolerance must be at least {QUAD_MIN_TOL}; got {tol}")
    s = np.asarray(s, dtype=float)
    if s.shape != (n,):
        raise ValidationError(f"Wavevector must have {n} components; got shape {s.shape}")
    if not np.any(s):
        return complex(S.volume)

    points, high_weights, low_weights = _quadrature_rules(n)
    unit_volume = 1.0 / factorial(n)

    pending = [(np.asarray(S.vertices)[None, :, :], 0)]
    total = 0.0j
    processed = 0
    stuck = False

    while pending:
        cells, depth = pending.pop(0)
        for start in range(0, len(cells), QUAD_BATCH):
            batch = cells[start:start + QUAD_BATCH]
            processed += len(batch)

            edges = batch[:, 1:, :] - batch[:, :1, :]
            volumes = np.abs(np.linalg.det(edges)) * unit_volume
            x = np.einsum('pj,kjd->kpd', points, batch)
            values = _phase(x @ s)
            high = volumes * (values @ high_weights)
            low = volumes * (values @ low_weights)
            accept = np.abs(high - low) <= tol * volumes

            if depth >= QUAD_MAX_DEPTH:
                stuck = stuck or not accept.all()
                accept[:] = True
            total += high[accept].sum()

            if not accept.all():
                if processed > QUAD_MAX_CELLS:
                    estimate = total + high[~accept].sum()
                    raise QuadratureError(
                        f"Quadrature exceeded {QUAD_MAX_CELLS} cells before reaching tol {tol:g}",
                        estimate=estimate,
                    )
                pending.append((_bisect(batch[~accept]), depth + 1))

    if stuck:
        raise QuadratureError(
            f"Quadrature hit depth {QUAD_MAX_DEPTH} before reaching tol {tol:g}", estimate=total
        )

    logger.debug("Quadrature used %d cells", processed)
    return complex(total)


def integral_Inc(n: int, c: float, lam: float) -> complex:
    """
    Integral of (1-x)^n exp(-i c x / lam) over [0, 1].

    Seeded with the closed form for n=0 and raised by partial integration:
    I_n = -(i/c) lam (1 - n I_{n-1}).
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValidationError(f"n must be a non-negative integer; got {n}")
    if c == 0:
        raise ValidationError("c must be nonzero")
    if not lam > 0:
        raise ValidationError(f"lambda must be positive; got {lam}")

    value = 1j * lam / c * (complex(_phase(c / lam)) - 1.0)
    for k in range(1, int(n) + 1):
        value = -1j / c * lam * (1.0 - k * value)
    return complex(value)


def asymptotic_leading_term(P: PolytopeLike, s, lam: float) -> complex:
    """
    First-order term of F_P(s/lam) as lam -> 0.

    (i/|s|) lam * sum over facets F orthogonal to s of sgn(s.n_F) A_F exp(-i s.p_F/lam).
    Zero when no facet is orthogonal to s.
    """
    P = _as_polytope(P)
    s = np.asarray(s, dtype=float)
    if s.shape != (P.dim,):
        raise ValidationError(f"Wavevector must have {P.dim} components; got shape {s.shape}")
    norm = float(np.linalg.norm(s))
    if norm == 0.0:
        raise ValidationError("Wavevector must be nonzero")
    if not lam > 0:
        raise ValidationError(f"lambda must be positive; got {lam}")

    direction = s / norm
    total = 0.0j
    for facet in facet_data(P):
        cosine = float(direction @ facet.normal)
        if abs(1.0 - abs(cosine)) <= ORTHOGONAL_TOL:
            sign = 1.0 if cosine > 0 else -1.0
            total += sign * facet.area * complex(_phase(s @ facet.anchor / lam))
    if total == 0:
        return 0j
    return 1j / norm * total * lam


def fourier_transform(P: PolytopeLike, s, tol: float = 1e-8) -> Amplitude:
    """Dispatch to the closed form for dim 2/3, quadrature for higher-dimensional simplices"""
    if P.dim == 2:
        return ft_polygon_2d(P, s)
    if P.dim == 3:
        return ft_polytope_3d(P, s)

    if isinstance(P, Polytope):
        if len(P.vertices) != P.dim + 1:
            raise ValidationError(f"No transform available for a non-simplex polytope of dim {P.dim}")
        P = Simplex(P.vertices)
    s, single = _as_wavevectors(s, P.dim)
    values = np.array([ft_simplex_quadrature(P, row, tol) for row in s])
    return _unwrap(values, single)


def phi(P: PolytopeLike, s, lam: float) -> Amplitude:
    """phi_{P,s}(lam) = F_P(s / lam)"""
    if not lam > 0:
        raise ValidationError(f"lambda must be positive; got {lam}")
    return fourier_transform(P, np.asarray(s, dtype=float) / lam)
