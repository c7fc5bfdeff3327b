"""
Scan surfaces, sampling grids and simulated patterns.

A scan surface is a parameterization sigma: D -> R^n of a set meeting every
direction at least once. The pattern stores |phi_{P,sigma(t)}(lam)| and the
rescaled field psi(t) = |sigma(t)| |phi| / lam over a grid on D.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from polyrecon.constants import (
    DEFAULT_CHUNK,
    DEFAULT_GRID_2D,
    DEFAULT_GRID_3D,
    EWALD_MIN_POLAR,
    SURFACE_ALIASES,
    SURFACE_EWALD,
    SURFACE_HEMISPHERE,
    SURFACE_KINDS,
    SURFACE_SEMICIRCLE,
    TWO_PI,
)
from polyrecon.exceptions import ValidationError
from polyrecon.fourier import fourier_transform
from polyrecon.geometry import PolytopeLike

logger = logging.getLogger(__name__)

# Axis wrap behaviour used by the detector's neighbourhoods
WRAP_NONE = 'none'
WRAP_PERIODIC = 'periodic'
# t2 -> t2 + pi on the hemisphere lands on the antipode of (pi - t1, t2)
WRAP_FLIP = 'flip'

_DOMAIN_SLACK = 1e-12


class ScanSurface:
    """A parameterized scan surface with its angular domain"""

    def __init__(self, kind: str, radius: float = 1.0, axis: int = 2):
        kind = SURFACE_ALIASES.get(kind, kind)
        if kind not in SURFACE_KINDS:
            raise ValidationError(f"Unknown surface kind {kind!r}; expected one of {SURFACE_KINDS}")
        if not radius > 0:
            raise ValidationError(f"Surface radius must be positive; got {radius}")
        if axis not in (0, 1, 2):
            raise ValidationError(f"Ewald axis must be 0, 1 or 2; got {axis}")

        self.kind = kind
        self.radius = float(radius)
        self.axis = int(axis)

    def __repr__(self):
        return f"ScanSurface(kind={self.kind!r}, radius={self.radius}, axis={self.axis})"

    @classmethod
    def for_dim(cls, dim: int) -> 'ScanSurface':
        """Default surface for a dimension"""
        if dim == 2:
            return cls(SURFACE_SEMICIRCLE)
        if dim == 3:
            return cls(SURFACE_HEMISPHERE)
        raise ValidationError(f"No scan surface for dim {dim}")

    @property
    def dim(self) -> int:
        return 2 if self.kind == SURFACE_SEMICIRCLE else 3

    @property
    def domain(self) -> Tuple[Tuple[float, float], ...]:
        if self.kind == SURFACE_SEMICIRCLE:
            return ((0.0, math.pi),)
        if self.kind == SURFACE_HEMISPHERE:
            return ((0.0, math.pi), (0.0, math.pi))
        return ((EWALD_MIN_POLAR, math.pi), (0.0, TWO_PI))

    @property
    def wraps(self) -> Tuple[str, ...]:
        """Wrap type per axis when a grid spans the whole axis"""
        if self.kind == SURFACE_SEMICIRCLE:
            return (WRAP_PERIODIC,)
        if self.kind == SURFACE_HEMISPHERE:
            return (WRAP_PERIODIC, WRAP_FLIP)
        return (WRAP_NONE, WRAP_PERIODIC)

    def _to_global(self, local: np.ndarray) -> np.ndarray:
        order = [(self.axis + 1) % 3, (self.axis + 2) % 3, self.axis]
        out = np.empty_like(local)
        out[..., order] = local
        return out

    def _to_local(self, vectors: np.ndarray) -> np.ndarray:
        order = [(self.axis + 1) % 3, (self.axis + 2) % 3, self.axis]
        return vectors[..., order]

    def to_dict(self) -> Dict:
        """Convert to dictionary"""
        return {'kind': self.kind, 'radius': self.radius, 'axis': self.axis}

    @classmethod
    def from_dict(cls, data: Dict) -> 'ScanSurface':
        """Create ScanSurface from dictionary"""
        return cls(data['kind'], radius=data.get('radius', 1.0), axis=data.get('axis', 2))


class Grid:
    """
    Sampling grid on a surface's domain.

    Axis k holds counts[k] points lo + j (hi - lo) / counts[k], j = 0..counts[k]-1,
    so a grid spanning a half-open periodic axis never repeats a point.
    """

    def __init__(self, counts: Sequence[int], ranges: Sequence[Tuple[float, float]]):
        counts = [int(count) for count in counts]
        ranges = [(float(lo), float(hi)) for lo, hi in ranges]
        if len(counts) != len(ranges):
            raise ValidationError("Grid needs one range per axis")
        if any(count < 2 for count in counts):
            raise ValidationError(f"Grid counts must be at least 2; got {counts}")
        if any(not hi > lo for lo, hi in ranges):
            raise ValidationError(f"Grid ranges must be increasing; got {ranges}")
        self.counts = tuple(counts)
        self.ranges = tuple(ranges)

    def __repr__(self):
        return f"Grid(counts={self.counts}, ranges={self.ranges})"

    @classmethod
    def for_surface(cls, surface: ScanSurface, counts: Optional[Sequence[int]] = None) -> 'Grid':
        """Grid covering the whole domain; default counts per dimension"""
        axes = len(surface.domain)
        if counts is None:
            default = DEFAULT_GRID_2D if surface.dim == 2 else DEFAULT_GRID_3D
            counts = [default] * axes
        elif len(counts) == 1 and axes > 1:
            counts = list(counts) * axes
        return cls(counts, surface.domain)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.counts

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axes(self) -> List[np.ndarray]:
        return [lo + np.arange(count) * ((hi - lo) / count)
                for count, (lo, hi) in zip(self.counts, self.ranges)]

    def spacing(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / count for count, (lo, hi) in zip(self.counts, self.ranges))

    def points(self) -> np.ndarray:
        """All grid points, row-major, shape (size, axes)"""
        mesh = np.meshgrid(*self.axes(), indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=1)

    def covers(self, surface: ScanSurface) -> Tuple[bool, ...]:
        """Per axis: does the grid span the whole domain axis"""
        return tuple(abs(lo - dlo) <= _DOMAIN_SLACK and abs(hi - dhi) <= _DOMAIN_SLACK
                     for (lo, hi), (dlo, dhi) in zip(self.ranges, surface.domain))

    def check_within(self, surface: ScanSurface):
        if len(self.ranges) != len(surface.domain):
            raise ValidationError(f"Grid has {len(self.ranges)} axes; {surface.kind} needs {len(surface.domain)}")
        for (lo, hi), (dlo, dhi) in zip(self.ranges, surface.domain):
            if lo < dlo - _DOMAIN_SLACK or hi > dhi + _DOMAIN_SLACK:
                raise ValidationError(f"Grid range ({lo}, {hi}) leaves the domain ({dlo}, {dhi})")

    def to_dict(self) -> Dict:
        """Convert to dictionary"""
        return {'counts': list(self.counts), 'ranges': [list(r) for r in self.ranges]}

    @classmethod
    def from_dict(cls, data: Dict) -> 'Grid':
        """Create Grid from dictionary"""
        return cls(data['counts'], data['ranges'])


def sigma(surface: ScanSurface, t) -> np.ndarray:
    """
    Map parameter points to wavevector directions.

    Accepts one point of shape (axes,) or a stack (m, axes). Raises
    ValidationError for points outside the domain.
    """
    t = np.asarray(t, dtype=float)
    single = t.ndim <= 1
    t = t.reshape(-1, len(surface.domain))
    for k, (lo, hi) in enumerate(surface.domain):
        if np.any(t[:, k] < lo - _DOMAIN_SLACK) or np.any(t[:, k] >= hi + _DOMAIN_SLACK):
            raise ValidationError(f"Parameter axis {k} outside [{lo}, {hi})")

    r = surface.radius
    if surface.kind == SURFACE_SEMICIRCLE:
        out = r * np.stack([np.cos(t[:, 0]), np.sin(t[:, 0])], axis=1)
    elif surface.kind == SURFACE_HEMISPHERE:
        t1, t2 = t[:, 0], t[:, 1]
        out = r * np.stack([np.sin(t1) * np.cos(t2), np.sin(t1) * np.sin(t2), np.cos(t1)], axis=1)
    else:
        # sphere of radius r through the origin, centred on the positive axis
        t1, t2 = t[:, 0], t[:, 1]
        local = r * np.stack([np.sin(t1) * np.cos(t2), np.sin(t1) * np.sin(t2), 1.0 - np.cos(t1)], axis=1)
        out = surface._to_global(local)

    return out[0] if single else out


def fold(surface: ScanSurface, s) -> np.ndarray:
    """
    Parameter point whose sigma is a scalar multiple of s.

    For the semicircle and hemisphere the multiple is +-1/|s| times the radius;
    for the Ewald sphere it is the second intersection of the line through s
    with the sphere.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (surface.dim,):
        raise ValidationError(f"Direction must have {surface.dim} components; got shape {s.shape}")
    norm = float(np.linalg.norm(s))
    if norm == 0.0:
        raise ValidationError("Direction must be nonzero")
    d = s / norm

    if surface.kind == SURFACE_SEMICIRCLE:
        angle = math.atan2(d[1], d[0])
        if angle < 0 or angle >= math.pi:
            angle = math.atan2(-d[1], -d[0])
        return np.array([angle])

    if surface.kind == SURFACE_HEMISPHERE:
        if d[0] == 0.0 and d[1] == 0.0:
            return np.array([0.0, 0.0])
        angle = math.atan2(d[1], d[0])
        if angle < 0 or angle >= math.pi:
            d = -d
            angle = math.atan2(d[1], d[0])
        return np.array([math.acos(min(1.0, max(-1.0, d[2]))), angle])

    local = surface._to_local(d)
    if local[2] == 0.0:
        raise ValidationError("Direction is tangent to the Ewald sphere at the origin")
    point = 2.0 * surface.radius * local[2] * local
    u = point / surface.radius - np.array([0.0, 0.0, 1.0])
    polar = math.acos(min(1.0, max(-1.0, -u[2])))
    if polar < EWALD_MIN_POLAR:
        raise ValidationError("Direction falls inside the unsampled cap around the origin")
    return np.array([polar, math.atan2(u[1], u[0]) % TWO_PI])


class Pattern:
    """Sampled |phi| and psi over a grid; arrays have the grid's shape"""

    def __init__(self, surface: ScanSurface, grid: Grid, lam: float,
                 abs_phi: np.ndarray, psi: Optional[np.ndarray] = None):
        abs_phi = np.asarray(abs_phi, dtype=float).reshape(grid.shape)
        if np.any(abs_phi < 0) or not np.all(np.isfinite(abs_phi)):
            raise ValidationError("|phi| values must be finite and non-negative")
        self.surface = surface
        self.grid = grid
        self.lam = float(lam)
        self.abs_phi = abs_phi
        self.sigma_norm = np.linalg.norm(sigma(surface, grid.points()), axis=1).reshape(grid.shape)
        self.psi = rescale(self.sigma_norm, abs_phi, lam) if psi is None else np.asarray(psi, dtype=float).reshape(grid.shape)

    def __repr__(self):
        return f"Pattern(surface={self.surface.kind!r}, grid={self.grid.counts}, lam={self.lam})"

    def is_consistent(self) -> bool:
        """psi recomputed from the stored |phi| matches bit-for-bit"""
        return bool(np.array_equal(rescale(self.sigma_norm, self.abs_phi, self.lam), self.psi))

    def metadata(self) -> Dict:
        """Sidecar dictionary"""
        return {
            'lambda': self.lam,
            'surface': self.surface.to_dict(),
            'grid': self.grid.to_dict(),
        }


def rescale(sigma_norm: np.ndarray, abs_phi: np.ndarray, lam: float) -> np.ndarray:
    """psi = |sigma| |phi| / lam"""
    return sigma_norm * abs_phi / lam


def simulate_pattern(P: PolytopeLike, surface: ScanSurface, grid: Optional[Grid] = None,
                     lam: float = 0.01, workers: int = 1, chunk: int = DEFAULT_CHUNK) -> Pattern:
    """
    Evaluate |phi_{P,sigma(t)}(lam)| at every grid point.

    The grid is split into fixed-size chunks evaluated on a thread pool; the
    results are assembled in grid order, so the pattern does not depend on
    the number of workers.
    """
    if P.dim != surface.dim:
        raise ValidationError(f"Polytope has dim {P.dim} but surface {surface.kind} has dim {surface.dim}")
    if not 0 < lam <= 1:
        raise ValidationError(f"lambda must lie in (0, 1]; got {lam}")
    if workers < 1 or chunk < 1:
        raise ValidationError("workers and chunk must be positive")
    grid = grid or Grid.for_surface(surface)
    grid.check_within(surface)

    wavevectors = sigma(surface, grid.points()) / lam
    chunks = [wavevectors[start:start + chunk] for start in range(0, len(wavevectors), chunk)]
    logger.debug("Simulating %d grid points in %d chunks on %d workers", grid.size, len(chunks), workers)

    def evaluate(block: np.ndarray) -> np.ndarray:
        return np.abs(np.atleast_1d(fourier_transform(P, block)))

    if workers == 1 or len(chunks) == 1:
        results = [evaluate(block) for block in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(evaluate, chunks))

    abs_phi = np.concatenate(results).reshape(grid.shape)
    return Pattern(surface, grid, lam, abs_phi)
