"""
Data models for facet indicators and pipeline runs
"""
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from polyrecon.constants import SAME_DIRECTION_TOL
from polyrecon.exceptions import ValidationError

logger = logging.getLogger(__name__)


class IndicatorEntry:
    """One (unit normal, area) pair; the sign of the normal is unknown"""

    def __init__(self, normal: Sequence[float], area: float):
        vector = np.array(normal, dtype=float)
        if vector.ndim != 1 or not np.all(np.isfinite(vector)):
            raise ValidationError(f"Indicator normal must be a finite vector; got {normal!r}")
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise ValidationError("Indicator normal must be nonzero")
        if not np.isfinite(area) or area <= 0:
            raise ValidationError(f"Indicator area must be positive; got {area}")

        vector = vector / norm
        vector.setflags(write=False)
        self.normal = vector
        self.area = float(area)

    def __repr__(self):
        return f"IndicatorEntry(normal={self.normal.tolist()}, area={self.area:.6g})"

    @classmethod
    def from_dict(cls, data: Dict):
        """Create IndicatorEntry from dictionary"""
        return cls(normal=data['normal'], area=data['area'])

    def to_dict(self) -> Dict:
        """Convert to dictionary"""
        return {
            'normal': self.normal.tolist(),
            'area': self.area,
        }


class FacetIndicatorSet:
    """
    Facet-indicator set: unsigned unit normals with their facet areas.

    Two entries pointing the same way are always rejected. With strict=True
    antipodal pairs are rejected too, since a facet-generic polytope never
    produces them.
    """

    def __init__(self, dim: int, entries: Sequence[IndicatorEntry], strict: bool = False):
        if dim < 2:
            raise ValidationError(f"dim must be at least 2; got {dim}")
        self.dim = int(dim)
        self.entries: Tuple[IndicatorEntry, ...] = tuple(entries)

        for index, entry in enumerate(self.entries):
            if entry.normal.shape != (self.dim,):
                raise ValidationError(
                    f"Entry {index} normal has {entry.normal.shape[0]} components; dim is {self.dim}"
                )

        if len(self.entries) > 1:
            dots = self.normals @ self.normals.T
            np.fill_diagonal(dots, 0.0)
            limit = 1.0 - SAME_DIRECTION_TOL
            if dots.max() > limit:
                i, j = np.unravel_index(int(np.argmax(dots)), dots.shape)
                raise ValidationError(f"Entries {i} and {j} have the same normal direction")
            if strict and (-dots).max() > limit:
                i, j = np.unravel_index(int(np.argmax(-dots)), dots.shape)
                raise ValidationError(f"Entries {i} and {j} are antipodal; the input is not facet-generic")

    def __repr__(self):
        return f"FacetIndicatorSet(dim={self.dim}, f={self.f})"

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[IndicatorEntry]:
        return iter(self.entries)

    def __getitem__(self, index: int) -> IndicatorEntry:
        return self.entries[index]

    @property
    def f(self) -> int:
        return len(self.entries)

    @property
    def normals(self) -> np.ndarray:
        return np.array([entry.normal for entry in self.entries]).reshape(-1, self.dim)

    @property
    def areas(self) -> np.ndarray:
        return np.array([entry.area for entry in self.entries])

    @classmethod
    def from_arrays(cls, normals, areas, strict: bool = False) -> 'FacetIndicatorSet':
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        entries = [IndicatorEntry(normal, area) for normal, area in zip(normals, areas)]
        return cls(normals.shape[1], entries, strict=strict)

    @classmethod
    def from_polytope(cls, P, signs: Optional[Sequence[int]] = None) -> 'FacetIndicatorSet':
        """Exact indicator set of a polytope, optionally with normal signs flipped"""
        from polyrecon.geometry import facet_data

        facets = facet_data(P)
        signs = [1] * len(facets) if signs is None else list(signs)
        entries = [IndicatorEntry(sign * facet.normal, facet.area) for sign, facet in zip(signs, facets)]
        return cls(P.dim, entries)

    @classmethod
    def from_dict(cls, data: Dict) -> 'FacetIndicatorSet':
        """Create FacetIndicatorSet from dictionary"""
        try:
            entries = [IndicatorEntry.from_dict(entry) for entry in data['entries']]
            return cls(dim=data['dim'], entries=entries)
        except KeyError as e:
            raise ValidationError(f"Indicator JSON is missing field {e}") from e
        except TypeError as e:
            raise ValidationError(f"Indicator JSON is malformed: {e}") from e

    def to_dict(self) -> Dict:
        """Convert to dictionary"""
        return {
            'dim': self.dim,
            'entries': [entry.to_dict() for entry in self.entries],
        }


class RunConfig:
    """Resolved settings for one CLI run"""

    def __init__(self, subcommand: str, input_path: Optional[str] = None,
                 output_path: Optional[str] = None, lam: float = 0.01,
                 surface: Optional[str] = None, grid: Optional[List[int]] = None,
                 method: str = 'smooth', theta: Optional[float] = None,
                 window: int = 5, cluster_radius: Optional[float] = None,
                 tol: float = 1e-2, seed: int = 0, workers: int = 1,
                 export: Optional[str] = None, extra: Optional[Dict] = None):
        self.subcommand = subcommand
        self.input_path = input_path
        self.output_path = output_path
        self.lam = lam
        self.surface = surface
        self.grid = list(grid) if grid else None
        self.method = method
        self.theta = theta
        self.window = window
        self.cluster_radius = cluster_radius
        self.tol = tol
        self.seed = seed
        self.workers = workers
        self.export = export
        self.extra = extra or {}

    def __repr__(self):
        return f"RunConfig(subcommand={self.subcommand!r}, lam={self.lam}, surface={self.surface!r})"

    def validate(self):
        """Raise ValidationError when a setting is outside its domain"""
        if not self.lam > 0:
            raise ValidationError(f"lambda must be positive; got {self.lam}")
        if self.theta is not None and not self.theta > 0:
            raise ValidationError(f"theta must be positive; got {self.theta}")
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive; got {self.tol}")
        if self.workers < 1:
            raise ValidationError(f"workers must be at least 1; got {self.workers}")
        if self.grid is not None and any(count < 2 for count in self.grid):
            raise ValidationError(f"Grid counts must be at least 2; got {self.grid}")
        if self.input_path and self.output_path and self.input_path == self.output_path:
            raise ValidationError("Input and output paths must differ")

    @classmethod
    def from_dict(cls, data: Dict):
        """Create RunConfig from dictionary"""
        return cls(
            subcommand=data['subcommand'],
            input_path=data.get('input_path'),
            output_path=data.get('output_path'),
            lam=data.get('lambda', 0.01),
            surface=data.get('surface'),
            grid=data.get('grid'),
            method=data.get('method', 'smooth'),
            theta=data.get('theta'),
            window=data.get('window', 5),
            cluster_radius=data.get('cluster_radius'),
            tol=data.get('tol', 1e-2),
            seed=data.get('seed', 0),
            workers=data.get('workers', 1),
            export=data.get('export'),
            extra=data.get('extra'),
        )

    def to_dict(self) -> Dict:
        """Convert to dictionary"""
        return {
            'subcommand': self.subcommand,
            'input_path': self.input_path,
            'output_path': self.output_path,
            'lambda': self.lam,
            'surface': self.surface,
            'grid': self.grid,
            'method': self.method,
            'theta': self.theta,
            'window': self.window,
            'cluster_radius': self.cluster_radius,
            'tol': self.tol,
            'seed': self.seed,
            'workers': self.workers,
            'export': self.export,
            'extra': self.extra,
        }
