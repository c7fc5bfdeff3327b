"""
File interchange: polytope and indicator JSON, pattern CSV with JSON sidecar
"""
import json
import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np

from polyrecon.exceptions import StorageError, ValidationError
from polyrecon.geometry import Polytope
from polyrecon.models import FacetIndicatorSet
from polyrecon.scan import Grid, Pattern, ScanSurface

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CSV_FORMAT = '%.17g'


def _read_json(path: PathLike) -> Dict:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}") from e
    except OSError as e:
        raise StorageError(f"Cannot read {path}: {e}") from e


def _write_json(data: Dict, path: PathLike):
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2)
            f.write('\n')
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e


def load_config(path: PathLike) -> Dict:
    """Run settings from a JSON object"""
    data = _read_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path} must hold a JSON object")
    return data


def load_polytope(path: PathLike) -> Polytope:
    return Polytope.from_dict(_read_json(path))


def save_polytope(P, path: PathLike):
    _write_json(P.to_dict(), path)
    logger.debug("Wrote polytope to %s", path)


def load_indicators(path: PathLike) -> FacetIndicatorSet:
    return FacetIndicatorSet.from_dict(_read_json(path))


def save_indicators(indicators: FacetIndicatorSet, path: PathLike):
    _write_json(indicators.to_dict(), path)
    logger.debug("Wrote %d indicator entries to %s", indicators.f, path)


def sidecar_path(csv_path: PathLike) -> Path:
    """Metadata file stored next to a pattern CSV"""
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + '.meta.json')


def save_pattern(pattern: Pattern, csv_path: PathLike):
    """
    Write a pattern as CSV (t1[,t2],abs_phi,psi; row-major over the grid) and
    its lambda, surface and grid to the sidecar.
    """
    points = pattern.grid.points()
    columns = [f"t{k + 1}" for k in range(points.shape[1])] + ['abs_phi', 'psi']
    table = np.column_stack([points, pattern.abs_phi.ravel(), pattern.psi.ravel()])
    try:
        np.savetxt(csv_path, table, fmt=CSV_FORMAT, delimiter=',', header=','.join(columns), comments='')
    except OSError as e:
        raise StorageError(f"Cannot write {csv_path}: {e}") from e
    _write_json(pattern.metadata(), sidecar_path(csv_path))
    logger.debug("Wrote %d pattern rows to %s", len(table), csv_path)


def load_pattern(csv_path: PathLike) -> Pattern:
    """Read a pattern back and check it against its sidecar"""
    meta = _read_json(sidecar_path(csv_path))
    try:
        surface = ScanSurface.from_dict(meta['surface'])
        grid = Grid.from_dict(meta['grid'])
        lam = float(meta['lambda'])
    except (KeyError, TypeError) as e:
        raise ValidationError(f"Pattern sidecar for {csv_path} is malformed: {e}") from e

    try:
        with open(csv_path, 'r', encoding='utf-8') as f:
            header = f.readline().strip().split(',')
        table = np.loadtxt(csv_path, delimiter=',', skiprows=1, ndmin=2)
    except OSError as e:
        raise StorageError(f"Cannot read {csv_path}: {e}") from e
    except ValueError as e:
        raise ValidationError(f"{csv_path} holds non-numeric data: {e}") from e

    axes = len(grid.counts)
    expected = [f"t{k + 1}" for k in range(axes)] + ['abs_phi', 'psi']
    if header != expected:
        raise ValidationError(f"{csv_path} header is {header}; expected {expected}")
    if table.shape != (grid.size, axes + 2):
        raise ValidationError(f"{csv_path} has {table.shape[0]} rows; the grid needs {grid.size}")
    if not np.allclose(table[:, :axes], grid.points(), rtol=0, atol=1e-12):
        raise ValidationError(f"{csv_path} parameter columns do not match the sidecar grid")

    pattern = Pattern(surface, grid, lam, table[:, axes], table[:, axes + 1])
    if not pattern.is_consistent():
        logger.warning("psi column of %s differs from |sigma| |phi| / lambda", csv_path)
    return pattern
