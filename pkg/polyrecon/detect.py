"""
Facet-indicator extraction from a simulated pattern.

Both methods look for local maxima of psi above a threshold theta; each
maximum t_j yields the unsigned normal sigma(t_j)/|sigma(t_j)| and the area
estimate psi(t_j). Neighbourhoods respect the wrap of the scan domain: the
semicircle and the hemisphere's polar axis are periodic with period pi, and
crossing the hemisphere's azimuth boundary mirrors the polar index.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import squareform

from polyrecon.constants import (
    DEFAULT_CLUSTER_CELLS,
    DEFAULT_THETA_FRACTION,
    DEFAULT_WINDOW,
    DETECTION_METHODS,
    METHOD_CLUSTER,
    METHOD_SMOOTH,
    SAME_DIRECTION_TOL,
)
from polyrecon.exceptions import ValidationError
from polyrecon.models import FacetIndicatorSet, IndicatorEntry
from polyrecon.scan import WRAP_FLIP, WRAP_NONE, WRAP_PERIODIC, Pattern, sigma

logger = logging.getLogger(__name__)


class DetectionConfig:
    """Peak extraction settings"""

    def __init__(self, method: str = METHOD_SMOOTH, theta: Optional[float] = None,
                 window: int = DEFAULT_WINDOW, cluster_radius: Optional[float] = None):
        if method not in DETECTION_METHODS:
            raise ValidationError(f"Unknown detection method {method!r}; expected one of {DETECTION_METHODS}")
        if theta is not None and not theta > 0:
            raise ValidationError(f"theta must be positive; got {theta}")
        if int(window) != window or window < 1 or window % 2 == 0:
            raise ValidationError(f"Smoothing window must be an odd integer >= 1; got {window}")
        if cluster_radius is not None and not cluster_radius > 0:
            raise ValidationError(f"Cluster radius must be positive; got {cluster_radius}")

        self.method = method
        self.theta = theta
        self.window = int(window)
        self.cluster_radius = cluster_radius

    def __repr__(self):
        return (f"DetectionConfig(method={self.method!r}, theta={self.theta}, "
                f"window={self.window}, cluster_radius={self.cluster_radius})")

    def threshold(self, pattern: Pattern) -> float:
        """Configured theta, or a fraction of the largest psi"""
        if self.theta is not None:
            return self.theta
        return DEFAULT_THETA_FRACTION * float(pattern.psi.max())

    def radius(self, pattern: Pattern) -> float:
        """Configured cluster radius, or a few grid cells"""
        if self.cluster_radius is not None:
            return self.cluster_radius
        return DEFAULT_CLUSTER_CELLS * max(pattern.grid.spacing())


def _axis_wraps(pattern: Pattern) -> Tuple[str, ...]:
    covered = pattern.grid.covers(pattern.surface)
    return tuple(wrap if full else WRAP_NONE for wrap, full in zip(pattern.surface.wraps, covered))


def _padded_index(pattern: Pattern, pad: int) -> Tuple[Tuple[np.ndarray, ...], np.ndarray]:
    """
    Index arrays mapping a padded grid onto original cells.

    Returns the per-axis index arrays (for fancy indexing) and a mask that is
    False where a non-wrapping axis runs off the grid; such cells are clamped
    to the nearest edge.
    """
    counts = pattern.grid.counts
    wraps = _axis_wraps(pattern)
    extended = np.meshgrid(*[np.arange(-pad, count + pad) for count in counts], indexing='ij')
    valid = np.ones(extended[0].shape, dtype=bool)

    indices = []
    for axis, (raw, count, wrap) in enumerate(zip(extended, counts, wraps)):
        if wrap == WRAP_NONE:
            valid &= (raw >= 0) & (raw < count)
            indices.append(np.clip(raw, 0, count - 1))
        else:
            indices.append(raw % count)

    for axis, wrap in enumerate(wraps):
        if wrap == WRAP_FLIP:
            # each crossing of this axis mirrors the polar index i -> (N - i) % N
            crossings = np.floor_divide(extended[axis], counts[axis])
            odd = crossings % 2 == 1
            indices[0] = np.where(odd, (counts[0] - indices[0]) % counts[0], indices[0])

    return tuple(indices), valid


def _pad(field: np.ndarray, index: Tuple[np.ndarray, ...], valid: np.ndarray,
         fill: Optional[float] = None) -> np.ndarray:
    padded = field[index]
    if fill is not None:
        padded = np.where(valid, padded, fill)
    return padded


def _crop(padded: np.ndarray, pad: int) -> np.ndarray:
    if pad == 0:
        return padded
    return padded[tuple(slice(pad, -pad) for _ in range(padded.ndim))]


def smooth(pattern: Pattern, window: int) -> np.ndarray:
    """Box-filtered psi with wrap-aware borders"""
    if any(window >= count for count in pattern.grid.counts):
        raise ValidationError(f"Smoothing window {window} does not fit grid {pattern.grid.counts}")
    pad = window // 2
    index, valid = _padded_index(pattern, pad)
    padded = _pad(pattern.psi, index, valid)
    return _crop(ndimage.uniform_filter(padded, size=window, mode='nearest'), pad)


def local_maxima(pattern: Pattern, field: np.ndarray, theta: float) -> np.ndarray:
    """Cells not exceeded by any neighbour and above theta"""
    index, valid = _padded_index(pattern, 1)
    padded = _pad(field, index, valid, fill=-np.inf)
    neighbourhood = ndimage.maximum_filter(padded, size=3, mode='constant', cval=-np.inf)
    peaks = _crop(padded == neighbourhood, 1)
    return peaks & (field > theta)


def _plateaus(pattern: Pattern, mask: np.ndarray) -> List[np.ndarray]:
    """Connected groups of masked cells as arrays of flat indices, linked across wraps"""
    if not mask.any():
        return []
    index, valid = _padded_index(pattern, 1)
    padded = _pad(mask, index, valid, fill=False)
    labels, count = ndimage.label(padded, structure=np.ones((3,) * mask.ndim))

    original = np.ravel_multi_index(index, pattern.grid.counts)
    members = labels > 0
    label_ids = labels[members] - 1
    cell_ids = original[members]

    # bipartite graph: label nodes first, then one node per grid cell
    nodes = count + mask.size
    graph = coo_matrix((np.ones(len(label_ids)), (label_ids, count + cell_ids)), shape=(nodes, nodes))
    _, component = connected_components(graph, directed=False)

    flat = np.flatnonzero(mask)
    groups = {}
    for cell in flat:
        groups.setdefault(component[count + cell], []).append(cell)
    return [np.array(cells) for _, cells in sorted(groups.items(), key=lambda item: item[1][0])]


def _directions(pattern: Pattern, flat: np.ndarray) -> np.ndarray:
    points = pattern.grid.points()[flat]
    vectors = np.atleast_2d(sigma(pattern.surface, points))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def _snap(pattern: Pattern, cell: int, window: int) -> int:
    """Flat index of the raw psi maximum inside the window centred on `cell`"""
    pad = window // 2
    index, valid = _padded_index(pattern, pad)
    centre = np.unravel_index(cell, pattern.grid.counts)
    block = tuple(slice(c, c + window) for c in centre)
    candidates = np.ravel_multi_index(tuple(i[block] for i in index), pattern.grid.counts)[valid[block]]
    values = pattern.psi.ravel()[candidates]
    return int(candidates[int(np.argmax(values))])


def _indicator_set(pattern: Pattern, cells: List[int]) -> FacetIndicatorSet:
    """Entries for the chosen cells, merging duplicate directions"""
    dim = pattern.surface.dim
    if not cells:
        return FacetIndicatorSet(dim, [])

    cells = np.array(cells)
    directions = _directions(pattern, cells)
    heights = pattern.psi.ravel()[cells]
    limit = 1.0 - SAME_DIRECTION_TOL

    kept: List[int] = []
    for k in np.argsort(-heights, kind='stable'):
        if heights[k] <= 0:
            continue
        if any(directions[k] @ directions[j] > limit for j in kept):
            logger.debug("Merging duplicate detection at cell %d", cells[k])
            continue
        kept.append(int(k))
    kept.sort(key=lambda k: cells[k])

    for a, i in enumerate(kept):
        for j in kept[a + 1:]:
            if directions[i] @ directions[j] < -limit:
                logger.warning("Antipodal detections at cells %d and %d; input is not facet-generic",
                               cells[i], cells[j])

    entries = [IndicatorEntry(directions[k], float(heights[k])) for k in kept]
    return FacetIndicatorSet(dim, entries)


def detect_smooth(pattern: Pattern, cfg: DetectionConfig) -> FacetIndicatorSet:
    """
    Peaks of the box-smoothed psi field.

    Each plateau of smoothed local maxima above theta gives one entry: the
    location is the smoothed maximum snapped to the raw maximum inside the
    window, and the area is the raw psi there.
    """
    theta = cfg.threshold(pattern)
    smoothed = smooth(pattern, cfg.window)
    if theta <= 0:
        return FacetIndicatorSet(pattern.surface.dim, [])

    cells = []
    for group in _plateaus(pattern, local_maxima(pattern, smoothed, theta)):
        best = int(group[int(np.argmax(smoothed.ravel()[group]))])
        cells.append(_snap(pattern, best, cfg.window))

    result = _indicator_set(pattern, cells)
    logger.debug("Smoothing detector found %d peaks above theta=%.4g", result.f, theta)
    return result


def parameter_distances(pattern: Pattern, flat: np.ndarray) -> np.ndarray:
    """
    Pairwise distances between grid cells in scan-parameter space.

    Periodic axes take the shorter way round. Across a flipping axis the
    polar coordinate is mirrored, the same identification local_maxima uses.
    """
    points = pattern.grid.points()[flat]
    wraps = _axis_wraps(pattern)
    domain = pattern.surface.domain
    periods = [hi - lo for lo, hi in domain]

    def gap(a: np.ndarray, b: np.ndarray, axis: int) -> np.ndarray:
        delta = np.abs(a[:, None, axis] - b[None, :, axis])
        if wraps[axis] == WRAP_PERIODIC:
            delta = np.minimum(delta, periods[axis] - delta)
        return delta

    squared = sum(gap(points, points, axis) ** 2 for axis in range(points.shape[1]))
    for flip, wrap in enumerate(wraps):
        if wrap != WRAP_FLIP:
            continue
        mirrored = points.copy()
        lo = domain[0][0]
        mirrored[:, 0] = lo + (periods[0] - (points[:, 0] - lo)) % periods[0]
        across = np.zeros_like(squared)
        for axis in range(points.shape[1]):
            if axis == flip:
                across += (periods[axis] - np.abs(points[:, None, axis] - points[None, :, axis])) ** 2
            else:
                across += gap(points, mirrored, axis) ** 2
        squared = np.minimum(squared, across)

    distances = np.sqrt(squared)
    np.fill_diagonal(distances, 0.0)
    return distances


def detect_cluster(pattern: Pattern, cfg: DetectionConfig) -> FacetIndicatorSet:
    """
    Single-linkage clusters of raw local maxima.

    Distances are measured between scan parameters (see
    parameter_distances), so the cluster radius is in the units of t. Every
    cluster contributes the member with the largest psi.
    """
    theta = cfg.threshold(pattern)
    if theta <= 0:
        return FacetIndicatorSet(pattern.surface.dim, [])

    flat = np.flatnonzero(local_maxima(pattern, pattern.psi, theta))
    if len(flat) == 0:
        return FacetIndicatorSet(pattern.surface.dim, [])

    if len(flat) == 1:
        labels = np.array([1])
    else:
        distances = parameter_distances(pattern, flat)
        tree = linkage(squareform(distances, checks=False), method='single')
        labels = fcluster(tree, t=cfg.radius(pattern), criterion='distance')

    psi = pattern.psi.ravel()
    cells = []
    for label in np.unique(labels):
        members = flat[labels == label]
        cells.append(int(members[int(np.argmax(psi[members]))]))

    result = _indicator_set(pattern, cells)
    logger.debug("Cluster detector found %d peaks from %d maxima", result.f, len(flat))
    return result


def detect(pattern: Pattern, cfg: Optional[DetectionConfig] = None) -> FacetIndicatorSet:
    """Run the configured detection method"""
    cfg = cfg or DetectionConfig()
    if cfg.method == METHOD_CLUSTER:
        return detect_cluster(pattern, cfg)
    return detect_smooth(pattern, cfg)
