"""
Utility functions for comparing reconstructions with their sources
"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import directed_hausdorff

from polyrecon.models import FacetIndicatorSet


def match_indicators(reference: FacetIndicatorSet, candidate: FacetIndicatorSet,
                     signed: bool = False) -> List[Tuple[int, int]]:
    """
    Pair up entries of two indicator sets by normal direction

    Args:
        reference: Indicator set taken as ground truth
        candidate: Indicator set to compare
        signed: Compare oriented normals instead of unsigned directions

    Returns:
        List of (reference index, candidate index) pairs, sorted by reference index
    """
    if reference.f == 0 or candidate.f == 0:
        return []
    dots = reference.normals @ candidate.normals.T
    similarity = dots if signed else np.abs(dots)
    rows, cols = linear_sum_assignment(-similarity)
    return sorted(zip(rows.tolist(), cols.tolist()))


def indicator_errors(reference: FacetIndicatorSet, candidate: FacetIndicatorSet) -> Dict:
    """
    Per-facet area and normal errors between matched entries

    Args:
        reference: Indicator set taken as ground truth
        candidate: Indicator set to compare

    Returns:
        Dictionary with per-pair rows, maximum relative area error, maximum
        normal angle in degrees and the number of unmatched reference entries
    """
    rows = []
    for i, j in match_indicators(reference, candidate):
        expected = reference[i]
        found = candidate[j]
        cosine = min(1.0, abs(float(expected.normal @ found.normal)))
        rows.append({
            'reference': i,
            'candidate': j,
            'area': expected.area,
            'found_area': found.area,
            'area_error': abs(found.area - expected.area) / expected.area,
            'angle_deg': float(np.degrees(np.arccos(cosine))),
        })

    return {
        'pairs': rows,
        'max_area_error': max((row['area_error'] for row in rows), default=0.0),
        'max_angle_deg': max((row['angle_deg'] for row in rows), default=0.0),
        'unmatched': reference.f - len(rows),
    }


def area_residual(P, indicators: FacetIndicatorSet) -> float:
    """
    Largest relative facet-area error of a polytope against an indicator set

    Args:
        P: Polytope or Simplex
        indicators: Target normals and areas

    Returns:
        Max over entries of |A_P - A| / A; 1.0 when the facet counts differ
    """
    found = FacetIndicatorSet.from_polytope(P)
    errors = indicator_errors(indicators, found)
    if errors['unmatched'] or found.f != indicators.f:
        return 1.0
    return errors['max_area_error']


def align_up_to_reflection(reference: np.ndarray, candidate: np.ndarray) -> Tuple[np.ndarray, float, int]:
    """
    Align a vertex set to a reference by translation and optional point reflection

    Args:
        reference: Reference vertices, shape (k, n)
        candidate: Vertices to align, shape (m, n)

    Returns:
        (aligned candidate vertices, symmetric Hausdorff distance, sign used)
    """
    reference = np.asarray(reference, dtype=float)
    candidate = np.asarray(candidate, dtype=float)
    best: Optional[Tuple[np.ndarray, float, int]] = None

    for sign in (1, -1):
        flipped = sign * candidate
        aligned = flipped - flipped.mean(axis=0) + reference.mean(axis=0)
        distance = max(directed_hausdorff(reference, aligned)[0], directed_hausdorff(aligned, reference)[0])
        if best is None or distance < best[1]:
            best = (aligned, distance, sign)

    return best


def format_indicator_report(errors: Dict, digits: int = 4) -> List[str]:
    """
    Render indicator errors as report lines

    Args:
        errors: Output of indicator_errors
        digits: Significant digits for numbers

    Returns:
        List of printable lines
    """
    lines = []
    for row in errors['pairs']:
        lines.append(
            f"  facet {row['reference']:>2}: area {row['area']:.{digits}g} -> {row['found_area']:.{digits}g} "
            f"({100 * row['area_error']:.2f}%), normal off by {row['angle_deg']:.3f} deg"
        )
    if errors['unmatched']:
        lines.append(f"  {errors['unmatched']} facet(s) not recovered")
    return lines


def vertex_errors(reference: Sequence, candidate: Sequence) -> Dict:
    """
    Post-alignment vertex error of a reconstruction

    Args:
        reference: Reference vertices
        candidate: Reconstructed vertices

    Returns:
        Dictionary with the Hausdorff distance, the same distance relative
        to the reference diameter, and the reflection sign used
    """
    reference = np.asarray(reference, dtype=float)
    _, distance, sign = align_up_to_reflection(reference, candidate)
    diffs = reference[:, None, :] - reference[None, :, :]
    diameter = float(np.sqrt((diffs ** 2).sum(axis=-1)).max())
    return {
        'hausdorff': distance,
        'relative': distance / diameter if diameter > 0 else float('inf'),
        'reflected': sign == -1,
    }
