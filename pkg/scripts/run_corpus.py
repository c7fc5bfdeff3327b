#!/usr/bin/env python3
"""
Round trip every fixture in the regression corpus: simulate the pattern,
detect facet indicators, reconstruct, and compare with the source polytope.

Usage:
    python scripts/run_corpus.py [--lambda 0.01] [--seed 0] [--workers 4]
"""

import argparse
import logging
import os
import sys
import traceback
from datetime import datetime

# Add parent directory to path to import polyrecon
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from polyrecon import create_config
from polyrecon.detect import DetectionConfig, detect
from polyrecon.exceptions import PolyreconError
from polyrecon.fixtures import make_fixture
from polyrecon.models import FacetIndicatorSet
from polyrecon.reconstruct import reconstruct
from polyrecon.scan import Grid, ScanSurface, simulate_pattern
from polyrecon.utils import indicator_errors, vertex_errors

# Facet-generic fixtures whose normals sit on grid points, with the factor
# applied to the default grid
CORPUS = [
    ('triangle', 1),
    ('hexagon', 1),
    ('grid-tetrahedron', 1),
    ('grid-pyramid', 2),
]

# Relative facet-area band for the detection path
AREA_BAND = 0.05
# Simplex vertex error band, relative to the diameter
VERTEX_BAND = 0.02


def check_fixture(name, refine, config):
    """
    Run one fixture through the pipeline.
    Returns a dict of measured errors; raises on pipeline failure or when a
    band is exceeded.
    """
    P = make_fixture(name, config['SEED'])
    truth = FacetIndicatorSet.from_polytope(P)
    surface = ScanSurface.for_dim(P.dim)
    count = refine * (config['GRID_2D'] if P.dim == 2 else config['GRID_3D'])
    grid = Grid.for_surface(surface, [count])

    pattern = simulate_pattern(P, surface, grid, lam=config['LAMBDA'], workers=config['WORKERS'])
    indicators = detect(pattern, DetectionConfig(method=config['METHOD'], window=config['WINDOW']))
    if indicators.f != truth.f:
        raise PolyreconError(f"detected {indicators.f} facets; expected {truth.f}")

    best = reconstruct(indicators, tol=config['TOL'])[0]
    rebuilt = indicator_errors(truth, FacetIndicatorSet.from_polytope(best.polytope))
    result = {
        'method': best.method,
        'area_error': rebuilt['max_area_error'],
        'angle_deg': rebuilt['max_angle_deg'],
    }
    if rebuilt['unmatched'] or rebuilt['max_area_error'] > AREA_BAND:
        raise PolyreconError(f"facet areas off by {100 * rebuilt['max_area_error']:.2f}%")

    if best.method == 'simplex':
        result['vertex_error'] = vertex_errors(P.vertices, best.polytope.vertices)['relative']
        if result['vertex_error'] > VERTEX_BAND:
            raise PolyreconError(f"vertex error {100 * result['vertex_error']:.2f}% of diameter")
    return result


def run_corpus(config):
    """
    Check every corpus fixture.
    Returns tuple: (success_count, failure_count, errors)
    """
    success_count = 0
    failure_count = 0
    errors = []

    print(f"Running {len(CORPUS)} fixture(s) at lambda={config['LAMBDA']:g}, seed={config['SEED']}")
    print("-" * 80)

    for idx, (name, refine) in enumerate(CORPUS, 1):
        print(f"\n[{idx}/{len(CORPUS)}] {name}")
        try:
            result = check_fixture(name, refine, config)
            line = f"  ✓ {result['method']}: areas within {100 * result['area_error']:.2f}%, " \
                   f"normals within {result['angle_deg']:.3f} deg"
            if 'vertex_error' in result:
                line += f", vertices within {100 * result['vertex_error']:.3f}% of diameter"
            print(line)
            success_count += 1
        except PolyreconError as e:
            print(f"  ✗ Failed: {e}")
            errors.append({'fixture': name, 'error': str(e)})
            failure_count += 1

    return success_count, failure_count, errors


def main():
    """Main entry point for the script"""
    parser = argparse.ArgumentParser(description='Round trip the fixture corpus')
    parser.add_argument('--lambda', dest='lam', type=float)
    parser.add_argument('--seed', type=int)
    parser.add_argument('--workers', type=int)
    args = parser.parse_args()

    config = create_config()
    if args.lam is not None:
        config['LAMBDA'] = args.lam
    if args.seed is not None:
        config['SEED'] = args.seed
    if args.workers is not None:
        config['WORKERS'] = args.workers
    logging.basicConfig(level=getattr(logging, config['LOG_LEVEL'], logging.WARNING))

    print("=" * 80)
    print("Polytope Reconstruction Corpus")
    print(f"Started at: {datetime.now().isoformat()}")
    print("=" * 80)

    try:
        success_count, failure_count, errors = run_corpus(config)

        print("\n" + "=" * 80)
        print("Summary")
        print("=" * 80)
        print(f"Passed fixtures: {success_count}")
        print(f"Failed fixtures: {failure_count}")

        if errors:
            print("\nErrors encountered:")
            for error in errors:
                print(f"  - {error['fixture']}: {error['error']}")

        print(f"\nCompleted at: {datetime.now().isoformat()}")
        print("=" * 80)

        sys.exit(1 if failure_count > 0 else 0)

    except Exception as e:
        print(f"\nFatal error: {str(e)}")
        traceback.print_exc()
        sys.exit(1)


if __name__ == '__main__':
    main()
