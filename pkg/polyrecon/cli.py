"""
Command-line pipeline: simulate, detect, reconstruct, roundtrip, fixture.

Settings resolve as: explicit flag > --config JSON file > environment
(including .env) > built-in default.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from polyrecon import create_config
from polyrecon.constants import EXIT_OK, SURFACE_ALIASES, SURFACE_KINDS
from polyrecon.detect import DetectionConfig, detect
from polyrecon.exceptions import DetectionEmptyError, PolyreconError, StageError, ValidationError
from polyrecon.export import export_shape, psi_curve_to_svg, write_text
from polyrecon.fixtures import FIXTURES, make_fixture
from polyrecon.models import FacetIndicatorSet, RunConfig
from polyrecon.reconstruct import reconstruct
from polyrecon.scan import Grid, ScanSurface, simulate_pattern
from polyrecon.storage import (
    load_config,
    load_indicators,
    load_pattern,
    load_polytope,
    save_indicators,
    save_pattern,
    save_polytope,
)
from polyrecon.utils import format_indicator_report, indicator_errors, vertex_errors

logger = logging.getLogger(__name__)

# config-file key -> RunConfig attribute
_SETTINGS = {
    'lambda': 'lam',
    'surface': 'surface',
    'grid': 'grid',
    'method': 'method',
    'theta': 'theta',
    'window': 'window',
    'cluster_radius': 'cluster_radius',
    'tol': 'tol',
    'seed': 'seed',
    'workers': 'workers',
}


def _add_settings(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='JSON file with run settings')
    parser.add_argument('--lambda', dest='lam', type=float, help='wavelength (default 0.01)')
    parser.add_argument('--surface', choices=sorted(SURFACE_ALIASES) + list(SURFACE_KINDS))
    parser.add_argument('--grid', type=int, nargs='+', help='samples per axis; one value applies to all axes')
    parser.add_argument('--method', choices=['smooth', 'cluster'])
    parser.add_argument('--theta', type=float, help='peak threshold (default 0.3 x max psi)')
    parser.add_argument('--window', type=int, help='smoothing window, odd')
    parser.add_argument('--cluster-radius', dest='cluster_radius', type=float, help='radians')
    parser.add_argument('--tol', type=float, help='relative closure tolerance for sign resolution')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--workers', type=int)
    parser.add_argument('-o', '--output', help='output path')
    parser.add_argument('-v', '--verbose', action='count', default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='polyrecon',
        description='Simulate polytope scattering patterns, detect facets and reconstruct the polytope.',
    )
    commands = parser.add_subparsers(dest='subcommand', required=True)

    simulate = commands.add_parser('simulate', help='write the |phi| / psi pattern of a polytope')
    simulate.add_argument('--poly', required=True, help='polytope JSON')
    simulate.add_argument('--psi-svg', dest='psi_svg', help='also write the psi curve as SVG (2D)')
    _add_settings(simulate)

    find = commands.add_parser('detect', help='extract facet indicators from a pattern')
    find.add_argument('--pattern', required=True, help='pattern CSV (sidecar alongside)')
    _add_settings(find)

    rebuild = commands.add_parser('reconstruct', help='reconstruct polytopes from facet indicators')
    rebuild.add_argument('--indicators', required=True, help='indicator JSON')
    rebuild.add_argument('--export', action='store_true', help='also write OBJ (3D) or SVG (2D)')
    _add_settings(rebuild)

    roundtrip = commands.add_parser('roundtrip', help='simulate, detect and reconstruct in one go')
    roundtrip.add_argument('--poly', required=True, help='polytope JSON')
    _add_settings(roundtrip)

    fixture = commands.add_parser('fixture', help='write a named or random polytope')
    fixture.add_argument('name', choices=sorted(FIXTURES))
    _add_settings(fixture)

    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge environment defaults, the optional config file and explicit flags"""
    env = create_config()
    cfg = RunConfig(
        subcommand=args.subcommand,
        lam=env['LAMBDA'],
        surface=env['SURFACE'],
        method=env['METHOD'],
        theta=env['THETA'],
        window=env['WINDOW'],
        cluster_radius=env['CLUSTER_RADIUS'],
        tol=env['TOL'],
        seed=env['SEED'],
        workers=env['WORKERS'],
        extra={'grid_2d': env['GRID_2D'], 'grid_3d': env['GRID_3D']},
    )

    if args.config:
        for key, value in load_config(args.config).items():
            if key not in _SETTINGS:
                raise ValidationError(f"Unknown setting {key!r} in {args.config}")
            setattr(cfg, _SETTINGS[key], value)

    for attribute in _SETTINGS.values():
        value = getattr(args, attribute, None)
        if value is not None:
            setattr(cfg, attribute, value)
    if isinstance(cfg.grid, int):
        cfg.grid = [cfg.grid]

    cfg.input_path = getattr(args, 'poly', None) or getattr(args, 'pattern', None) or getattr(args, 'indicators', None)
    cfg.output_path = args.output
    cfg.export = getattr(args, 'psi_svg', None) or ('shape' if getattr(args, 'export', False) else None)
    if getattr(args, 'name', None):
        cfg.extra['name'] = args.name
    cfg.validate()
    return cfg


def _require_output(cfg: RunConfig) -> str:
    if not cfg.output_path:
        raise ValidationError(f"{cfg.subcommand} needs --output")
    return cfg.output_path


def _surface_and_grid(cfg: RunConfig, dim: int):
    surface = ScanSurface(cfg.surface) if cfg.surface else ScanSurface.for_dim(dim)
    counts = cfg.grid or [cfg.extra['grid_2d'] if surface.dim == 2 else cfg.extra['grid_3d']]
    return surface, Grid.for_surface(surface, counts)


def _detection_config(cfg: RunConfig) -> DetectionConfig:
    return DetectionConfig(method=cfg.method, theta=cfg.theta, window=cfg.window,
                           cluster_radius=cfg.cluster_radius)


def _simulate(P, cfg: RunConfig):
    surface, grid = _surface_and_grid(cfg, P.dim)
    return simulate_pattern(P, surface, grid, lam=cfg.lam, workers=cfg.workers)


def _detect(pattern, cfg: RunConfig) -> FacetIndicatorSet:
    indicators = detect(pattern, _detection_config(cfg))
    if indicators.f == 0:
        raise DetectionEmptyError("No peaks above the threshold; lower --theta or refine the grid")
    return indicators


def cmd_simulate(cfg: RunConfig):
    output = _require_output(cfg)
    P = load_polytope(cfg.input_path)
    pattern = _simulate(P, cfg)
    save_pattern(pattern, output)
    print(f"✓ Wrote {pattern.grid.size} pattern rows to {output} (lambda={cfg.lam:g}, {pattern.surface.kind})")

    if cfg.export:
        write_text(psi_curve_to_svg(pattern, cfg.theta), cfg.export)
        print(f"✓ Wrote psi curve to {cfg.export}")
    return pattern


def cmd_detect(cfg: RunConfig) -> FacetIndicatorSet:
    output = _require_output(cfg)
    pattern = load_pattern(cfg.input_path)
    indicators = _detect(pattern, cfg)
    save_indicators(indicators, output)
    print(f"✓ Detected {indicators.f} facet indicator(s); wrote {output}")
    return indicators


def _suffixed(path: str, index: int, count: int) -> Path:
    path = Path(path)
    if count == 1:
        return path
    return path.with_name(f"{path.stem}_{index}{path.suffix}")


def cmd_reconstruct(cfg: RunConfig):
    output = _require_output(cfg)
    indicators = load_indicators(cfg.input_path)
    results = reconstruct(indicators, tol=cfg.tol)

    if len(results) > 1:
        print(f"→ {len(results)} sign assignments satisfy the closure condition; writing all of them")
    for index, result in enumerate(results, 1):
        path = _suffixed(output, index, len(results))
        save_polytope(result.polytope, path)
        print(f"✓ {result.method}: {len(result.polytope.vertices)} vertices, "
              f"area residual {result.residual:.2e} -> {path}")
        if cfg.export:
            shape_path = path.with_suffix('.obj' if result.polytope.dim == 3 else '.svg')
            export_shape(result.polytope, shape_path)
            print(f"  → exported {shape_path}")
    return results


def _stage(label: str, func, *args):
    try:
        return func(*args)
    except PolyreconError as e:
        raise StageError(label, e) from e


def cmd_roundtrip(cfg: RunConfig) -> Dict:
    P = load_polytope(cfg.input_path)
    truth = FacetIndicatorSet.from_polytope(P)

    pattern = _stage('simulate', _simulate, P, cfg)
    print(f"✓ Simulated {pattern.grid.size} points on {pattern.surface.kind} (lambda={cfg.lam:g})")

    indicators = _stage('detect', _detect, pattern, cfg)
    detection = indicator_errors(truth, indicators)
    print(f"✓ Detected {indicators.f} of {truth.f} facets")
    for line in format_indicator_report(detection):
        print(line)

    results = _stage('reconstruct', reconstruct, indicators, cfg.tol)
    best = results[0]
    rebuilt = indicator_errors(truth, FacetIndicatorSet.from_polytope(best.polytope))
    print(f"✓ Reconstructed with {best.method} ({len(results)} candidate(s))")
    for line in format_indicator_report(rebuilt):
        print(line)

    report = {
        'facets': truth.f,
        'detected': indicators.f,
        'candidates': len(results),
        'method': best.method,
        'detection_max_area_error': detection['max_area_error'],
        'detection_max_angle_deg': detection['max_angle_deg'],
        'reconstruction_max_area_error': rebuilt['max_area_error'],
        'unmatched': rebuilt['unmatched'],
    }
    if best.method == 'simplex':
        vertices = vertex_errors(P.vertices, best.polytope.vertices)
        report['vertex_error'] = vertices['relative']
        print(f"  vertex error after alignment: {100 * vertices['relative']:.3f}% of diameter")

    if cfg.output_path:
        write_text(json.dumps(report, indent=2) + "\n", cfg.output_path)
    return report


def cmd_fixture(cfg: RunConfig):
    output = _require_output(cfg)
    P = make_fixture(cfg.extra['name'], cfg.seed)
    save_polytope(P, output)
    print(f"✓ Wrote fixture {cfg.extra['name']} (dim {P.dim}, {len(P.facets)} facets) to {output}")
    return P


COMMANDS = {
    'simulate': cmd_simulate,
    'detect': cmd_detect,
    'reconstruct': cmd_reconstruct,
    'roundtrip': cmd_roundtrip,
    'fixture': cmd_fixture,
}


def _configure_logging(verbosity: int):
    env_level = create_config()['LOG_LEVEL']
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, env_level, logging.WARNING)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit code"""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    try:
        cfg = resolve_config(args)
        COMMANDS[cfg.subcommand](cfg)
    except PolyreconError as e:
        print(f"✗ {e}", file=sys.stderr)
        best = getattr(getattr(e, 'error', e), 'best_residual', None)
        if best is not None:
            print(f"  best closure residual: {best:.3e}", file=sys.stderr)
        return e.exit_code
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
