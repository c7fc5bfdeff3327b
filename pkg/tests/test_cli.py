import json
import math

import pytest

from polyrecon.cli import build_parser, main, resolve_config
from polyrecon.constants import EXIT_DETECTION_EMPTY, EXIT_INFEASIBLE, EXIT_IO, EXIT_OK, EXIT_VALIDATION
from polyrecon.fixtures import ambiguous_hexagons
from polyrecon.models import FacetIndicatorSet
from polyrecon.storage import load_indicators, load_polytope, save_indicators


def run(*argv):
    return main([str(arg) for arg in argv])


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / 'triangle.json'
    assert run('fixture', 'triangle', '-o', path) == EXIT_OK
    return path


def test_pipeline_on_unit_triangle(tmp_path, triangle_file, capsys):
    pattern = tmp_path / 'pattern.csv'
    indicators = tmp_path / 'indicators.json'
    rebuilt = tmp_path / 'rebuilt.json'

    assert run('simulate', '--poly', triangle_file, '-o', pattern, '--psi-svg', tmp_path / 'psi.svg') == EXIT_OK
    assert (tmp_path / 'pattern.meta.json').exists()
    assert (tmp_path / 'psi.svg').read_text().startswith('<svg')

    assert run('detect', '--pattern', pattern, '-o', indicators) == EXIT_OK
    assert load_indicators(indicators).f == 3

    assert run('reconstruct', '--indicators', indicators, '-o', rebuilt, '--export') == EXIT_OK
    assert load_polytope(rebuilt).dim == 2
    assert (tmp_path / 'rebuilt.svg').exists()
    assert 'simplex' in capsys.readouterr().out


def test_roundtrip_report(tmp_path, triangle_file):
    report_path = tmp_path / 'report.json'
    assert run('roundtrip', '--poly', triangle_file, '-o', report_path) == EXIT_OK
    report = json.loads(report_path.read_text())
    assert report['facets'] == 3
    assert report['detected'] == 3
    assert report['method'] == 'simplex'
    assert report['unmatched'] == 0
    assert report['detection_max_area_error'] <= 0.05
    assert report['vertex_error'] <= 0.05


def test_ambiguous_indicators_write_every_candidate(tmp_path, capsys):
    path = tmp_path / 'hexagon.json'
    save_indicators(FacetIndicatorSet.from_polytope(ambiguous_hexagons()[0]), path)
    assert run('reconstruct', '--indicators', path, '-o', tmp_path / 'out.json', '--export') == EXIT_OK
    for index in (1, 2):
        assert load_polytope(tmp_path / f'out_{index}.json').dim == 2
        assert (tmp_path / f'out_{index}.svg').exists()
    assert not (tmp_path / 'out.json').exists()
    assert '2 sign assignments' in capsys.readouterr().out


def test_empty_detection_exit_code(tmp_path, triangle_file):
    pattern = tmp_path / 'pattern.csv'
    assert run('simulate', '--poly', triangle_file, '-o', pattern, '--grid', 64) == EXIT_OK
    assert run('detect', '--pattern', pattern, '-o', tmp_path / 'i.json', '--theta', 1e9) == EXIT_DETECTION_EMPTY
    assert not (tmp_path / 'i.json').exists()


def test_infeasible_exit_code(tmp_path, capsys):
    angles = [math.radians(a) for a in (0, 80, 175, 265)]
    indicators = FacetIndicatorSet.from_arrays([[math.cos(a), math.sin(a)] for a in angles], [1, 1, 1, 5])
    path = tmp_path / 'indicators.json'
    save_indicators(indicators, path)
    assert run('reconstruct', '--indicators', path, '-o', tmp_path / 'out.json') == EXIT_INFEASIBLE
    assert 'best closure residual' in capsys.readouterr().err


def test_singular_simplex_exit_code(tmp_path):
    path = tmp_path / 'indicators.json'
    save_indicators(FacetIndicatorSet.from_arrays([[1, 0], [-1, 0], [0, 1]], [1, 1, 1]), path)
    assert run('reconstruct', '--indicators', path, '-o', tmp_path / 'out.json') == EXIT_INFEASIBLE


def test_missing_input_exit_code(tmp_path):
    assert run('simulate', '--poly', tmp_path / 'missing.json', '-o', tmp_path / 'p.csv') == EXIT_IO


def test_validation_exit_codes(tmp_path, triangle_file, capsys):
    assert run('simulate', '--poly', triangle_file, '-o', tmp_path / 'p.csv', '--lambda', 0) == EXIT_VALIDATION
    assert run('simulate', '--poly', triangle_file) == EXIT_VALIDATION

    config = tmp_path / 'config.json'
    config.write_text(json.dumps({'lambda': 0.02, 'colour': 'red'}))
    assert run('simulate', '--poly', triangle_file, '-o', tmp_path / 'p.csv', '--config', config) == EXIT_VALIDATION
    assert 'colour' in capsys.readouterr().err


def test_settings_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv('POLYRECON_THETA', '0.7')
    monkeypatch.setenv('POLYRECON_TOL', '0.05')
    monkeypatch.setenv('POLYRECON_LAMBDA', '0.03')
    config = tmp_path / 'config.json'
    config.write_text(json.dumps({'theta': 0.5, 'tol': 0.02, 'grid': 128}))

    args = build_parser().parse_args(['detect', '--pattern', 'p.csv', '--config', str(config), '--theta', '0.4'])
    cfg = resolve_config(args)
    assert cfg.theta == 0.4
    assert cfg.tol == 0.02
    assert cfg.lam == 0.03
    assert cfg.grid == [128]
    assert cfg.method == 'smooth'
    assert cfg.input_path == 'p.csv'


def test_hemisphere_grid_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv('POLYRECON_GRID_3D', '12')
    poly = tmp_path / 'tetrahedron.json'
    pattern = tmp_path / 'pattern.csv'
    assert run('fixture', 'tetrahedron', '-o', poly) == EXIT_OK
    assert run('simulate', '--poly', poly, '-o', pattern, '--lambda', 0.1) == EXIT_OK
    assert len(pattern.read_text().splitlines()) == 1 + 12 * 12


def test_random_fixture_depends_on_seed(tmp_path):
    paths = [tmp_path / f'{k}.json' for k in range(3)]
    for path, seed in zip(paths, (1, 1, 2)):
        assert run('fixture', 'random-polygon', '--seed', seed, '-o', path) == EXIT_OK
    texts = [path.read_text() for path in paths]
    assert texts[0] == texts[1]
    assert texts[0] != texts[2]
