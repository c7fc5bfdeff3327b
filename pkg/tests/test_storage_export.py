import json
import logging

import numpy as np
import pytest

from polyrecon.exceptions import StorageError, ValidationError
from polyrecon.export import export_shape, polygon_to_svg, polytope_to_obj, psi_curve_to_svg
from polyrecon.fixtures import random_simplex
from polyrecon.models import FacetIndicatorSet
from polyrecon.scan import Grid, ScanSurface, simulate_pattern
from polyrecon.storage import (
    load_config,
    load_indicators,
    load_pattern,
    load_polytope,
    save_indicators,
    save_pattern,
    save_polytope,
    sidecar_path,
)


@pytest.fixture
def small_pattern(triangle):
    surface = ScanSurface('semicircle')
    return simulate_pattern(triangle, surface, Grid.for_surface(surface, [32]), lam=0.05)


def test_polytope_json_round_trip(tmp_path, cube):
    path = tmp_path / 'cube.json'
    save_polytope(cube, path)
    restored = load_polytope(path)
    np.testing.assert_array_equal(restored.vertices, cube.vertices)
    assert restored.facets == cube.facets


def test_indicator_json_round_trip(tmp_path, octahedron):
    indicators = FacetIndicatorSet.from_polytope(octahedron)
    path = tmp_path / 'indicators.json'
    save_indicators(indicators, path)
    restored = load_indicators(path)
    assert restored.dim == 3
    np.testing.assert_array_equal(restored.normals, indicators.normals)
    np.testing.assert_array_equal(restored.areas, indicators.areas)


def test_missing_file_is_a_storage_error(tmp_path):
    with pytest.raises(StorageError):
        load_polytope(tmp_path / 'nowhere.json')


def test_malformed_json(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"dim": 2,')
    with pytest.raises(ValidationError):
        load_indicators(path)

    path.write_text('{"dim": 2}')
    with pytest.raises(ValidationError, match='missing'):
        load_indicators(path)

    path.write_text('[1, 2]')
    with pytest.raises(ValidationError):
        load_config(path)


def test_sidecar_name():
    assert sidecar_path('out/pattern.csv').name == 'pattern.meta.json'


def test_pattern_round_trip(tmp_path, small_pattern, caplog):
    path = tmp_path / 'pattern.csv'
    save_pattern(small_pattern, path)
    assert path.read_text().splitlines()[0] == 't1,abs_phi,psi'
    assert json.loads(sidecar_path(path).read_text())['lambda'] == 0.05

    with caplog.at_level(logging.WARNING, logger='polyrecon.storage'):
        restored = load_pattern(path)
    assert not caplog.records
    np.testing.assert_array_equal(restored.abs_phi, small_pattern.abs_phi)
    np.testing.assert_array_equal(restored.psi, small_pattern.psi)
    assert restored.surface.kind == 'semicircle2d'


def test_hemisphere_pattern_round_trip(tmp_path, tetrahedron):
    surface = ScanSurface('hemisphere')
    pattern = simulate_pattern(tetrahedron, surface, Grid.for_surface(surface, [6]), lam=0.1)
    path = tmp_path / 'pattern.csv'
    save_pattern(pattern, path)
    restored = load_pattern(path)
    assert restored.psi.shape == (6, 6)
    np.testing.assert_array_equal(restored.psi, pattern.psi)


def test_edited_psi_column_warns(tmp_path, small_pattern, caplog):
    path = tmp_path / 'pattern.csv'
    save_pattern(small_pattern, path)
    lines = path.read_text().splitlines()
    t, abs_phi, psi = lines[5].split(',')
    lines[5] = ','.join([t, abs_phi, repr(float(psi) * 2 + 1)])
    path.write_text('\n'.join(lines) + '\n')

    with caplog.at_level(logging.WARNING, logger='polyrecon.storage'):
        load_pattern(path)
    assert any('psi column' in record.message for record in caplog.records)


def test_pattern_header_and_shape_checks(tmp_path, small_pattern):
    path = tmp_path / 'pattern.csv'
    save_pattern(small_pattern, path)
    lines = path.read_text().splitlines()

    path.write_text('\n'.join(['t,abs_phi,psi'] + lines[1:]) + '\n')
    with pytest.raises(ValidationError, match='header'):
        load_pattern(path)

    path.write_text('\n'.join(lines[:-3]) + '\n')
    with pytest.raises(ValidationError, match='rows'):
        load_pattern(path)


def test_pattern_without_sidecar(tmp_path, small_pattern):
    path = tmp_path / 'pattern.csv'
    save_pattern(small_pattern, path)
    sidecar_path(path).unlink()
    with pytest.raises(StorageError):
        load_pattern(path)


def test_obj_export(cube):
    text = polytope_to_obj(cube, name='cube')
    lines = text.splitlines()
    assert lines[0] == 'o cube'
    assert sum(line.startswith('v ') for line in lines) == 8
    faces = [line for line in lines if line.startswith('f ')]
    assert len(faces) == 6
    assert all(len(face.split()) == 5 for face in faces)
    assert min(int(k) for face in faces for k in face.split()[1:]) == 1


def test_svg_exports(square, small_pattern):
    svg = polygon_to_svg(square)
    assert svg.startswith('<svg')
    assert svg.count(',') == 4

    curve = psi_curve_to_svg(small_pattern, theta=0.5)
    assert '<polyline' in curve
    assert 'stroke="red"' in curve

    with pytest.raises(ValidationError):
        polygon_to_svg(random_simplex(3, np.random.default_rng(0)).to_polytope())


def test_export_shape_by_dimension(tmp_path, cube, square, rng):
    export_shape(cube, tmp_path / 'cube.obj')
    assert (tmp_path / 'cube.obj').read_text().startswith('o cube')
    export_shape(square, tmp_path / 'square.svg')
    assert '<polygon' in (tmp_path / 'square.svg').read_text()
    with pytest.raises(ValidationError):
        export_shape(random_simplex(4, rng).to_polytope(), tmp_path / 'simplex.obj')
