import math

import numpy as np
import pytest

from polyrecon import create_config
from polyrecon.exceptions import ValidationError
from polyrecon.models import FacetIndicatorSet, IndicatorEntry, RunConfig


def test_entry_normalises_its_normal():
    entry = IndicatorEntry([3.0, 4.0], 2.0)
    np.testing.assert_allclose(entry.normal, [0.6, 0.8])
    assert entry.area == 2.0
    with pytest.raises(ValueError):
        entry.normal[0] = 1.0


@pytest.mark.parametrize('normal,area', [
    ([0.0, 0.0], 1.0),
    ([1.0, math.nan], 1.0),
    ([1.0, 0.0], 0.0),
    ([1.0, 0.0], -2.0),
    ([[1.0, 0.0]], 1.0),
])
def test_entry_rejects_bad_values(normal, area):
    with pytest.raises(ValidationError):
        IndicatorEntry(normal, area)


def test_set_rejects_duplicate_directions():
    with pytest.raises(ValidationError, match='same normal'):
        FacetIndicatorSet.from_arrays([[1, 0], [2, 0], [0, 1]], [1, 1, 1])


def test_antipodes_only_rejected_when_strict():
    normals = [[1, 0], [-1, 0], [0, 1]]
    assert FacetIndicatorSet.from_arrays(normals, [1, 1, 1]).f == 3
    with pytest.raises(ValidationError, match='antipodal'):
        FacetIndicatorSet.from_arrays(normals, [1, 1, 1], strict=True)


def test_set_rejects_mixed_dimensions():
    with pytest.raises(ValidationError):
        FacetIndicatorSet(2, [IndicatorEntry([1, 0], 1.0), IndicatorEntry([0, 0, 1], 1.0)])
    with pytest.raises(ValidationError):
        FacetIndicatorSet(1, [])


def test_set_from_polytope_with_signs(triangle):
    plain = FacetIndicatorSet.from_polytope(triangle)
    flipped = FacetIndicatorSet.from_polytope(triangle, signs=[1, -1, 1])
    np.testing.assert_allclose(flipped.normals[1], -plain.normals[1])
    np.testing.assert_array_equal(flipped.areas, plain.areas)


def test_empty_set():
    empty = FacetIndicatorSet(3, [])
    assert empty.f == 0
    assert empty.normals.shape == (0, 3)
    assert FacetIndicatorSet.from_dict(empty.to_dict()).f == 0


def test_set_dict_round_trip(octahedron):
    indicators = FacetIndicatorSet.from_polytope(octahedron)
    restored = FacetIndicatorSet.from_dict(indicators.to_dict())
    np.testing.assert_array_equal(restored.normals, indicators.normals)
    with pytest.raises(ValidationError):
        FacetIndicatorSet.from_dict({'dim': 3, 'entries': [{'normal': [1, 0, 0]}]})


def test_run_config_validation():
    RunConfig('simulate').validate()
    for bad in ({'lam': 0.0}, {'theta': -1.0}, {'tol': 0.0}, {'workers': 0}, {'grid': [1]},
                {'input_path': 'a.json', 'output_path': 'a.json'}):
        with pytest.raises(ValidationError):
            RunConfig('simulate', **bad).validate()


def test_run_config_dict_round_trip():
    config = RunConfig('detect', input_path='p.csv', output_path='i.json', theta=0.4, grid=[64, 64])
    data = config.to_dict()
    assert data['lambda'] == 0.01
    restored = RunConfig.from_dict(data)
    assert restored.to_dict() == data


def test_create_config_defaults(monkeypatch):
    for name in ('POLYRECON_LAMBDA', 'POLYRECON_THETA', 'POLYRECON_LOG_LEVEL', 'POLYRECON_SURFACE'):
        monkeypatch.delenv(name, raising=False)
    config = create_config()
    assert config['LAMBDA'] == 0.01
    assert config['THETA'] is None
    assert config['SURFACE'] is None
    assert config['LOG_LEVEL'] == 'WARNING'


def test_create_config_reads_environment(monkeypatch):
    monkeypatch.setenv('POLYRECON_LAMBDA', '0.02')
    monkeypatch.setenv('POLYRECON_GRID_2D', '128')
    monkeypatch.setenv('POLYRECON_METHOD', 'cluster')
    monkeypatch.setenv('POLYRECON_LOG_LEVEL', 'debug')
    config = create_config()
    assert config['LAMBDA'] == 0.02
    assert config['GRID_2D'] == 128
    assert config['METHOD'] == 'cluster'
    assert config['LOG_LEVEL'] == 'DEBUG'
