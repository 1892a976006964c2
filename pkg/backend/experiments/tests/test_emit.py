"""Tests for CSV and JSON output."""
import csv
import io
import json

import numpy as np
import pytest

from bandits.exceptions import UsageError
from experiments.config import ExperimentConfig
from experiments.curves import BOUND_COLUMNS, CURVE_COLUMNS, AggregatedCurve, bound_records
from experiments.emit import bounds_path_for, emit, emit_bounds, read_curves, read_records, render_table


CURVE_HEADER = 'policy,round,mse_mean,mse_stderr,regret_mean,regret_stderr,n_trials\n'


@pytest.fixture
def curve():
    rng = np.random.default_rng(0)
    rounds = np.array([1, 2, 10, 20])
    return AggregatedCurve.from_samples('orth-batch', rounds, rng.random((3, 4)) / 3, np.cumsum(rng.random((3, 4)), axis=1))


class TestRenderTable:
    def test_empty_curve_set_is_header_only(self):
        assert render_table([], CURVE_COLUMNS, 'csv') == CURVE_HEADER

    def test_bounds_header(self):
        header = render_table([], BOUND_COLUMNS, 'csv')
        assert header == 'round,mse_upper,mse_lower,tail_threshold,ofu_floor,ofu_regret_bound\n'

    def test_seventeen_significant_digits(self):
        row = {'round': 1, 'mse_upper': 0.1, 'mse_lower': 1 / 3, 'tail_threshold': 2.0, 'ofu_floor': 0.9,
               'ofu_regret_bound': 851.0}
        line = render_table([row], BOUND_COLUMNS, 'csv').splitlines()[1]
        assert line.split(',')[2] == format(1 / 3, '.17g')
        assert float(line.split(',')[1]) == 0.1

    def test_one_record_round_trip(self, curve):
        text = render_table(curve.records()[:1], CURVE_COLUMNS, 'csv')
        lines = text.splitlines()
        assert len(lines) == 2
        row = next(csv.DictReader(io.StringIO(text)))
        original = curve.records()[0]
        assert row['policy'] == original['policy']
        assert int(row['round']) == original['round']
        for name in ('mse_mean', 'mse_stderr', 'regret_mean', 'regret_stderr'):
            assert float(row[name]) == original[name]

    def test_json_mirrors_records(self, curve):
        data = json.loads(render_table(curve.records(), CURVE_COLUMNS, 'json'))
        assert data == curve.records()
        assert list(data[0]) == list(CURVE_COLUMNS)

    def test_unknown_format(self):
        with pytest.raises(UsageError, match='format'):
            render_table([], CURVE_COLUMNS, 'xml')


class TestEmit:
    def test_bounds_path(self, tmp_path):
        assert bounds_path_for(tmp_path / 'run.csv') == tmp_path / 'run.bounds.csv'
        assert bounds_path_for('run.json').name == 'run.bounds.json'

    def test_writes_curves_and_bounds(self, tmp_path, curve):
        config = ExperimentConfig(dim=2, rounds=20, record_every=10)
        written = emit([curve], bound_records(config), tmp_path / 'run.csv')
        assert written == [tmp_path / 'run.csv', tmp_path / 'run.bounds.csv']
        assert (tmp_path / 'run.csv').read_text().startswith(CURVE_HEADER)
        bounds = read_records(tmp_path / 'run.bounds.csv')
        assert [int(r['round']) for r in bounds] == [1, 2, 10, 20]

    def test_failed_bounds_write_leaves_no_curves_file(self, tmp_path, curve):
        (tmp_path / 'run.bounds.csv').mkdir()
        config = ExperimentConfig(dim=2, rounds=20, record_every=10)
        with pytest.raises(OSError, match='Cannot write results'):
            emit([curve], bound_records(config), tmp_path / 'run.csv')
        assert not (tmp_path / 'run.csv').exists()

    def test_malformed_bounds_write_nothing(self, tmp_path, curve):
        with pytest.raises(KeyError):
            emit([curve], [{'round': 1}], tmp_path / 'run.csv')
        assert not (tmp_path / 'run.csv').exists()

    def test_without_bounds(self, tmp_path, curve):
        emit([curve], None, tmp_path / 'run.csv')
        assert not (tmp_path / 'run.bounds.csv').exists()

    def test_empty_curve_file(self, tmp_path):
        emit([], None, tmp_path / 'empty.csv')
        assert (tmp_path / 'empty.csv').read_text() == CURVE_HEADER

    @pytest.mark.parametrize('suffix, fmt', [('.csv', 'csv'), ('.json', 'json')])
    def test_read_back(self, tmp_path, curve, suffix, fmt):
        path = tmp_path / f'run{suffix}'
        emit([curve], None, path, fmt)
        (restored,) = read_curves(path)
        assert restored.policy == curve.policy
        assert np.array_equal(restored.rounds, curve.rounds)
        assert np.array_equal(restored.mse_mean, curve.mse_mean)
        assert np.array_equal(restored.regret_stderr, curve.regret_stderr)
        assert restored.n_trials == curve.n_trials

    def test_write_failure_names_path(self, tmp_path, curve):
        target = tmp_path / 'missing' / 'run.csv'
        with pytest.raises(OSError, match='run.csv'):
            emit([curve], None, target)

    def test_emit_bounds_json(self, tmp_path):
        config = ExperimentConfig(dim=2, rounds=10, record_every=5)
        path = emit_bounds(bound_records(config), tmp_path / 'b.json', 'json')
        data = json.loads(path.read_text())
        assert [row['round'] for row in data] == [1, 2, 5, 10]


class TestReadRecords:
    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError, match='absent.csv'):
            read_records(tmp_path / 'absent.csv')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{')
        with pytest.raises(UsageError):
            read_records(path)

    def test_missing_columns(self, tmp_path):
        path = tmp_path / 'partial.csv'
        path.write_text('policy,round\nofu,1\n')
        with pytest.raises(UsageError, match='missing columns'):
            read_curves(path)
