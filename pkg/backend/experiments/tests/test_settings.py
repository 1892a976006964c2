"""Tests for environment-driven settings parsing."""
import pytest

from config.settings import env_number


class TestEnvNumber:
    def test_unset_uses_default(self, monkeypatch):
        monkeypatch.delenv('LINBANDIT_DIM', raising=False)
        assert env_number('LINBANDIT_DIM', int, 5) == 5

    def test_blank_uses_default(self, monkeypatch):
        monkeypatch.setenv('LINBANDIT_SIGMA', '  ')
        assert env_number('LINBANDIT_SIGMA', float, 1.0) == 1.0

    def test_parses_value(self, monkeypatch):
        monkeypatch.setenv('LINBANDIT_ROUNDS', '120')
        monkeypatch.setenv('LINBANDIT_DELTA', '0.05')
        assert env_number('LINBANDIT_ROUNDS', int, 3000) == 120
        assert env_number('LINBANDIT_DELTA', float, 0.1) == 0.05

    @pytest.mark.parametrize('name, cast, raw, default', [
        ('LINBANDIT_DIM', int, 'five', 5),
        ('LINBANDIT_SEED', int, '1.5', 0),
        ('LINBANDIT_KAPPA', float, 'abc', 1.0),
    ])
    def test_malformed_warns_and_defaults(self, monkeypatch, name, cast, raw, default):
        monkeypatch.setenv(name, raw)
        with pytest.warns(UserWarning, match=name):
            assert env_number(name, cast, default) == default

    def test_below_minimum(self, monkeypatch):
        monkeypatch.setenv('LINBANDIT_THREADS', '0')
        with pytest.warns(UserWarning, match='LINBANDIT_THREADS'):
            assert env_number('LINBANDIT_THREADS', int, None, minimum=1) is None
