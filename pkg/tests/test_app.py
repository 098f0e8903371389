"""Tests for run orchestration: suite selection and the work pools."""

from fractions import Fraction

import pytest

from vtensor.app import portable, run_suites, selected_suites
from vtensor.config import Config
from vtensor.core.outcome import Verdict
from vtensor.errors import ConfigError, UnknownSuiteError
from vtensor.report import render_json, render_text
from vtensor.suites.base import VerificationReport


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, 'LOG_DIR', str(tmp_path / 'logs'))


def test_portable_report_renders_identically(ctx, small_config):
    report = VerificationReport(
        suite='s', case='c', identity='a = b', verdict=Verdict.FAIL,
        window={'x': (Fraction(-2), Fraction(2))},
        witness={'exponent': {'x': Fraction(1, 4)}, 'left': ctx.z_power(Fraction(1, 4), 3),
                 'right': ctx.scalar(Fraction(-1, 2))},
        details={'grades': {1, 2}}, anchor={'label': 'l', 'quote': 'a = b'})
    flat = portable(report)
    assert flat.witness['exponent'] == {'x': '1/4'}
    assert flat.details == {'grades': [1, 2]}
    assert render_json([flat], small_config) == render_json([report], small_config)
    assert render_text([flat], small_config) == render_text([report], small_config)


def test_selection_defaults_to_every_suite(small_config):
    names = selected_suites(small_config)
    assert 'delta-calculus' in names
    assert names == sorted(names)


def test_unknown_selection_raises(small_config):
    with pytest.raises(UnknownSuiteError):
        selected_suites(small_config.with_overrides(suites=('no-such-suite',)))


def test_empty_selection_runs_nothing(small_config):
    assert run_suites(small_config, []) == []


def test_pool_kind_is_validated(small_config):
    with pytest.raises(ConfigError):
        small_config.with_overrides(pool='fibers')


def test_process_pool_matches_threads(small_config):
    names = ['delta-calculus', 'map-roundtrip']
    config = small_config.with_overrides(grade=2)
    threaded = run_suites(config.with_overrides(pool='thread', workers=2), names)
    forked = run_suites(config.with_overrides(pool='process', workers=2), names)
    assert [(r.suite, r.case, r.verdict) for r in forked] == \
        [(r.suite, r.case, r.verdict) for r in threaded]
    assert render_json(forked, config) == render_json(threaded, config)
