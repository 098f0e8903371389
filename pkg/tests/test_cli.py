"""Tests for the command line."""

import argparse
import json
from fractions import Fraction

import pytest

from vtensor import cli
from vtensor.config import Config, RunConfig


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, 'LOG_DIR', str(tmp_path / 'logs'))


def test_list_suites(capsys):
    assert cli.main(['--list']) == 0
    out = capsys.readouterr().out
    assert 'delta-calculus' in out
    assert 'membership' in out


def test_unknown_suite_is_usage_error(tmp_path):
    assert cli.main(['--suite', 'nope', '--out', str(tmp_path / 'r.json')]) == cli.EXIT_USAGE


def test_invalid_config_is_usage_error(tmp_path):
    argv = ['--suite', 'delta-calculus', '--cyclotomic-order', '48', '--out', str(tmp_path / 'r.json')]
    assert cli.main(argv) == cli.EXIT_USAGE


def test_branch_list():
    assert cli._branch_list('0,-1') == (0, -1)
    with pytest.raises(argparse.ArgumentTypeError):
        cli._branch_list('a,b')
    with pytest.raises(argparse.ArgumentTypeError):
        cli._branch_list(',')


def test_build_config_overlays_flags():
    args = cli._parse_args(['--grade', '2', '--branch-p', '1', '--seed', '9', '--suite', 'voa-axioms'])
    config = cli.build_config(args, RunConfig(momentum_denominator=2, cyclotomic_order=0))
    assert config.grade == 2
    assert config.branch_p == (1,)
    assert config.seed == 9
    assert config.suites == ('voa-axioms',)
    assert config.include_timings is False


def test_run_writes_json_report(tmp_path):
    target = tmp_path / 'report.json'
    assert cli.main(['--suite', 'delta-calculus', '--workers', '1', '--out', str(target)]) == 0
    payload = json.loads(target.read_text(encoding='utf-8'))
    assert payload['schema'] == 2
    assert payload['summary']['exit_status'] == 0
    assert {r['suite'] for r in payload['reports']} == {'delta-calculus'}


def test_report_to_stdout(capsys):
    assert cli.main(['--suite', 'delta-calculus', '--format', 'text', '--out', '-']) == 0
    out = capsys.readouterr().out
    assert out.startswith('VTensor run')
    assert '[delta-calculus]' in out


def test_other_momentum_denominators_are_accepted():
    args = cli._parse_args(['--momentum-denominator', '3'])
    config = cli.build_config(args, RunConfig(sectors=(), cyclotomic_order=0))
    assert config.momentum_denominator == 3
    assert config.order == 324
    assert {mu for _, mu in config.sector_pairs} == {Fraction(1, 3), Fraction(-1, 3)}
