"""Tests for report rendering and the exit-status policy."""

import json
from fractions import Fraction

import pytest

from vtensor.core.outcome import Verdict
from vtensor.errors import ReportError
from vtensor.report import (
    SCHEMA_VERSION, canonical_order, emit_report, exit_status, render_json, render_text, summarize,
)
from vtensor.suites.base import VerificationReport


def _report(suite, case, verdict, **kwargs):
    return VerificationReport(suite=suite, case=case, identity='id', verdict=verdict, **kwargs)


@pytest.fixture
def reports():
    return [
        _report('voa-axioms', 'vacuum', Verdict.PASS, window={'exact': True}, duration_ms=12),
        _report('delta-calculus', 'shift', Verdict.PASS, compared=17, duration_ms=3),
        _report('delta-calculus', 'residue', Verdict.WINDOW_LIMITED,
                details={'error': 'functional known up to grade 2, needed 4'}),
    ]


def test_exit_status_policy(reports):
    assert exit_status(reports) == 0
    assert exit_status(reports + [_report('x', 'y', Verdict.ILL_DEFINED)]) == 1
    assert exit_status(reports + [_report('x', 'y', Verdict.FAIL, witness={'reason': 'r'})]) == 1
    assert exit_status([]) == 0


def test_summarize(reports):
    summary = summarize(reports)
    assert summary['total'] == 3
    assert summary['by_verdict'] == {'PASS': 2, 'FAIL': 0, 'WINDOW-LIMITED': 1, 'ILL-DEFINED': 0}
    assert summary['window_limited_warning'] is True
    assert summary['exit_status'] == 0


def test_canonical_order_keeps_case_order(reports):
    ordered = canonical_order(reports)
    assert [(r.suite, r.case) for r in ordered] == [
        ('delta-calculus', 'shift'), ('delta-calculus', 'residue'), ('voa-axioms', 'vacuum')]


def test_json_is_deterministic(reports, small_config):
    first = render_json(reports, small_config)
    assert first == render_json(list(reports), small_config)
    payload = json.loads(first)
    assert payload['schema'] == SCHEMA_VERSION == 2
    assert payload['config']['sectors'] == [['1/2', '1/2']]
    assert all('duration_ms' not in r for r in payload['reports'])


def test_json_timings_on_request(reports, small_config):
    payload = json.loads(render_json(reports, small_config.with_overrides(include_timings=True)))
    assert payload['reports'][-1]['duration_ms'] == 12


def test_exact_values_serialize(small_config):
    report = _report('s', 'c', Verdict.FAIL, witness={'left': Fraction(1, 2), 'right': Fraction(-3)})
    payload = json.loads(render_json([report], small_config))
    assert payload['reports'][0]['witness'] == {'left': '1/2', 'right': '-3'}
    assert payload['reports'][0]['verdict'] == 'FAIL'


def test_render_text(reports, small_config):
    text = render_text(reports, small_config)
    assert '[delta-calculus]' in text
    assert 'functional known up to grade 2' in text
    assert 'warning: some checks were limited' in text
    assert text.index('[delta-calculus]') < text.index('[voa-axioms]')


def test_emit_report_writes_file(reports, small_config, tmp_path):
    target = tmp_path / 'out' / 'run.json'
    text = emit_report(reports, small_config, path=str(target))
    assert target.read_text(encoding='utf-8') == text


def test_emit_report_to_stdout_writes_nothing(reports, small_config, tmp_path):
    text = emit_report(reports, small_config, fmt='text', path='-')
    assert text.startswith('VTensor run')
    assert not (tmp_path / 'report.json').exists()


def test_emit_report_unknown_format(reports, small_config):
    with pytest.raises(ReportError):
        emit_report(reports, small_config, fmt='yaml', path='-')
