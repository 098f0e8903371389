"""Tests for suite plumbing and a few complete suites."""

import logging
from fractions import Fraction

import pytest

from vtensor.app import selected_suites
from vtensor.core.outcome import CheckOutcome, Verdict
from vtensor.errors import (
    DomainExhaustedError, IllDefinedProductError, NilpotencyCapError, UnknownSuiteError,
)
from vtensor.suites import SUITE_MODULES, load_suites
from vtensor.suites._helpers import run_all, structured_functionals, suite_timer
from vtensor.suites.base import (
    BaseSuite, SuiteCase, SuiteContext, SuiteRegistry, _settle, worst_verdict,
)

SUITE_NAMES = {
    'delta-calculus', 'voa-axioms', 'conjugation-formulas', 'intertwining-p', 'intertwining-q',
    'map-roundtrip', 'dual-vertex-operator', 'psi-conjugation', 'compat-equivalence',
    'dual-jacobi', 'virasoro-relations', 'membership',
}


class FakeSuite(BaseSuite):
    name = 'fake'
    identity = 'a = a'
    description = 'hand-built cases'

    def __init__(self, cases=None):
        self._cases = cases or []

    def cases(self, run):
        return self._cases


def _raise(exc):
    def check():
        raise exc
    return check


def _witnessed_failure():
    return CheckOutcome.failure('x', {'exponent': {'x': '0'}, 'left': 1, 'right': 2})


def test_all_suites_register():
    registry = load_suites()
    assert set(registry.names()) == SUITE_NAMES
    assert len(SUITE_MODULES) == 6
    assert registry.names() == sorted(registry.names())


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        load_suites().get('no-such-suite')


def test_registry_register_and_list():
    registry = SuiteRegistry()
    registry.register(FakeSuite())
    assert registry.names() == ['fake']
    assert registry.list_suites()[0]['identity'] == 'a = a'


def test_aliases_resolve_case_insensitively():
    registry = load_suites()
    assert registry.canonical('Intertwining-P') == 'intertwining-p'
    assert registry.canonical('L-relations') == 'virasoro-relations'
    assert registry.canonical('hboxtr-membership') == 'membership'
    assert registry.get('l-RELATIONS') is registry.get('virasoro-relations')
    assert 'L-relations' not in registry.names()


def test_selection_is_canonicalized(small_config):
    config = small_config.with_overrides(suites=('intertwining-P', 'intertwining-p', 'L-relations'))
    assert selected_suites(config) == ['intertwining-p', 'virasoro-relations']


def test_reports_carry_an_anchor():
    suite = FakeSuite()
    suite.anchor = 'reflexivity'
    plain = suite.run_case(SuiteCase('ok', lambda: CheckOutcome('ok', Verdict.PASS)))
    assert plain.anchor == {'label': 'reflexivity', 'quote': 'a = a'}
    narrow = suite.run_case(SuiteCase('ok', lambda: CheckOutcome('ok', Verdict.PASS),
                                      identity='b = b', anchor='symmetry'))
    assert narrow.to_dict()['anchor'] == {'label': 'symmetry', 'quote': 'b = b'}


def test_every_registered_suite_has_an_anchor():
    for info in load_suites().list_suites():
        assert info['anchor'], info['name']


@pytest.mark.parametrize('exc,verdict', [
    (IllDefinedProductError('infinite sum'), Verdict.ILL_DEFINED),
    (DomainExhaustedError(4, 2), Verdict.WINDOW_LIMITED),
    (NilpotencyCapError(8), Verdict.WINDOW_LIMITED),
    (RuntimeError('boom'), Verdict.FAIL),
])
def test_errors_become_verdicts(exc, verdict):
    report = FakeSuite().run_case(SuiteCase('case', _raise(exc)))
    assert report.verdict == verdict
    assert report.suite == 'fake'
    assert report.identity == 'a = a'
    if verdict == Verdict.FAIL:
        assert report.witness == {'error': 'RuntimeError: boom'}
    else:
        assert 'error' in report.details


def test_pass_report_gets_exact_window():
    report = FakeSuite().run_case(SuiteCase('ok', lambda: CheckOutcome('ok', Verdict.PASS)))
    assert report.verdict == Verdict.PASS
    assert report.window == {'exact': True}
    assert report.witness is None


def test_negative_control_settles():
    control = SuiteCase('neg', _witnessed_failure, expect=Verdict.FAIL)
    settled = _settle(control, _witnessed_failure())
    assert settled.verdict == Verdict.PASS
    assert settled.details['observed_witness']['left'] == 1

    passed = _settle(control, CheckOutcome('neg', Verdict.PASS))
    assert passed.verdict == Verdict.FAIL
    assert passed.witness['reason'] == 'negative control passed'

    limited = CheckOutcome('neg', Verdict.WINDOW_LIMITED)
    assert _settle(control, limited) is limited


def test_setup_failure_is_reported(small_config):
    class Broken(FakeSuite):
        def cases(self, run):
            raise ValueError('no cases')

    run = SuiteContext.from_config(small_config)
    reports = Broken().run(run)
    assert len(reports) == 1
    assert reports[0].case == 'setup'
    assert reports[0].verdict == Verdict.FAIL


def test_worst_verdict():
    assert worst_verdict([]) == Verdict.PASS
    assert worst_verdict([Verdict.PASS, Verdict.WINDOW_LIMITED]) == Verdict.WINDOW_LIMITED
    assert worst_verdict([Verdict.ILL_DEFINED, Verdict.WINDOW_LIMITED]) == Verdict.ILL_DEFINED
    assert worst_verdict([Verdict.FAIL, Verdict.ILL_DEFINED]) == Verdict.FAIL


def test_combine_keeps_first_failure():
    parts = [CheckOutcome('a', Verdict.PASS, compared=2), _witnessed_failure(),
             CheckOutcome('c', Verdict.WINDOW_LIMITED)]
    combined = CheckOutcome.combine('all', parts)
    assert combined.verdict == Verdict.FAIL
    assert combined.witness['check'] == 'x'
    assert combined.compared == 2
    assert len(combined.details['parts']) == 3


def test_run_all_stops_at_first_failure():
    seen = []

    def checks():
        for outcome in (CheckOutcome('a', Verdict.PASS, compared=1), _witnessed_failure(),
                        CheckOutcome('c', Verdict.PASS)):
            seen.append(outcome.name)
            yield outcome

    result = run_all('batch', checks())
    assert result.verdict == Verdict.FAIL
    assert result.details['passed_before'] == 1
    assert seen == ['a', 'x']


def test_suite_timer_logs(caplog):
    with caplog.at_level(logging.INFO, logger='vtensor.suites._helpers'):
        with suite_timer('fake', 'demo') as tracker:
            tracker['verdict'] = 'PASS'
    messages = [r.getMessage() for r in caplog.records]
    assert any('[SUITE START] fake' in m for m in messages)
    assert any('[SUITE END] fake' in m and 'verdict=PASS' in m for m in messages)


def test_suite_rngs_are_independent(small_config):
    run = SuiteContext.from_config(small_config)
    assert run.rng('a').random() == run.rng('a').random()
    assert run.rng('a').random() != run.rng('b').random()


def test_structured_functionals_cycle_branches(ctx):
    half = Fraction(1, 2)
    functionals = structured_functionals(ctx, half, half, [0, 1], 4)
    assert [f.table.label.endswith('p=0)') for f in functionals] == [True, False, True, False]
    assert functionals[0].dual == functionals[1].dual


def test_delta_calculus_suite_passes(small_config):
    run = SuiteContext.from_config(small_config)
    reports = load_suites().run_suite('delta-calculus', run)
    assert reports
    by_case = {r.case: r for r in reports}
    assert all(r.verdict == Verdict.PASS for r in reports), [
        (r.case, r.verdict, r.witness) for r in reports if r.verdict != Verdict.PASS]
    assert len(by_case) == len(reports)


def test_map_roundtrip_injected_corruption(small_config):
    run = SuiteContext.from_config(small_config.with_overrides(grade=2, inject_corruption=True))
    reports = load_suites().run_suite('map-roundtrip', run)
    failed = [r for r in reports if r.verdict == Verdict.FAIL]
    assert len(failed) == 1
    assert failed[0].witness
    assert all(r.verdict == Verdict.PASS for r in reports if r is not failed[0])
