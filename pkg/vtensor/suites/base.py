"""
VTensor v1.0 - Suite Base Layer
Suite registry, base classes, and verification reports.
"""

import logging
import random
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from vtensor.config import RunConfig
from vtensor.core.outcome import CheckOutcome, Verdict
from vtensor.core.scalars import ScalarContext
from vtensor.errors import (
    DomainExhaustedError, IllDefinedProductError, NilpotencyCapError, UnknownSuiteError,
)
from vtensor.suites._helpers import suite_timer

logger = logging.getLogger(__name__)

__all__ = [
    'Verdict', 'VerificationReport', 'SuiteCase', 'SuiteContext', 'BaseSuite',
    'SuiteRegistry', 'registry', 'register_suite',
]


@dataclass
class VerificationReport:
    """Result of one suite case"""
    suite: str
    case: str
    identity: str
    verdict: Verdict
    window: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None
    compared: int = 0
    duration_ms: int = 0
    details: Dict[str, Any] = field(default_factory=dict)
    anchor: Dict[str, str] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict in (Verdict.FAIL, Verdict.ILL_DEFINED)

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        d = asdict(self)
        d['verdict'] = self.verdict.value
        if not include_timings:
            d.pop('duration_ms', None)
        return d


@dataclass
class SuiteCase:
    """One named check of a suite.

    expect=FAIL marks a negative control: the case passes when the check
    fails with a witness.
    """
    label: str
    check: Callable[[], CheckOutcome]
    identity: str = ''
    expect: Verdict = Verdict.PASS
    anchor: str = ''


@dataclass
class SuiteContext:
    """What a suite needs from a run: validated config and the scalar field."""
    config: RunConfig
    ctx: ScalarContext

    @classmethod
    def from_config(cls, config: RunConfig) -> 'SuiteContext':
        config = config.validate()
        return cls(config, ScalarContext(config.order, config.denominator))

    def rng(self, suite: str) -> random.Random:
        """A generator private to one suite, so pool order never changes the draws."""
        return random.Random(f"{self.config.seed}:{suite}")


def _settle(case: SuiteCase, outcome: CheckOutcome) -> CheckOutcome:
    """Apply a negative-control expectation to a raw outcome."""
    if case.expect != Verdict.FAIL:
        return outcome
    if outcome.verdict == Verdict.FAIL and outcome.witness:
        details = dict(outcome.details)
        details.update(expected='FAIL', observed_witness=outcome.witness)
        return CheckOutcome(outcome.name, Verdict.PASS, outcome.window or {'negative_control': True},
                            None, outcome.compared, details)
    if outcome.verdict == Verdict.PASS:
        return CheckOutcome.failure(outcome.name, {'reason': 'negative control passed'},
                                    expected='FAIL')
    return outcome


class BaseSuite(ABC):
    """Abstract base class for verification suites"""

    name: str = ''
    identity: str = ''
    description: str = ''
    # label of the identity a suite checks; cases may name a narrower one
    anchor: str = ''
    aliases: Tuple[str, ...] = ()

    @abstractmethod
    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        """Build the suite's cases. Must be implemented by subclasses."""

    def run_case(self, case: SuiteCase) -> VerificationReport:
        """Run one case; errors become verdicts, never exceptions."""
        start_time = time.time()
        identity = case.identity or self.identity
        try:
            outcome = _settle(case, case.check())
        except IllDefinedProductError as e:
            logger.warning("Suite %s case %s ill-defined: %s", self.name, case.label, e)
            outcome = CheckOutcome(case.label, Verdict.ILL_DEFINED, details={'error': str(e)})
        except (DomainExhaustedError, NilpotencyCapError) as e:
            logger.warning("Suite %s case %s window-limited: %s", self.name, case.label, e)
            outcome = CheckOutcome(case.label, Verdict.WINDOW_LIMITED, details={'error': str(e)})
        except Exception as e:
            logger.error("Suite %s case %s failed: %s", self.name, case.label, e, exc_info=True)
            outcome = CheckOutcome.failure(case.label, {'error': f"{type(e).__name__}: {e}"})
        return self._report(case.label, identity, outcome, int((time.time() - start_time) * 1000),
                            case.anchor)

    def _report(self, label: str, identity: str, outcome: CheckOutcome,
                duration_ms: int, anchor: str = '') -> VerificationReport:
        witness = outcome.witness
        window = dict(outcome.window)
        if outcome.verdict == Verdict.FAIL and not witness:
            witness = {'reason': 'failed'}
        if outcome.verdict == Verdict.PASS and not window:
            window = {'exact': True}
        return VerificationReport(
            suite=self.name,
            case=label,
            identity=identity,
            verdict=outcome.verdict,
            window=window,
            witness=witness,
            compared=outcome.compared,
            duration_ms=duration_ms,
            details=outcome.details,
            anchor={'label': anchor or self.anchor or self.name, 'quote': identity},
        )

    def run(self, run: SuiteContext) -> List[VerificationReport]:
        """Run every case with timing and error handling."""
        reports: List[VerificationReport] = []
        with suite_timer(self.name, self.description) as tracker:
            try:
                cases = self.cases(run)
            except Exception as e:
                logger.error("Suite %s could not build its cases: %s", self.name, e, exc_info=True)
                outcome = CheckOutcome.failure('setup', {'error': f"{type(e).__name__}: {e}"})
                reports.append(self._report('setup', self.identity, outcome, 0))
                cases = []
            for case in cases:
                reports.append(self.run_case(case))
            tracker['verdict'] = worst_verdict(r.verdict for r in reports).value
        return reports

    def info(self) -> Dict[str, Any]:
        return {'name': self.name, 'identity': self.identity, 'description': self.description,
                'anchor': self.anchor, 'aliases': list(self.aliases)}


_SEVERITY = [Verdict.PASS, Verdict.WINDOW_LIMITED, Verdict.ILL_DEFINED, Verdict.FAIL]


def worst_verdict(verdicts) -> Verdict:
    worst = Verdict.PASS
    for v in verdicts:
        if _SEVERITY.index(v) > _SEVERITY.index(worst):
            worst = v
    return worst


class SuiteRegistry:
    """Registry of suites by name, with case-insensitive aliases."""

    def __init__(self):
        self._suites: Dict[str, BaseSuite] = {}
        self._aliases: Dict[str, str] = {}
        self._lock = threading.Lock()

    def register(self, suite: BaseSuite) -> BaseSuite:
        with self._lock:
            self._suites[suite.name] = suite
            for alias in (suite.name,) + tuple(suite.aliases):
                self._aliases[alias.lower()] = suite.name
            logger.debug("Registered suite: %s (%s)", suite.name, suite.identity)
        return suite

    def canonical(self, name: str) -> str:
        """Registered name behind a suite name or alias, in any case."""
        canonical = self._aliases.get(name.lower())
        if canonical is None:
            raise UnknownSuiteError(
                f"unknown suite {name!r}; known: {', '.join(self.names())}"
            )
        return canonical

    def get(self, name: str) -> BaseSuite:
        return self._suites[self.canonical(name)]

    def names(self) -> List[str]:
        return sorted(self._suites)

    def list_suites(self) -> List[Dict[str, Any]]:
        return [self._suites[n].info() for n in self.names()]

    def run_suite(self, name: str, run: SuiteContext) -> List[VerificationReport]:
        return self.get(name).run(run)


registry = SuiteRegistry()


def register_suite(cls):
    """Class decorator: instantiate and register a suite."""
    registry.register(cls())
    return cls
