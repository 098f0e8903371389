"""
Shared helpers for all verification suites.
Provides consistent logging and timing, sample vectors, windows and the
seeded functionals the dual-action suites draw from.
"""
import logging
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Tuple

from vtensor.core.dualact import MapImage, TableFunctional
from vtensor.core.fock import FockVector, basis_upto, heisenberg, omega, vacuum
from vtensor.core.maps import F_P, F_Q, B_r, FockIntertwiner, IntertwinerSpec, IntertwiningMapTable
from vtensor.core.outcome import CheckOutcome, Verdict
from vtensor.core.scalars import ScalarContext, fmt_rational
from vtensor.core.series import closed

logger = logging.getLogger(__name__)

# Windows in the formal variables; kept small so every suite stays at desk scale.
DELTA_WINDOW = closed(-8, 8)
JACOBI_WINDOW = {'x0': closed(-2, 1), 'x1': closed(-2, 1), 'x2': closed(-2, 1)}
COMPAT_WINDOW = {'x0': closed(-2, 1), 'x1': closed(-2, 1)}
CONJUGATION_EXPONENTS = (-2, -1, 0, 1)


@contextmanager
def suite_timer(suite: str, description: str = ''):
    """Context manager that times a suite and logs its verdict.

    Usage::

        with suite_timer('voa-axioms', 'Heisenberg VOA axioms') as tracker:
            # ... run cases ...
            tracker['verdict'] = 'PASS'

    If the body raises, the verdict is set to ``'FAIL'`` and the error logged.
    """
    tracker: Dict[str, Any] = {'verdict': 'PASS'}
    start = time.time()
    logger.info("[SUITE START] %s (%s)", suite, description)
    try:
        yield tracker
    except Exception as exc:
        tracker['verdict'] = 'FAIL'
        logger.error("[SUITE ERROR] %s: %s", suite, exc, exc_info=True)
    finally:
        duration_ms = int((time.time() - start) * 1000)
        tracker['duration_ms'] = duration_ms
        logger.info("[SUITE END] %s -- verdict=%s, duration=%dms",
                    suite, tracker['verdict'], duration_ms)


# -----------------------------------------------------------------------------
# Samples
# -----------------------------------------------------------------------------

def algebra_samples(ctx: ScalarContext) -> List[Tuple[str, FockVector]]:
    """1, alpha(-1) 1 and omega, labelled."""
    return [('1', vacuum(ctx)), ('alpha(-1)1', heisenberg(ctx)), ('omega', omega(ctx))]


def module_basis(ctx: ScalarContext, momentum: Fraction, max_grade: int) -> List[FockVector]:
    return [FockVector.of(ctx, b) for b in basis_upto(momentum, max_grade)]


def sector_label(lam: Fraction, mu: Fraction) -> str:
    return f"({fmt_rational(lam)},{fmt_rational(mu)})"


# -----------------------------------------------------------------------------
# Intertwiners, maps and functionals
# -----------------------------------------------------------------------------

def fock_intertwiner(ctx: ScalarContext, lam: Fraction, mu: Fraction) -> FockIntertwiner:
    return FockIntertwiner(ctx, IntertwinerSpec(lam, mu))


def p_table(ctx: ScalarContext, lam: Fraction, mu: Fraction, p: int) -> IntertwiningMapTable:
    return F_P(fock_intertwiner(ctx, lam, mu), p)


def q_table(ctx: ScalarContext, lam: Fraction, mu: Fraction, r: int, p: int) -> IntertwiningMapTable:
    return F_Q(B_r(fock_intertwiner(ctx, lam, mu), r), p)


def structured_functionals(ctx: ScalarContext, lam: Fraction, mu: Fraction,
                           branches, count: int) -> List[MapImage]:
    """Images F'(c') of dual basis vectors under F_P(Y, p), cycling over the branches."""
    table_by_p = {p: p_table(ctx, lam, mu, p) for p in branches}
    duals = module_basis(ctx, lam + mu, 3)
    out = []
    i = 0
    while len(out) < count:
        p = branches[i % len(branches)]
        dual = duals[(i // len(branches)) % len(duals)]
        out.append(MapImage(table_by_p[p], dual))
        i += 1
    return out


def random_functionals(ctx: ScalarContext, lam: Fraction, mu: Fraction, grade: int,
                       rng: random.Random, count: int, prefix: str = 'random') -> List[TableFunctional]:
    return [TableFunctional.random(ctx, lam, mu, grade, rng, label=f"{prefix}-{i}")
            for i in range(count)]


def run_all(name: str, checks: Iterable[CheckOutcome], **details) -> CheckOutcome:
    """Consume checks until the first one that does not pass.

    The result keeps only a count of the passing checks, not their bodies.
    """
    count = 0
    compared = 0
    window: Dict[str, Any] = {}
    for outcome in checks:
        if outcome.verdict != Verdict.PASS:
            details.update(passed_before=count, check=outcome.name)
            return CheckOutcome(name, outcome.verdict, outcome.window, outcome.witness,
                                compared + outcome.compared, {**outcome.details, **details})
        count += 1
        compared += outcome.compared
        window = window or outcome.window
    details['checks'] = count
    return CheckOutcome(name, Verdict.PASS, window, None, compared, details)
