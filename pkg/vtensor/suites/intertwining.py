"""
VTensor v1.0 - Intertwining map suites
P(z)- and Q(z)-intertwining identities of the maps built from Fock
intertwiners, and the round trips between operators and maps.
"""

import logging
from fractions import Fraction
from itertools import product
from typing import List, Tuple

from vtensor.core.fock import FockVector
from vtensor.core.maps import (
    B_r, F_P, F_Q, Y_from_F_P, Y_from_F_Q, check_intertwiner_derivative, check_P_intertwining,
    check_Q_intertwining, compare_operators, spanning_vectors,
)
from vtensor.core.outcome import Verdict
from vtensor.core.scalars import ScalarContext
from vtensor.suites._helpers import (
    COMPAT_WINDOW, fock_intertwiner, module_basis, p_table, q_table, run_all, sector_label,
)
from vtensor.suites.base import BaseSuite, SuiteCase, SuiteContext, register_suite

logger = logging.getLogger(__name__)

SPANNING_WEIGHT = 3
ROUNDTRIP_GRADE = 3


def _argument_pairs(ctx: ScalarContext, lam: Fraction,
                    mu: Fraction) -> List[Tuple[FockVector, FockVector]]:
    """(w1, w2) basis pairs of total grade <= 1."""
    return [(w1, w2) for w1 in module_basis(ctx, lam, 1) for w2 in module_basis(ctx, mu, 1)
            if w1.max_grade + w2.max_grade <= 1]


def _identity_cases(run: SuiteContext, kind: str) -> List[SuiteCase]:
    ctx = run.ctx
    vectors = spanning_vectors(ctx, SPANNING_WEIGHT)
    check = check_P_intertwining if kind == 'P' else check_Q_intertwining
    out = []
    for lam, mu in run.config.sector_pairs:
        duals = module_basis(ctx, lam + mu, 1)
        args = _argument_pairs(ctx, lam, mu)
        if kind == 'P':
            tables = [(f"p={p}", p_table(ctx, lam, mu, p)) for p in run.config.branch_p]
        else:
            tables = [(f"r={r} p={p}", q_table(ctx, lam, mu, r, p))
                      for r, p in product(run.config.branch_r, run.config.branch_p)]
        for label, table in tables:
            out.append(SuiteCase(
                f"{sector_label(lam, mu)} {label}",
                lambda table=table, duals=duals, args=args: run_all(
                    f"{kind}(z)-intertwining", (
                        check(table, v, w1, w2, dual, COMPAT_WINDOW)
                        for v in vectors for w1, w2 in args for dual in duals),
                    table=table.label)))
    return out


@register_suite
class PIntertwiningSuite(BaseSuite):
    name = 'intertwining-p'
    identity = ('x0^-1 d((x1-z)/x0) Y3(v,x1) F(w1 x w2) = z^-1 d((x1-x0)/z) F(Y1(v,x0)w1 x w2)'
                ' + x0^-1 d((z-x1)/(-x0)) F(w1 x Y2(v,x1)w2)')
    description = 'P(z)-intertwining identity of F_P on a spanning set of V'
    anchor = 'P(z)-intertwining identity'
    aliases = ('p-intertwining',)

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        return _identity_cases(run, 'P')


@register_suite
class QIntertwiningSuite(BaseSuite):
    name = 'intertwining-q'
    identity = ('z^-1 d((x1-x0)/z) Y3*(v,x0) F(w1 x w2) = x0^-1 d((x1-z)/x0) F(Y1*(v,x1)w1 x w2)'
                ' - x0^-1 d((z-x1)/(-x0)) F(w1 x Y2(v,x1)w2)')
    description = 'Q(z)-intertwining identity of F_Q(B_r(Y)) on a spanning set of V'
    anchor = 'Q(z)-intertwining identity'
    aliases = ('q-intertwining',)

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        return _identity_cases(run, 'Q')


@register_suite
class MapRoundTripSuite(BaseSuite):
    name = 'map-roundtrip'
    identity = 'Y_(F_P(Y,p),p) = Y and Y_(F_Q(B,p),p) = B'
    description = 'operator -> map -> operator round trips for every branch'
    anchor = 'intertwining maps and intertwining operators correspond'
    aliases = ('roundtrip',)

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        out = []
        for lam, mu in run.config.sector_pairs:
            operator = fock_intertwiner(ctx, lam, mu)
            sector = sector_label(lam, mu)
            for p in run.config.branch_p:
                out.append(SuiteCase(
                    f"{sector} P p={p}",
                    lambda operator=operator, p=p: compare_operators(
                        Y_from_F_P(F_P(operator, p), p), operator, ROUNDTRIP_GRADE,
                        'P round trip'),
                    'Y_(F_P(Y,p),p) = Y'))
            for r in run.config.branch_r:
                braided = B_r(operator, r)
                out.append(SuiteCase(
                    f"{sector} B_{r} derivative",
                    lambda braided=braided, lam=lam, mu=mu: run_all('B_r(Y) L(-1)-derivative', (
                        check_intertwiner_derivative(braided, c, w, ROUNDTRIP_GRADE)
                        for c in module_basis(ctx, lam + mu, 1)
                        for w in module_basis(ctx, mu, 1))),
                    'd/dx B_r(Y)(c, x) = B_r(Y)(L\'(-1) c, x)'))
                for p in run.config.branch_p:
                    out.append(SuiteCase(
                        f"{sector} Q r={r} p={p}",
                        lambda braided=braided, p=p: compare_operators(
                            Y_from_F_Q(F_Q(braided, p), p), braided, ROUNDTRIP_GRADE,
                            'Q round trip'),
                        'Y_(F_Q(B_r(Y),p),p) = B_r(Y)'))

        lam, mu = run.config.sector_pairs[0]
        operator = fock_intertwiner(ctx, lam, mu)
        p = run.config.branch_p[0]

        def corrupted_roundtrip():
            return compare_operators(Y_from_F_P(F_P(operator, p).corrupted(), p), operator,
                                     ROUNDTRIP_GRADE, 'P round trip of a corrupted table')

        out.append(SuiteCase('corrupted table detected', corrupted_roundtrip,
                             'a perturbed F_P entry breaks the round trip', expect=Verdict.FAIL))
        if run.config.inject_corruption:
            out.append(SuiteCase('injected corruption', corrupted_roundtrip, 'Y_(F_P(Y,p),p) = Y'))
        return out
