"""
VTensor v1.0 - Conjugation formula suite
Conjugating Y and Y* by e^(zeta L(1)) and by c^(L(0)).
"""

import logging
from fractions import Fraction
from typing import List, Tuple

from vtensor.core.axioms import (
    check_L0_conjugation, check_L1_conjugation, check_opposite_rescaling,
    check_opposite_translation,
)
from vtensor.core.fock import PSI_L0, L0Factor, heisenberg, omega
from vtensor.core.scalars import Scalar, ScalarContext
from vtensor.suites._helpers import CONJUGATION_EXPONENTS, module_basis, run_all
from vtensor.suites.base import BaseSuite, SuiteCase, SuiteContext, register_suite

logger = logging.getLogger(__name__)


def zeta_samples(ctx: ScalarContext) -> List[Tuple[str, Scalar]]:
    """z^-1, -z^-1 and 2."""
    return [('z^-1', ctx.z_power(-1)), ('-z^-1', ctx.z_power(-1, -1)), ('2', ctx.scalar(2))]


def rescaling_samples(ctx: ScalarContext) -> List[Tuple[str, Scalar]]:
    """Monomials c for c^(L(0)); only integer powers of c are ever taken."""
    return [('2', ctx.scalar(2)), ('-z^-2', ctx.z_power(-2, -1)), ('z', ctx.z_power(1))]


# Factors c^(L(0)) defined on every weight of F_(1/d): the z-exponent times a
# weight stays in (1/N)Z and the phase times a weight is a root of unity of order M.
L0_FACTORS = (
    ('(-z^-2)^L(0)', PSI_L0),
    ('(-z^2)^L(0)', PSI_L0.inverse()),
    ('(z^2)^L(0)', L0Factor(Fraction(2))),
)


@register_suite
class ConjugationSuite(BaseSuite):
    name = 'conjugation-formulas'
    identity = 'conjugation by e^(zeta L(1)) and c^(L(0))'
    description = 'L(1) and L(0) conjugation of Y and Y*'
    anchor = 'L(1) and L(0) conjugation formulas'

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        mu = Fraction(1, run.config.momentum_denominator)
        vectors = [heisenberg(ctx), omega(ctx)]
        module = module_basis(ctx, mu, 2)
        out = []
        for label, zeta in zeta_samples(ctx):
            out.append(SuiteCase(
                f"Y L(1) zeta={label}",
                lambda zeta=zeta: run_all('L(1)-conjugation of Y', (
                    check_L1_conjugation(v, w, zeta, CONJUGATION_EXPONENTS)
                    for v in vectors for w in module)),
                'e^(zeta L(1)) Y(v,x) e^(-zeta L(1)) = '
                'Y(e^(zeta(1-zeta x) L(1)) (1-zeta x)^(-2L(0)) v, x/(1-zeta x))'))
            out.append(SuiteCase(
                f"Y* L(1) zeta={label}",
                lambda zeta=zeta: run_all('L(1)-conjugation of Y*', (
                    check_opposite_translation(v, w, zeta, CONJUGATION_EXPONENTS)
                    for v in vectors for w in module)),
                'e^(zeta L(1)) Y*(v,x) e^(-zeta L(1)) = Y*(v, x - zeta)'))
        for label, c in rescaling_samples(ctx):
            out.append(SuiteCase(
                f"Y* L(0) c={label}",
                lambda c=c: run_all('L(0)-conjugation of Y*', (
                    check_opposite_rescaling(v, w, c, CONJUGATION_EXPONENTS)
                    for v in vectors for w in module)),
                'c^L(0) Y*(v,x) c^-L(0) = Y*(c^-L(0) v, x/c)'))
        for label, factor in L0_FACTORS:
            for a_label, a in zeta_samples(ctx):
                out.append(SuiteCase(
                    f"e^L(1) {label} a={a_label}",
                    lambda factor=factor, a=a: run_all('L(0)-conjugation of e^(L(1))', (
                        check_L0_conjugation(w, a, factor) for w in module)),
                    'c^L(0) e^(a L(1)) c^-L(0) = e^((a/c) L(1))'))
        return out
