"""
VTensor v1.0 - Delta-function calculus suite
The substitution property of delta(x), the displayed expansions of
x0^-1 delta((x1 - x2)/x0) and the two- and three-term delta identities.
"""

import logging
from fractions import Fraction
from typing import List, Mapping, Tuple

from vtensor.core.kernels import DeltaKernel, mono
from vtensor.core.outcome import CheckOutcome, Verdict
from vtensor.core.scalars import ScalarContext
from vtensor.core.series import FormalSeries, Interval, binomial, closed, delta, equal_on_window
from vtensor.errors import IllDefinedProductError
from vtensor.suites._helpers import DELTA_WINDOW
from vtensor.suites.base import BaseSuite, SuiteCase, SuiteContext, register_suite

logger = logging.getLogger(__name__)

# Laurent polynomials {exponent: coefficient} for the substitution property
SAMPLE_POLYNOMIALS: Tuple[Mapping[int, Fraction], ...] = (
    {1: Fraction(2), -2: Fraction(-3)},
    {0: Fraction(1)},
    {-3: Fraction(1, 2), 2: Fraction(-5, 3), 4: Fraction(7)},
)


def _laurent(ctx: ScalarContext, coeffs: Mapping[int, Fraction]) -> FormalSeries:
    return FormalSeries.polynomial(ctx, ('x',), {(Fraction(e),): ctx.scalar(c)
                                                for e, c in coeffs.items()})


def _three_variable_window() -> Mapping[str, Interval]:
    return {'x0': DELTA_WINDOW, 'x1': DELTA_WINDOW, 'x2': DELTA_WINDOW}


def jacobi_kernels(ctx: ScalarContext) -> Tuple[DeltaKernel, DeltaKernel, DeltaKernel]:
    """x0^-1 d((x1-x2)/x0), x0^-1 d((x2-x1)/(-x0)), x2^-1 d((x1-x0)/x2)."""
    return (
        DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, -1, x2=1),
                    mono(ctx, 1, x0=1), 'x0^-1 d((x1-x2)/x0)'),
        DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x2=1), mono(ctx, -1, x1=1),
                    mono(ctx, -1, x0=1), 'x0^-1 d((x2-x1)/(-x0))'),
        DeltaKernel(mono(ctx, 1, x2=-1), mono(ctx, 1, x1=1), mono(ctx, -1, x0=1),
                    mono(ctx, 1, x2=1), 'x2^-1 d((x1-x0)/x2)'),
    )


def check_substitution_property(ctx: ScalarContext, coeffs: Mapping[int, Fraction],
                                window: Interval = DELTA_WINDOW) -> CheckOutcome:
    """f(x) delta(x) = f(1) delta(x) for a Laurent polynomial f."""
    f = _laurent(ctx, coeffs)
    lo = min(coeffs)
    hi = max(coeffs)
    # wide enough that the product stays certified on window
    d = delta(ctx, 'x', closed(window.lo - max(hi, 0), window.hi - min(lo, 0)))
    f_at_one = ctx.zero
    for _, c in f.items():
        f_at_one = f_at_one + c
    comparison = equal_on_window(f.mul(d), d.scale(f_at_one), {'x': window})
    return CheckOutcome.from_comparison('f(x)delta(x)=f(1)delta(x)', comparison, {'x': window},
                                        f={str(e): str(c) for e, c in sorted(coeffs.items())})


def check_delta_expansion(ctx: ScalarContext, window: Interval = DELTA_WINDOW) -> CheckOutcome:
    """x0^-1 delta((x1 - x2)/x0) has (-1)^m C(n, m) at x0^(-n-1) x1^(n-m) x2^m."""
    kernel = jacobi_kernels(ctx)[0]
    box = _three_variable_window()
    terms = {}
    span = int(window.hi - window.lo)
    for n in range(-2 * span, 2 * span + 1):
        for m in range(0, 2 * span + 1):
            exps = (Fraction(-n - 1), Fraction(n - m), Fraction(m))
            if not all(window.contains(e) for e in exps):
                continue
            c = binomial(n, m)
            if c:
                terms[exps] = ctx.scalar(c * (-1) ** m)
    expected = FormalSeries(ctx, ('x0', 'x1', 'x2'), terms, [window] * 3)
    comparison = equal_on_window(kernel.materialize(box), expected, box)
    return CheckOutcome.from_comparison('delta expansion coefficients', comparison, box)


def check_three_term_identity(ctx: ScalarContext) -> CheckOutcome:
    """x0^-1 d((x1-x2)/x0) - x0^-1 d((x2-x1)/(-x0)) = x2^-1 d((x1-x0)/x2)."""
    box = _three_variable_window()
    a, b, c = (k.materialize(box) for k in jacobi_kernels(ctx))
    comparison = equal_on_window(a - b, c, box)
    return CheckOutcome.from_comparison('three-term delta identity', comparison, box)


def check_two_term_identity(ctx: ScalarContext) -> CheckOutcome:
    """x1^-1 d((x2+x0)/x1) = x2^-1 d((x1-x0)/x2)."""
    box = _three_variable_window()
    left = DeltaKernel(mono(ctx, 1, x1=-1), mono(ctx, 1, x2=1), mono(ctx, 1, x0=1),
                       mono(ctx, 1, x1=1), 'x1^-1 d((x2+x0)/x1)')
    right = jacobi_kernels(ctx)[2]
    comparison = equal_on_window(left.materialize(box), right.materialize(box), box)
    return CheckOutcome.from_comparison('two-term delta identity', comparison, box)


def check_residue(ctx: ScalarContext) -> CheckOutcome:
    """Res_x0 x0^-1 delta((x1 - x2)/x0) = 1."""
    box = _three_variable_window()
    residue = jacobi_kernels(ctx)[0].materialize(box).residue('x0')
    inner = {'x1': DELTA_WINDOW, 'x2': DELTA_WINDOW}
    one = FormalSeries(ctx, ('x1', 'x2'), {(Fraction(0), Fraction(0)): ctx.one}, [DELTA_WINDOW] * 2)
    return CheckOutcome.from_comparison('Res_x0 of the delta expansion', equal_on_window(residue, one, inner),
                                        inner)


def check_inversion_symmetry(ctx: ScalarContext) -> CheckOutcome:
    """delta(x^-1) = delta(x)."""
    d = delta(ctx, 'x', DELTA_WINDOW)
    flipped = d.substitute_monomial('x', ctx.one, {'x': -1})
    window = {'x': DELTA_WINDOW}
    return CheckOutcome.from_comparison('delta(x^-1)=delta(x)', equal_on_window(flipped, d, window),
                                        window)


def check_square_is_ill_defined(ctx: ScalarContext) -> CheckOutcome:
    """delta(x) * delta(x) needs infinite sums and must be refused."""
    name = 'delta(x)^2 refused'
    d = delta(ctx, 'x', DELTA_WINDOW)
    try:
        d.mul(d)
    except IllDefinedProductError as e:
        return CheckOutcome(name, Verdict.PASS, {'x': DELTA_WINDOW.to_json()},
                            None, 1, {'refusal': str(e)})
    return CheckOutcome.failure(name, {'reason': 'product was computed'})


@register_suite
class DeltaCalculusSuite(BaseSuite):
    name = 'delta-calculus'
    identity = 'formal delta-function calculus'
    description = 'substitution property, expansions and delta identities'
    anchor = 'formal delta-function identities'

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        out = []
        for i, coeffs in enumerate(SAMPLE_POLYNOMIALS):
            out.append(SuiteCase(f"substitution-{i}",
                                 lambda coeffs=coeffs: check_substitution_property(ctx, coeffs),
                                 'f(x) delta(x) = f(1) delta(x)'))
        out.extend([
            SuiteCase('expansion', lambda: check_delta_expansion(ctx),
                      'x0^-1 delta((x1-x2)/x0) = sum (-1)^m C(n,m) x0^(-n-1) x1^(n-m) x2^m'),
            SuiteCase('three-term', lambda: check_three_term_identity(ctx),
                      'x0^-1 d((x1-x2)/x0) - x0^-1 d((x2-x1)/(-x0)) = x2^-1 d((x1-x0)/x2)'),
            SuiteCase('two-term', lambda: check_two_term_identity(ctx),
                      'x1^-1 d((x2+x0)/x1) = x2^-1 d((x1-x0)/x2)'),
            SuiteCase('residue', lambda: check_residue(ctx), 'Res_x0 x0^-1 d((x1-x2)/x0) = 1'),
            SuiteCase('inversion', lambda: check_inversion_symmetry(ctx), 'delta(x^-1) = delta(x)'),
            SuiteCase('square-refused', lambda: check_square_is_ill_defined(ctx),
                      'delta(x)^2 is not defined'),
        ])
        return out
