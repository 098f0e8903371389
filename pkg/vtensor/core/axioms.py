"""
VTensor v1.0 - Vertex algebra axioms and conjugation formulas
Mode-level checks of (V, Y) on Fock modules: vacuum and creation
properties, the Borcherds identity, Virasoro brackets and the formulas
for conjugating Y and Y* by exponentials of L(1) and L(0).
"""

import logging
from fractions import Fraction
from typing import Iterable, Optional

from vtensor.core.fock import (
    FockVector, L0Factor, algebra_weight, exp_L1, intertwiner_coefficient, l1_terms, mode,
    opposite_mode, scale_L0, vacuum, vertex_Y, virasoro_L,
)
from vtensor.core.outcome import CheckOutcome, Verdict
from vtensor.core.scalars import Scalar, fmt_rational
from vtensor.core.series import binomial

logger = logging.getLogger(__name__)


def _mismatch(name: str, left: FockVector, right: FockVector, **where) -> Optional[CheckOutcome]:
    if left == right:
        return None
    witness = {k: (fmt_rational(v) if isinstance(v, Fraction) else v) for k, v in where.items()}
    witness.update(left=left.to_json(), right=right.to_json())
    return CheckOutcome.failure(name, witness)


def _passed(name: str, compared: int, **details) -> CheckOutcome:
    return CheckOutcome(name, Verdict.PASS, {k: v for k, v in details.items() if k == 'grade'},
                        None, compared, {k: v for k, v in details.items() if k != 'grade'})


def _scalar(w: FockVector, value) -> Scalar:
    return value if isinstance(value, Scalar) else w.ctx.scalar(value)


# -----------------------------------------------------------------------------
# Axioms
# -----------------------------------------------------------------------------

def check_vacuum_property(w: FockVector, max_grade: int) -> CheckOutcome:
    """Y(1, x) w = w."""
    name = 'vacuum property'
    series = vertex_Y(vacuum(w.ctx), w, max_grade)
    expected = w.truncate(max_grade)
    for e, coeff in series.items():
        target = expected if e == 0 else FockVector.zero(w.ctx, w.momentum)
        failed = _mismatch(name, coeff, target, exponent=e)
        if failed:
            return failed
    if expected and 0 not in series:
        return CheckOutcome.failure(name, {'exponent': '0', 'left': None, 'right': expected.to_json()})
    return _passed(name, len(series), grade=[0, max_grade], vector=repr(w))


def check_creation_property(v: FockVector, max_grade: int) -> CheckOutcome:
    """Y(v, x) 1 has no negative powers of x and constant term v."""
    name = 'creation property'
    series = vertex_Y(v, vacuum(v.ctx), max_grade)
    for e, coeff in series.items():
        if e < 0:
            return CheckOutcome.failure(name, {'exponent': fmt_rational(e), 'left': coeff.to_json(),
                                               'right': 0})
    constant = series.get(Fraction(0), FockVector.zero(v.ctx, 0))
    failed = _mismatch(name, constant, v.truncate(max_grade), exponent=Fraction(0))
    return failed or _passed(name, len(series), grade=[0, max_grade], vector=repr(v))


def check_borcherds_identity(u: FockVector, v: FockVector, w: FockVector,
                             m: int, n: int, l: int) -> CheckOutcome:
    """sum_i C(m, i) (u_(n+i) v)_(m+l-i) w
         = sum_i (-1)^i C(n, i) (u_(m+n-i) v_(l+i) w - (-1)^n v_(n+l-i) u_(m+i) w)."""
    name = 'Borcherds identity'
    bound = algebra_weight(u) + algebra_weight(v) + max(w.max_grade, 0) \
        + abs(m) + abs(n) + abs(l) + 2
    zero = FockVector.zero(w.ctx, w.momentum)
    left = zero
    right = zero
    sign_n = -1 if n % 2 else 1
    for i in range(bound + 1):
        c = binomial(m, i)
        if c:
            inner = mode(u, n + i, v)
            if inner:
                left = left + mode(inner, m + l - i, w) * c
        c = binomial(n, i)
        if c:
            sign = -1 if i % 2 else 1
            first = mode(u, m + n - i, mode(v, l + i, w))
            second = mode(v, n + l - i, mode(u, m + i, w))
            right = right + (first - second * sign_n) * (sign * c)
    failed = _mismatch(name, left, right, m=m, n=n, l=l)
    return failed or _passed(name, 1, u=repr(u), v=repr(v), w=repr(w), modes=[m, n, l])


def check_virasoro_relation(m: int, n: int, w: FockVector) -> CheckOutcome:
    """[L(m), L(n)] = (m - n) L(m + n) + (m^3 - m)/12 delta_(m+n,0), central charge 1."""
    name = 'Virasoro relation'
    left = virasoro_L(m, virasoro_L(n, w)) - virasoro_L(n, virasoro_L(m, w))
    right = virasoro_L(m + n, w) * (m - n)
    if m + n == 0:
        right = right + w * Fraction(m ** 3 - m, 12)
    failed = _mismatch(name, left, right, m=m, n=n)
    return failed or _passed(name, 1, modes=[m, n], vector=repr(w))


# -----------------------------------------------------------------------------
# Conjugation formulas
# -----------------------------------------------------------------------------

def check_L1_conjugation(v: FockVector, w: FockVector, zeta,
                         exponents: Iterable[int]) -> CheckOutcome:
    """e^(zeta L(1)) Y(v, x) e^(-zeta L(1))
         = Y(e^(zeta (1 - zeta x) L(1)) (1 - zeta x)^(-2 L(0)) v, x/(1 - zeta x)),

    coefficient of x^e on w, with the right side expanded in powers of zeta x.
    """
    name = 'L(1)-conjugation of Y'
    zeta = _scalar(w, zeta)
    g_w = max(w.max_grade, 0)
    shifted = exp_L1(-zeta, w)
    compared = 0
    for e in exponents:
        left = exp_L1(zeta, mode(v, -e - 1, shifted))
        right = FockVector.zero(w.ctx, w.momentum)
        for h in v.grades():
            for k, u in enumerate(l1_terms(v.component(h))):
                # x^(-n-1) (1 - zeta x)^(k - 2h + n + 1), m-th term lands at x^e
                for m in range(0, g_w + h - k + e + 1):
                    n_mode = m - e - 1
                    c = binomial(k - 2 * h + n_mode + 1, m)
                    if not c:
                        continue
                    moved = mode(u, n_mode, w)
                    if moved:
                        right = right + moved * (zeta.power(k) * (-zeta).power(m) * c)
        compared += 1
        failed = _mismatch(name, left, right, exponent=e, zeta=repr(zeta))
        if failed:
            return failed
    return _passed(name, compared, v=repr(v), w=repr(w), zeta=repr(zeta))


def check_opposite_translation(v: FockVector, w: FockVector, zeta,
                               exponents: Iterable[int]) -> CheckOutcome:
    """e^(zeta L(1)) Y*(v, x) e^(-zeta L(1)) = Y*(v, x - zeta), expanded in powers of zeta."""
    name = 'L(1)-conjugation of Y*'
    zeta = _scalar(w, zeta)
    g_w = max(w.max_grade, 0)
    shifted = exp_L1(-zeta, w)
    compared = 0
    for e in exponents:
        left = exp_L1(zeta, opposite_mode(v, e, shifted))
        right = FockVector.zero(w.ctx, w.momentum)
        for m in range(0, g_w - e + 1):
            c = binomial(e + m, m)
            if c:
                moved = opposite_mode(v, e + m, w)
                if moved:
                    right = right + moved * ((-zeta).power(m) * c)
        compared += 1
        failed = _mismatch(name, left, right, exponent=e, zeta=repr(zeta))
        if failed:
            return failed
    return _passed(name, compared, v=repr(v), w=repr(w), zeta=repr(zeta))


def check_opposite_rescaling(v: FockVector, w: FockVector, c,
                             exponents: Iterable[int]) -> CheckOutcome:
    """c^(L(0)) Y*(v, x) c^(-L(0)) = Y*(c^(-L(0)) v, c^-1 x) for a monomial c = e^zeta.

    Y* moves weights by integers, so only integer powers of c occur.
    """
    name = 'L(0)-conjugation of Y*'
    c = _scalar(w, c)
    compared = 0
    for s in exponents:
        left = FockVector.zero(w.ctx, w.momentum)
        for g in w.grades():
            image = opposite_mode(v, s, w.component(g))
            for g_out in image.grades():
                left = left + image.component(g_out) * c.power(g_out - g)
        right = FockVector.zero(w.ctx, w.momentum)
        for h in v.grades():
            moved = opposite_mode(v.component(h), s, w)
            if moved:
                right = right + moved * c.power(-h - s)
        compared += 1
        failed = _mismatch(name, left, right, exponent=s, c=repr(c))
        if failed:
            return failed
    return _passed(name, compared, v=repr(v), w=repr(w), c=repr(c))


def check_L0_conjugation(w: FockVector, a, factor: L0Factor) -> CheckOutcome:
    """c^(L(0)) e^(a L(1)) c^(-L(0)) = e^((a/c) L(1)) with c^(L(0)) given by factor."""
    name = 'L(0)-conjugation of e^(L(1))'
    a = _scalar(w, a)
    left = scale_L0(factor, exp_L1(a, scale_L0(factor.inverse(), w)))
    right = exp_L1(a / factor.base(w.ctx), w)
    failed = _mismatch(name, left, right, a=repr(a))
    return failed or _passed(name, 1, vector=repr(w), a=repr(a))


def check_vertex_grading(v: FockVector, w: FockVector, max_grade: int) -> CheckOutcome:
    """The x^e coefficient of Y(v, x) w has weight wt v + wt w + e exactly."""
    name = 'vertex operator grading'
    compared = 0
    for h in v.grades():
        for g in w.grades():
            for e, coeff in vertex_Y(v.component(h), w.component(g), max_grade).items():
                expected = g + h + e
                compared += 1
                if coeff.grades() != [expected]:
                    return CheckOutcome.failure(name, {
                        'exponent': fmt_rational(e), 'left': coeff.grades(), 'right': [fmt_rational(expected)],
                    })
    return _passed(name, compared, grade=[0, max_grade], v=repr(v), w=repr(w))


def check_intertwiner_leading_term(v: FockVector, w: FockVector) -> CheckOutcome:
    """Y(e^lam, x) e^mu = x^(lam mu) (e^(lam+mu) + higher powers)."""
    name = 'intertwiner leading term'
    lam, mu = v.momentum, w.momentum
    lowest = intertwiner_coefficient(v, lam * mu, w)
    expected = FockVector.basis_vector(v.ctx, lam + mu)
    failed = _mismatch(name, lowest, expected, exponent=lam * mu)
    if failed:
        return failed
    below = intertwiner_coefficient(v, lam * mu - 1, w)
    if below:
        return CheckOutcome.failure(name, {'exponent': fmt_rational(lam * mu - 1),
                                           'left': below.to_json(), 'right': 0})
    return _passed(name, 2, lam=fmt_rational(lam), mu=fmt_rational(mu))
