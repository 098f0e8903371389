"""
VTensor v1.0 - Intertwining operators and intertwining maps

Fock intertwining operators of type (F_(lam+mu); F_lam F_mu), the
P(z)- and Q(z)-intertwining maps obtained from them by x -> e^(l_p(z)),
the inverse recoveries, the contragredient-type operator B_r(Y), and the
delta-function identities each of these objects must satisfy.

Everything is evaluated on demand: an intertwining map is a lazy table
(basis pair, grade) -> vector, and identity checks compare lazy series on
finite exponent windows.
"""

import logging
import math
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from vtensor.core.fock import (
    FockVector, Partition, basis, basis_upto, contragredient_mode,
    intertwiner_coefficient, l1_terms, mode, omega, opposite_mode, pairing, virasoro_L,
)
from vtensor.core.kernels import DeltaKernel, LazySeries, compare_lazy, kernel_product, mono
from vtensor.core.outcome import CheckOutcome, Verdict, window_json
from vtensor.core.scalars import Rational, Scalar, ScalarContext, fmt_rational
from vtensor.core.series import Interval
from vtensor.errors import IllDefinedProductError

logger = logging.getLogger(__name__)


# -----------------------------------------------------------------------------
# Intertwining operators
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class IntertwinerSpec:
    """Source momenta of a Fock intertwiner; the target is fixed by fusion."""
    lam: Fraction
    mu: Fraction
    normalization: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, 'lam', Fraction(self.lam))
        object.__setattr__(self, 'mu', Fraction(self.mu))
        object.__setattr__(self, 'normalization', Fraction(self.normalization))

    @property
    def target(self) -> Fraction:
        return self.lam + self.mu

    @property
    def offset(self) -> Fraction:
        """Exponents of the operator lie in offset + Z."""
        return self.lam * self.mu

    def label(self) -> str:
        return f"Y[{fmt_rational(self.lam)},{fmt_rational(self.mu)}]"


class IntertwiningOperator(ABC):
    """A series O(w1, x) w2 = sum_e coefficient(w1, e, w2) x^e.

    first, second and target are the sector momenta of w1, w2 and of the
    coefficients. Subclasses fix exponent_for, which gives the exponent
    carrying a (first grade, second grade) pair to a target grade.
    """

    def __init__(self, ctx: ScalarContext, first: Rational, second: Rational,
                 target: Rational, label: str):
        self.ctx = ctx
        self.first = Fraction(first)
        self.second = Fraction(second)
        self.target = Fraction(target)
        self.label = label

    def _check(self, w1: FockVector, w2: FockVector) -> None:
        if w1.momentum != self.first or w2.momentum != self.second:
            raise ValueError(
                f"{self.label} takes F_{fmt_rational(self.first)} x F_{fmt_rational(self.second)}, "
                f"got F_{fmt_rational(w1.momentum)} x F_{fmt_rational(w2.momentum)}")

    @abstractmethod
    def coefficient(self, w1: FockVector, exponent: Rational, w2: FockVector) -> FockVector:
        ...

    @abstractmethod
    def exponent_for(self, g1: int, g2: int, g_out: int) -> Fraction:
        ...

    def exponents(self, w1: FockVector, w2: FockVector, max_grade: int) -> List[Fraction]:
        found = {self.exponent_for(a, b, g)
                 for a in w1.grades() for b in w2.grades() for g in range(max_grade + 1)}
        return sorted(found)

    def series(self, w1: FockVector, w2: FockVector, max_grade: int) -> Dict[Fraction, FockVector]:
        """{exponent: coefficient} with coefficients cut to grades <= max_grade."""
        out = {}
        for e in self.exponents(w1, w2, max_grade):
            coeff = self.coefficient(w1, e, w2).truncate(max_grade)
            if coeff:
                out[e] = coeff
        return out


class FockIntertwiner(IntertwiningOperator):
    """The normal-ordered exponential intertwiner, times a scalar."""

    def __init__(self, ctx: ScalarContext, spec: IntertwinerSpec, scale: Optional[Scalar] = None):
        super().__init__(ctx, spec.lam, spec.mu, spec.target, spec.label())
        self.spec = spec
        self.scale = ctx.scalar(spec.normalization) if scale is None else scale * spec.normalization

    def coefficient(self, w1: FockVector, exponent: Rational, w2: FockVector) -> FockVector:
        self._check(w1, w2)
        if (Fraction(exponent) - self.spec.offset).denominator != 1:
            return FockVector.zero(self.ctx, self.target)
        return intertwiner_coefficient(w1, exponent, w2) * self.scale

    def exponent_for(self, g1: int, g2: int, g_out: int) -> Fraction:
        return self.spec.offset + g_out - g1 - g2

    def scaled(self, factor) -> 'FockIntertwiner':
        if not isinstance(factor, Scalar):
            factor = self.ctx.scalar(factor)
        return FockIntertwiner(self.ctx, IntertwinerSpec(self.spec.lam, self.spec.mu),
                               self.scale * factor)


def exp_intertwiner(ctx: ScalarContext, spec: IntertwinerSpec, w1: FockVector, w2: FockVector,
                    max_grade: int) -> Dict[Fraction, FockVector]:
    """Y(w1, x) w2 for the Fock intertwiner, as {exponent: vector in F_(lam+mu)}."""
    return FockIntertwiner(ctx, spec).series(w1, w2, max_grade)


# -----------------------------------------------------------------------------
# Intertwining maps
# -----------------------------------------------------------------------------

ComponentFn = Callable[[Partition, Partition, int], FockVector]


class IntertwiningMapTable:
    """F: F_lam (x) F_mu -> completion of F_(lam+mu), known grade by grade.

    component(p1, p2, g) is the grade-g part of F(b1 (x) b2) for the basis
    vectors with partitions p1, p2. Entries are computed on first use.
    """

    def __init__(self, ctx: ScalarContext, lam: Rational, mu: Rational, kind: str,
                 fn: ComponentFn, label: str,
                 overrides: Optional[Mapping[Tuple[Partition, Partition, int], FockVector]] = None):
        self.ctx = ctx
        self.lam = Fraction(lam)
        self.mu = Fraction(mu)
        self.target = self.lam + self.mu
        self.kind = kind
        self.label = label
        self._fn = fn
        self._overrides = dict(overrides or {})
        self._memo: Dict[Tuple[Partition, Partition, int], FockVector] = {}
        self._lock = threading.Lock()

    def component(self, p1: Partition, p2: Partition, grade: int) -> FockVector:
        if grade < 0:
            return FockVector.zero(self.ctx, self.target)
        key = (tuple(p1), tuple(p2), grade)
        if key in self._overrides:
            return self._overrides[key]
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        value = self._fn(*key)
        with self._lock:
            self._memo[key] = value
        return value

    def apply(self, w1: FockVector, w2: FockVector, grade: int) -> FockVector:
        if w1.momentum != self.lam or w2.momentum != self.mu:
            raise ValueError(f"{self.label} applied outside F_{self.lam} x F_{self.mu}")
        total = FockVector.zero(self.ctx, self.target)
        for p1, c1 in w1.items():
            for p2, c2 in w2.items():
                comp = self.component(p1, p2, grade)
                if comp:
                    total = total + comp * (c1 * c2)
        return total

    def pair(self, dual: FockVector, w1: FockVector, w2: FockVector) -> Scalar:
        """<dual, F(w1 (x) w2)> for a finite dual vector of F_(lam+mu)'."""
        total = self.ctx.zero
        for g in dual.grades():
            total = total + pairing(dual.component(g), self.apply(w1, w2, g))
        return total

    def with_override(self, p1: Partition, p2: Partition, grade: int,
                      value: FockVector) -> 'IntertwiningMapTable':
        overrides = dict(self._overrides)
        overrides[(tuple(p1), tuple(p2), grade)] = value
        return IntertwiningMapTable(self.ctx, self.lam, self.mu, self.kind, self._fn,
                                    f"{self.label}~", overrides)

    def corrupted(self, p1: Partition = (), p2: Partition = (), grade: Optional[int] = None,
                  delta: Rational = 1) -> 'IntertwiningMapTable':
        """Copy with one coefficient perturbed; the perturbed entry defaults to the lowest one."""
        if grade is None:
            grade = sum(p1) + sum(p2)
        bump = FockVector.basis_vector(self.ctx, self.target, (1,) * grade, delta)
        return self.with_override(p1, p2, grade, self.component(p1, p2, grade) + bump)

    def scaled(self, factor) -> 'IntertwiningMapTable':
        fn = self._fn
        return IntertwiningMapTable(self.ctx, self.lam, self.mu, self.kind,
                                    lambda p1, p2, g: fn(p1, p2, g) * factor,
                                    f"{self.label}*c",
                                    {k: v * factor for k, v in self._overrides.items()})

    def to_json(self, max_grade: int) -> Dict[str, object]:
        entries = []
        for b1 in basis_upto(self.lam, max_grade):
            for b2 in basis_upto(self.mu, max_grade - b1.grade):
                for g in range(max_grade + 1):
                    comp = self.component(b1.partition, b2.partition, g)
                    if comp:
                        entries.append({'w1': str(b1), 'w2': str(b2), 'grade': g,
                                        'value': comp.to_json()})
        return {'kind': self.kind, 'label': self.label,
                'lam': fmt_rational(self.lam), 'mu': fmt_rational(self.mu), 'entries': entries}

    def __repr__(self) -> str:
        return f"IntertwiningMapTable({self.kind}, {self.label})"


def F_P(operator: IntertwiningOperator, p: int) -> IntertwiningMapTable:
    """F(w1 (x) w2) = Y(w1, e^(l_p(z))) w2, the P(z)-intertwining map of Y."""
    ctx = operator.ctx
    lam, mu = operator.first, operator.second

    def fn(p1: Partition, p2: Partition, g: int) -> FockVector:
        e = operator.exponent_for(sum(p1), sum(p2), g)
        coeff = operator.coefficient(FockVector.basis_vector(ctx, lam, p1), e,
                                     FockVector.basis_vector(ctx, mu, p2))
        return coeff.component(g) * ctx.exp_lp(e, p)

    logger.debug("F_P table for %s at p=%d", operator.label, p)
    return IntertwiningMapTable(ctx, lam, mu, 'P', fn, f"F_P({operator.label},p={p})")


class RecoveredIntertwiner(IntertwiningOperator):
    """Y_(F,p): coefficient of x^e is the grade projection of F times e^(-e l_p(z))."""

    def __init__(self, table: IntertwiningMapTable, p: int):
        super().__init__(table.ctx, table.lam, table.mu, table.target,
                         f"Y({table.label},p={p})")
        self.table = table
        self.p = p

    def exponent_for(self, g1: int, g2: int, g_out: int) -> Fraction:
        return self.first * self.second + g_out - g1 - g2

    def coefficient(self, w1: FockVector, exponent: Rational, w2: FockVector) -> FockVector:
        self._check(w1, w2)
        exponent = Fraction(exponent)
        total = FockVector.zero(self.ctx, self.target)
        unwind = self.ctx.exp_lp(-exponent, self.p)
        for p1, c1 in w1.items():
            for p2, c2 in w2.items():
                g = exponent - self.first * self.second + sum(p1) + sum(p2)
                if g.denominator != 1 or g < 0:
                    continue
                comp = self.table.component(p1, p2, int(g))
                if comp:
                    total = total + comp * (c1 * c2 * unwind)
        return total


def Y_from_F_P(table: IntertwiningMapTable, p: int) -> RecoveredIntertwiner:
    if table.kind != 'P':
        raise ValueError(f"{table.label} is not a P(z)-intertwining map")
    return RecoveredIntertwiner(table, p)


# -----------------------------------------------------------------------------
# Contragredient-type operators: type (F_lam'; F_(lam+mu)' F_mu)
# -----------------------------------------------------------------------------

class ContragredientOperator(IntertwiningOperator):
    """O(c', x) b2 with values in F_lam', described by its matrix elements.

    matrix_element(p1, pc, p2) is the coefficient of x^s in
    <b1, O(c', x) b2> for basis b1, dual basis c' and basis b2; there is a
    single exponent s = wt b1 - wt c - wt b2.
    """

    def __init__(self, ctx: ScalarContext, lam: Rational, mu: Rational, label: str):
        lam, mu = Fraction(lam), Fraction(mu)
        super().__init__(ctx, lam + mu, mu, lam, label)
        self.lam, self.mu = lam, mu
        self._memo: Dict[Tuple[Partition, Partition, Partition], Scalar] = {}
        self._lock = threading.Lock()

    def matrix_exponent(self, g1: int, gc: int, g2: int) -> Fraction:
        return (self.lam ** 2 / 2 + g1) - (self.first ** 2 / 2 + gc) - (self.mu ** 2 / 2 + g2)

    def exponent_for(self, gc: int, g2: int, g_out: int) -> Fraction:
        return self.matrix_exponent(g_out, gc, g2)

    @abstractmethod
    def _matrix_element(self, p1: Partition, pc: Partition, p2: Partition) -> Scalar:
        ...

    def matrix_element(self, p1: Partition, pc: Partition, p2: Partition) -> Scalar:
        key = (tuple(p1), tuple(pc), tuple(p2))
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        value = self._matrix_element(*key)
        with self._lock:
            self._memo[key] = value
        return value

    def coefficient(self, dual: FockVector, exponent: Rational, w2: FockVector) -> FockVector:
        self._check(dual, w2)
        exponent = Fraction(exponent)
        out: Dict[Partition, Scalar] = {}
        for pc, cc in dual.items():
            for p2, c2 in w2.items():
                g1 = exponent + self.first ** 2 / 2 + sum(pc) + self.mu ** 2 / 2 + sum(p2) \
                    - self.lam ** 2 / 2
                if g1.denominator != 1 or g1 < 0:
                    continue
                for b1 in basis(self.lam, int(g1)):
                    value = self.matrix_element(b1.partition, pc, p2)
                    if value:
                        value = value * (cc * c2)
                        out[b1.partition] = out[b1.partition] + value if b1.partition in out else value
        return FockVector(self.ctx, self.lam, out)


class BraidedIntertwiner(ContragredientOperator):
    """B_r(Y), defined through

    <b1, B_r(Y)(c', x) b2> = <e^(-x^-1 L'(1)) c', Y(e^(x L(1)) b1, x^-1)
                              e^(-x L(1)) e^((2r+1) pi i L(0)) x^(-2 L(0)) b2>.
    """

    def __init__(self, operator: IntertwiningOperator, r: int):
        super().__init__(operator.ctx, operator.first, operator.second,
                         f"B_{r}({operator.label})")
        self.operator = operator
        self.r = r

    def _matrix_element(self, p1: Partition, pc: Partition, p2: Partition) -> Scalar:
        ctx = self.ctx
        b1 = FockVector.basis_vector(ctx, self.lam, p1)
        b2 = FockVector.basis_vector(ctx, self.mu, p2)
        dual = FockVector.basis_vector(ctx, self.first, pc)
        h2 = self.mu ** 2 / 2 + sum(p2)
        h3 = self.first ** 2 / 2 + sum(pc)
        total = ctx.zero
        for a, u in enumerate(l1_terms(b1)):
            for b, w in enumerate(l1_terms(b2)):
                sign_b = -1 if b % 2 else 1
                wt_u = self.lam ** 2 / 2 + sum(p1) - a
                wt_w = h2 - b
                for k in range(sum(pc) + 1):
                    # Y coefficient at (x^-1)^e landing in weight h3 - k
                    e = h3 - k - wt_u - wt_w
                    y = self.operator.coefficient(u, e, w).component(sum(pc) - k)
                    if not y:
                        continue
                    for _ in range(k):
                        y = virasoro_L(-1, y)
                    value = pairing(dual, y)
                    if value:
                        sign = sign_b * (-1 if k % 2 else 1)
                        total = total + value * Fraction(sign, math.factorial(k))
        if not total:
            return total
        return total * ctx.root_of_unity(Fraction(2 * self.r + 1) * h2 / 2)


def B_r(operator: IntertwiningOperator, r: int) -> BraidedIntertwiner:
    return BraidedIntertwiner(operator, r)


def F_Q(operator: ContragredientOperator, p: int) -> IntertwiningMapTable:
    """<c', F(w1 (x) w2)> = <w1, O(c', e^(l_p(z))) w2>: a Q(z)-intertwining map."""
    ctx = operator.ctx
    lam, mu, nu = operator.lam, operator.mu, operator.first

    def fn(p1: Partition, p2: Partition, g: int) -> FockVector:
        s = operator.matrix_exponent(sum(p1), g, sum(p2))
        branch = ctx.exp_lp(s, p)
        out = {}
        for c in basis(nu, g):
            value = operator.matrix_element(p1, c.partition, p2)
            if value:
                out[c.partition] = value * branch
        return FockVector(ctx, nu, out)

    logger.debug("F_Q table for %s at p=%d", operator.label, p)
    return IntertwiningMapTable(ctx, lam, mu, 'Q', fn, f"F_Q({operator.label},p={p})")


class RecoveredContragredient(ContragredientOperator):
    """Y_(F,p) for a Q(z)-intertwining map F."""

    def __init__(self, table: IntertwiningMapTable, p: int):
        super().__init__(table.ctx, table.lam, table.mu, f"Y({table.label},p={p})")
        self.table = table
        self.p = p

    def _matrix_element(self, p1: Partition, pc: Partition, p2: Partition) -> Scalar:
        s = self.matrix_exponent(sum(p1), sum(pc), sum(p2))
        comp = self.table.component(p1, p2, sum(pc))
        value = comp.coefficient(pc)
        return value * self.ctx.exp_lp(-s, self.p) if value else value


def Y_from_F_Q(table: IntertwiningMapTable, p: int) -> RecoveredContragredient:
    if table.kind != 'Q':
        raise ValueError(f"{table.label} is not a Q(z)-intertwining map")
    return RecoveredContragredient(table, p)


# -----------------------------------------------------------------------------
# Identity checks
# -----------------------------------------------------------------------------

def _z(ctx: ScalarContext, power: int, sign: int = 1) -> Scalar:
    return ctx.z_power(power, sign)


def _weights(v: FockVector) -> Tuple[int, int]:
    grades = v.grades()
    return (min(grades), max(grades)) if grades else (0, 0)


def _run_comparison(name: str, left: LazySeries, right: LazySeries,
                    window: Mapping[str, Interval], **details) -> CheckOutcome:
    try:
        comparison = compare_lazy(left, right, window, context=name)
    except IllDefinedProductError as exc:
        return CheckOutcome(name, Verdict.ILL_DEFINED, window_json(window),
                            {'reason': str(exc)}, 0, dict(details))
    return CheckOutcome.from_comparison(name, comparison, window, **details)


def compare_operators(left: IntertwiningOperator, right: IntertwiningOperator,
                      max_grade: int, name: str = 'operator-equality') -> CheckOutcome:
    """Coefficientwise equality on basis pairs and output grades up to max_grade."""
    ctx = left.ctx
    compared = 0
    for b1 in basis_upto(left.first, max_grade):
        for b2 in basis_upto(left.second, max_grade - b1.grade):
            w1, w2 = FockVector.of(ctx, b1), FockVector.of(ctx, b2)
            for e in left.exponents(w1, w2, max_grade):
                a = left.coefficient(w1, e, w2).truncate(max_grade)
                b = right.coefficient(w1, e, w2).truncate(max_grade)
                compared += 1
                if a != b:
                    return CheckOutcome.failure(name, {
                        'w1': str(b1), 'w2': str(b2), 'exponent': fmt_rational(e),
                        'left': a.to_json(), 'right': b.to_json(),
                    }, max_grade=max_grade)
    return CheckOutcome(name, Verdict.PASS, {'grade': [0, max_grade]}, None, compared)


def check_P_intertwining(table: IntertwiningMapTable, v: FockVector, w1: FockVector,
                         w2: FockVector, dual: FockVector,
                         window: Mapping[str, Interval]) -> CheckOutcome:
    """Pair both sides of the P(z) identity

        x0^-1 delta((x1 - z)/x0) Y3(v, x1) F(w1 (x) w2)
          = z^-1 delta((x1 - x0)/z) F(Y1(v, x0) w1 (x) w2)
            + x0^-1 delta((z - x1)/(-x0)) F(w1 (x) Y2(v, x1) w2)

    with dual and compare coefficients on window in (x0, x1).
    """
    ctx = table.ctx
    h_min, h_max = _weights(v)
    g1, g2 = w1.max_grade, w2.max_grade
    g_c = max(dual.max_grade, 0)

    def lhs_fn(key):
        s = int(key[0])
        total = ctx.zero
        for gc in dual.grades():
            for h in v.grades():
                g = gc - h - s
                if g < 0:
                    continue
                image = table.apply(w1, w2, g)
                if image:
                    total = total + pairing(dual.component(gc), mode(v.component(h), -s - 1, image))
        return total

    def rhs1_fn(key):
        return table.pair(dual, mode(v, -int(key[0]) - 1, w1), w2)

    def rhs2_fn(key):
        return table.pair(dual, w1, mode(v, -int(key[0]) - 1, w2))

    lhs_g = LazySeries(ctx, ('x1',), lhs_fn, {'x1': Interval(None, g_c - h_min)}, label='Y3 F')
    rhs1_g = LazySeries(ctx, ('x0',), rhs1_fn, {'x0': Interval(-g1 - h_max, None)}, label='F Y1')
    rhs2_g = LazySeries(ctx, ('x1',), rhs2_fn, {'x1': Interval(-g2 - h_max, None)}, label='F Y2')

    k_lhs = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, _z(ctx, 1, -1)),
                        mono(ctx, 1, x0=1), 'x0^-1 d((x1-z)/x0)')
    k_rhs1 = DeltaKernel(mono(ctx, _z(ctx, -1)), mono(ctx, 1, x1=1), mono(ctx, -1, x0=1),
                         mono(ctx, _z(ctx, 1)), 'z^-1 d((x1-x0)/z)')
    k_rhs2 = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, _z(ctx, 1)), mono(ctx, -1, x1=1),
                         mono(ctx, -1, x0=1), 'x0^-1 d((z-x1)/(-x0))')

    left = kernel_product(k_lhs, lhs_g)
    right = kernel_product(k_rhs1, rhs1_g) + kernel_product(k_rhs2, rhs2_g)
    return _run_comparison('P(z)-intertwining', left, right, window,
                           table=table.label, v=repr(v), w1=repr(w1), w2=repr(w2))


def check_Q_intertwining(table: IntertwiningMapTable, v: FockVector, w1: FockVector,
                         w2: FockVector, dual: FockVector,
                         window: Mapping[str, Interval]) -> CheckOutcome:
    """Pair both sides of the Q(z) identity

        z^-1 delta((x1 - x0)/z) Y3*(v, x0) F(w1 (x) w2)
          = x0^-1 delta((x1 - z)/x0) F(Y1*(v, x1) w1 (x) w2)
            - x0^-1 delta((z - x1)/(-x0)) F(w1 (x) Y2(v, x1) w2)

    with dual and compare coefficients on window in (x0, x1).
    """
    ctx = table.ctx
    h_max = _weights(v)[1]
    g1, g2 = w1.max_grade, w2.max_grade
    g_c = max(dual.max_grade, 0)

    def lhs_fn(key):
        s = int(key[0])
        total = ctx.zero
        for gc in dual.grades():
            for h in v.grades():
                g = gc + h + s
                if g < 0:
                    continue
                image = table.apply(w1, w2, g)
                if image:
                    total = total + pairing(dual.component(gc),
                                            opposite_mode(v.component(h), s, image))
        return total

    def rhs1_fn(key):
        return table.pair(dual, opposite_mode(v, int(key[0]), w1), w2)

    def rhs2_fn(key):
        return table.pair(dual, w1, mode(v, -int(key[0]) - 1, w2))

    lhs_g = LazySeries(ctx, ('x0',), lhs_fn, {'x0': Interval(-(g_c + h_max), None)}, label='Y3* F')
    rhs1_g = LazySeries(ctx, ('x1',), rhs1_fn, {'x1': Interval(None, g1)}, label='F Y1*')
    rhs2_g = LazySeries(ctx, ('x1',), rhs2_fn, {'x1': Interval(-(g2 + h_max), None)}, label='F Y2')

    k_lhs = DeltaKernel(mono(ctx, _z(ctx, -1)), mono(ctx, 1, x1=1), mono(ctx, -1, x0=1),
                        mono(ctx, _z(ctx, 1)), 'z^-1 d((x1-x0)/z)')
    k_rhs1 = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, _z(ctx, 1, -1)),
                         mono(ctx, 1, x0=1), 'x0^-1 d((x1-z)/x0)')
    k_rhs2 = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, _z(ctx, 1)), mono(ctx, -1, x1=1),
                         mono(ctx, -1, x0=1), 'x0^-1 d((z-x1)/(-x0))')

    left = kernel_product(k_lhs, lhs_g)
    right = kernel_product(k_rhs1, rhs1_g) - kernel_product(k_rhs2, rhs2_g)
    return _run_comparison('Q(z)-intertwining', left, right, window,
                           table=table.label, v=repr(v), w1=repr(w1), w2=repr(w2))


def check_intertwiner_jacobi(operator: IntertwiningOperator, u: FockVector, w1: FockVector,
                             w2: FockVector, dual: FockVector,
                             window: Mapping[str, Interval]) -> CheckOutcome:
    """Jacobi identity for Y of type (F_(lam+mu); F_lam F_mu), paired with dual:

        x0^-1 delta((x1 - x2)/x0) Y3(u, x1) Y(w1, x2) w2
          - x0^-1 delta((x2 - x1)/(-x0)) Y(w1, x2) Y2(u, x1) w2
          = x2^-1 delta((x1 - x0)/x2) Y(Y1(u, x0) w1, x2) w2

    With lam = 0 and the Fock intertwiner this is the module Jacobi identity.
    """
    ctx = operator.ctx
    h_min, h_max = _weights(u)
    offset = operator.first * operator.second
    g1, g2 = w1.max_grade, w2.max_grade
    g_c = max(dual.max_grade, 0)

    def a_fn(key):
        j, k = int(key[0]), key[1]
        total = ctx.zero
        inner = operator.coefficient(w1, k, w2)
        if not inner:
            return total
        for gc in dual.grades():
            for h in u.grades():
                piece = inner.component(gc - h - j)
                if piece:
                    total = total + pairing(dual.component(gc), mode(u.component(h), -j - 1, piece))
        return total

    def b_fn(key):
        j, k = int(key[0]), key[1]
        moved = mode(u, -j - 1, w2)
        return pairing(dual, operator.coefficient(w1, k, moved)) if moved else ctx.zero

    def c_fn(key):
        s, k = int(key[0]), key[1]
        moved = mode(u, -s - 1, w1)
        return pairing(dual, operator.coefficient(moved, k, w2)) if moved else ctx.zero

    a = LazySeries(ctx, ('x1', 'x2'), a_fn,
                   {'x1': Interval(None, g_c - h_min), 'x2': Interval(offset - g1 - g2, None)},
                   {'x2': offset}, 'Y3 Y')
    b = LazySeries(ctx, ('x1', 'x2'), b_fn,
                   {'x1': Interval(-g2 - h_max, None), 'x2': Interval(None, offset + g_c - g1)},
                   {'x2': offset}, 'Y Y2')
    c = LazySeries(ctx, ('x0', 'x2'), c_fn,
                   {'x0': Interval(-(g1 + h_max), None), 'x2': Interval(None, g_c + offset - g2)},
                   {'x2': offset}, 'Y Y1')

    k_a = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, -1, x2=1),
                      mono(ctx, 1, x0=1), 'x0^-1 d((x1-x2)/x0)')
    k_b = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x2=1), mono(ctx, -1, x1=1),
                      mono(ctx, -1, x0=1), 'x0^-1 d((x2-x1)/(-x0))')
    k_c = DeltaKernel(mono(ctx, 1, x2=-1), mono(ctx, 1, x1=1), mono(ctx, -1, x0=1),
                      mono(ctx, 1, x2=1), 'x2^-1 d((x1-x0)/x2)')

    left = kernel_product(k_a, a) - kernel_product(k_b, b)
    right = kernel_product(k_c, c)
    return _run_comparison('intertwiner-jacobi', left, right, window,
                           operator=operator.label, u=repr(u), w1=repr(w1), w2=repr(w2))


def check_intertwiner_derivative(operator: IntertwiningOperator, w1: FockVector,
                                 w2: FockVector, max_grade: int) -> CheckOutcome:
    """d/dx Y(w1, x) w2 = Y(L(-1) w1, x) w2, coefficient by coefficient.

    For a contragredient-type operator w1 is a dual vector and L(-1) acts
    on it as the transpose of L(1).
    """
    name = 'L(-1)-derivative'
    if isinstance(operator, ContragredientOperator):
        lifted = contragredient_mode(omega(operator.ctx), -1, w1)
    else:
        lifted = virasoro_L(-1, w1)
    exponents = sorted(set(operator.exponents(w1, w2, max_grade))
                       | set(operator.exponents(lifted, w2, max_grade)))
    for e in exponents:
        left = operator.coefficient(w1, e + 1, w2).truncate(max_grade) * (e + 1)
        right = operator.coefficient(lifted, e, w2).truncate(max_grade)
        if left != right:
            return CheckOutcome.failure(name, {
                'exponent': fmt_rational(e), 'left': left.to_json(), 'right': right.to_json(),
            }, operator=operator.label)
    return CheckOutcome(name, Verdict.PASS, {'grade': [0, max_grade]}, None, len(exponents),
                        {'operator': operator.label})


def spanning_vectors(ctx: ScalarContext, max_weight: int) -> List[FockVector]:
    """The partition basis of V up to max_weight; it spans the algebra there."""
    return [FockVector.of(ctx, b) for b in basis_upto(0, max_weight)]
