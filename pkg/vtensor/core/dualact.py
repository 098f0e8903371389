"""
VTensor v1.0 - Actions on (W1 (x) W2)*

Linear functionals on F_lam (x) F_mu, the generating-function actions
tau_P / Y'_P at z and tau_Q / Y'_Q at a parameter zeta, the conjugation
psi, and the checks built on them: compatibility, grading, local grading
restriction, the psi-conjugation identity and the correspondence between
the P(z) and Q(z^-1) conditions.

A functional is known only through its values on basis pairs; every
derived functional (pullbacks, components of Y'(v, x) lambda, linear
combinations) evaluates lazily and memoizes per pair.
"""

import logging
import math
import random
import threading
from abc import ABC, abstractmethod
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from vtensor.core.fock import (
    PSI_L0, FockVector, Partition, algebra_weight, basis_upto, contragredient_mode,
    exp_L1, heisenberg, l1_terms, mode, omega, opposite_mode, partition_count, scale_L0,
    virasoro_L,
)
from vtensor.core.kernels import DeltaKernel, LazySeries, compare_lazy, kernel_product, mono
from vtensor.core.maps import IntertwiningMapTable
from vtensor.core.outcome import CheckOutcome, Verdict, window_json
from vtensor.core.scalars import Rational, Scalar, ScalarContext, fmt_rational
from vtensor.core.series import Interval, binomial
from vtensor.errors import DomainExhaustedError, IllDefinedProductError, NilpotencyCapError

logger = logging.getLogger(__name__)

Pair = Tuple[Partition, Partition]

# e^((2 log z - pi i) L(0)), the inverse of the L(0) factor inside psi
PSI_L0_INVERSE = PSI_L0.inverse()


def pairs(lam: Rational, mu: Rational, max_grade: int) -> List[Pair]:
    """Basis pairs (b1, b2) of F_lam (x) F_mu with total grade <= max_grade."""
    out = []
    for b1 in basis_upto(lam, max_grade):
        for b2 in basis_upto(mu, max_grade - b1.grade):
            out.append((b1.partition, b2.partition))
    return out


def _pair_json(pair: Pair) -> List[List[int]]:
    return [list(pair[0]), list(pair[1])]


# -----------------------------------------------------------------------------
# Functionals
# -----------------------------------------------------------------------------

class DualFunctional(ABC):
    """An element of (F_lam (x) F_mu)*, evaluated on basis pairs.

    depth bounds the grades the functional can see: a functional built from
    a dual vector of grade D has depth D. None means unknown.
    """

    def __init__(self, ctx: ScalarContext, lam: Rational, mu: Rational,
                 depth: Optional[int], label: str):
        self.ctx = ctx
        self.lam = Fraction(lam)
        self.mu = Fraction(mu)
        self.depth = depth
        self.label = label
        self._memo: Dict[Pair, Scalar] = {}
        self._applied: Dict[Tuple[FockVector, FockVector], Scalar] = {}
        self._lock = threading.Lock()
        # generating series already built on this functional, keyed by kind
        self.operators: Dict[tuple, 'DualOperatorResult'] = {}

    @abstractmethod
    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        ...

    def value(self, p1: Partition, p2: Partition) -> Scalar:
        key = (tuple(p1), tuple(p2))
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        result = self._value(*key)
        with self._lock:
            self._memo[key] = result
        return result

    def apply(self, w1: FockVector, w2: FockVector) -> Scalar:
        if w1.momentum != self.lam or w2.momentum != self.mu:
            raise ValueError(
                f"{self.label} lives on F_{fmt_rational(self.lam)} x F_{fmt_rational(self.mu)}")
        key = (w1, w2)
        with self._lock:
            cached = self._applied.get(key)
        if cached is not None:
            return cached
        total = self.ctx.zero
        for p1, c1 in w1.items():
            for p2, c2 in w2.items():
                value = self.value(p1, p2)
                if value:
                    total = total + value * (c1 * c2)
        with self._lock:
            self._applied[key] = total
        return total

    def depth_or(self, default: int) -> int:
        return default if self.depth is None else self.depth

    def is_zero_on(self, pair_list: Iterable[Pair]) -> bool:
        return all(not self.value(p1, p2) for p1, p2 in pair_list)

    def scaled(self, factor) -> 'DualFunctional':
        if not isinstance(factor, Scalar):
            factor = self.ctx.scalar(factor)
        return LinearCombination(self.ctx, self.lam, self.mu, [(factor, self)])

    def __add__(self, other: 'DualFunctional') -> 'DualFunctional':
        return LinearCombination(self.ctx, self.lam, self.mu,
                                 [(self.ctx.one, self), (self.ctx.one, other)])

    def __sub__(self, other: 'DualFunctional') -> 'DualFunctional':
        return LinearCombination(self.ctx, self.lam, self.mu,
                                 [(self.ctx.one, self), (-self.ctx.one, other)])

    def to_json(self, pair_list: Iterable[Pair]) -> Dict[str, object]:
        values = []
        for p1, p2 in pair_list:
            value = self.value(p1, p2)
            if value:
                values.append([_pair_json((p1, p2)), value.to_json()])
        return {'label': self.label, 'lam': fmt_rational(self.lam), 'mu': fmt_rational(self.mu),
                'values': values}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label})"


class TableFunctional(DualFunctional):
    """Finitely many nonzero values; zero on every other pair.

    With a domain set, pairs of total grade above it are unknown rather
    than zero and evaluating them raises DomainExhaustedError.
    """

    def __init__(self, ctx: ScalarContext, lam: Rational, mu: Rational,
                 entries: Mapping[Pair, Scalar], domain: Optional[int] = None,
                 label: str = 'table'):
        super().__init__(ctx, lam, mu, None, label)
        self.entries = {(tuple(p1), tuple(p2)): c for (p1, p2), c in entries.items() if c}
        self.domain = domain

    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        grade = sum(p1) + sum(p2)
        if self.domain is not None and grade > self.domain:
            raise DomainExhaustedError(grade, self.domain, self.label)
        return self.entries.get((p1, p2), self.ctx.zero)

    @classmethod
    def random(cls, ctx: ScalarContext, lam: Rational, mu: Rational, grade: int,
               rng: random.Random, height: int = 5, density: float = 0.7,
               label: str = 'random') -> 'TableFunctional':
        """Seeded rational entries of bounded height on pairs up to grade."""
        entries = {}
        for pair in pairs(lam, mu, grade):
            if rng.random() >= density:
                continue
            num = rng.randint(-height, height)
            den = rng.randint(1, height)
            if num:
                entries[pair] = ctx.scalar(Fraction(num, den))
        if not entries:
            entries[((), ())] = ctx.one
        return cls(ctx, lam, mu, entries, label=label)


class ZeroFunctional(DualFunctional):
    def __init__(self, ctx: ScalarContext, lam: Rational, mu: Rational):
        super().__init__(ctx, lam, mu, -1, 'zero')

    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        return self.ctx.zero


class MapImage(DualFunctional):
    """F'(c')(w1 (x) w2) = <c', F(w1 (x) w2)> for an intertwining map F."""

    def __init__(self, table: IntertwiningMapTable, dual: FockVector):
        if dual.momentum != table.target:
            raise ValueError(f"dual vector of F_{dual.momentum}' for a map into F_{table.target}")
        super().__init__(table.ctx, table.lam, table.mu, dual.max_grade,
                         f"{table.label}'({dual!r})")
        self.table = table
        self.dual = dual

    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        return self.table.pair(self.dual, FockVector.basis_vector(self.ctx, self.lam, p1),
                               FockVector.basis_vector(self.ctx, self.mu, p2))


class LinearCombination(DualFunctional):
    def __init__(self, ctx: ScalarContext, lam: Rational, mu: Rational,
                 terms: Sequence[Tuple[Scalar, DualFunctional]], label: str = ''):
        depths = [f.depth for _, f in terms]
        depth = None if any(d is None for d in depths) else max(depths, default=-1)
        super().__init__(ctx, lam, mu, depth,
                         label or ' + '.join(f"({c!r}){f.label}" for c, f in terms))
        for _, f in terms:
            if f.lam != self.lam or f.mu != self.mu:
                raise ValueError("cannot combine functionals on different sectors")
        self.terms = [(c, f) for c, f in terms if c]

    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        total = self.ctx.zero
        for c, f in self.terms:
            value = f.value(p1, p2)
            if value:
                total = total + c * value
        return total


def _psi_first(ctx: ScalarContext, w1: FockVector) -> FockVector:
    return exp_L1(ctx.z_power(-1, -1), w1)


def _psi_second(ctx: ScalarContext, w2: FockVector) -> FockVector:
    return scale_L0(PSI_L0, exp_L1(ctx.z_power(-1), w2))


def psi(w1: FockVector, w2: FockVector) -> Tuple[FockVector, FockVector]:
    """psi(w1 (x) w2) = e^(-z^-1 L(1)) w1 (x) e^((-2 log z + pi i) L(0)) e^(z^-1 L(1)) w2."""
    ctx = w1.ctx
    return _psi_first(ctx, w1), _psi_second(ctx, w2)


def psi_inverse(w1: FockVector, w2: FockVector) -> Tuple[FockVector, FockVector]:
    ctx = w1.ctx
    return (exp_L1(ctx.z_power(-1), w1),
            exp_L1(ctx.z_power(-1, -1), scale_L0(PSI_L0_INVERSE, w2)))


class PsiPullback(DualFunctional):
    """psi*(f) = f o psi."""

    def __init__(self, inner: DualFunctional):
        super().__init__(inner.ctx, inner.lam, inner.mu, inner.depth, f"psi*({inner.label})")
        self.inner = inner

    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        w1, w2 = psi(FockVector.basis_vector(self.ctx, self.lam, p1),
                     FockVector.basis_vector(self.ctx, self.mu, p2))
        return self.inner.apply(w1, w2)


class PsiInversePullback(DualFunctional):
    """(psi*)^-1(f) = f o psi^-1."""

    def __init__(self, inner: DualFunctional):
        super().__init__(inner.ctx, inner.lam, inner.mu, inner.depth, f"psi*^-1({inner.label})")
        self.inner = inner

    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        w1, w2 = psi_inverse(FockVector.basis_vector(self.ctx, self.lam, p1),
                             FockVector.basis_vector(self.ctx, self.mu, p2))
        return self.inner.apply(w1, w2)


def psi_star(f: DualFunctional) -> DualFunctional:
    if isinstance(f, PsiInversePullback):
        return f.inner
    return PsiPullback(f)


def psi_star_inverse(f: DualFunctional) -> DualFunctional:
    if isinstance(f, PsiPullback):
        return f.inner
    return PsiInversePullback(f)


# -----------------------------------------------------------------------------
# Generating series of functionals
# -----------------------------------------------------------------------------

SeriesBuilder = Callable[[Partition, Partition], LazySeries]


class DualOperatorResult:
    """O(v, x...) lambda, known pair by pair as a lazy series of scalars.

    series(p1, p2) is the series whose coefficients are the values of the
    component functionals at (b1, b2).
    """

    def __init__(self, kind: str, vector: FockVector, functional: DualFunctional,
                 variables: Tuple[str, ...], builder: SeriesBuilder, label: str,
                 zeta: Optional[Scalar] = None):
        self.kind = kind
        self.vector = vector
        self.functional = functional
        self.ctx = functional.ctx
        self.variables = variables
        self.zeta = zeta
        self.label = label
        self._builder = builder
        self._series: Dict[Pair, LazySeries] = {}
        self._components: Dict[Fraction, 'ComponentFunctional'] = {}
        self._lock = threading.Lock()

    def series(self, p1: Partition, p2: Partition) -> LazySeries:
        key = (tuple(p1), tuple(p2))
        with self._lock:
            cached = self._series.get(key)
        if cached is not None:
            return cached
        built = self._builder(*key)
        with self._lock:
            self._series.setdefault(key, built)
            return self._series[key]

    def coefficient(self, p1: Partition, p2: Partition, *exponents: Rational) -> Scalar:
        return self.series(p1, p2).coefficient(tuple(Fraction(e) for e in exponents))

    def floor(self, default_depth: int) -> int:
        """Exponents below this must vanish for a lower-truncated result."""
        return -(algebra_weight(self.vector) + self.functional.depth_or(default_depth))

    def component(self, exponent: Rational) -> 'ComponentFunctional':
        if len(self.variables) != 1:
            raise ValueError(f"{self.label} has several variables; specialize first")
        exponent = Fraction(exponent)
        with self._lock:
            cached = self._components.get(exponent)
        if cached is not None:
            return cached
        made = ComponentFunctional(self, exponent)
        with self._lock:
            self._components.setdefault(exponent, made)
            return self._components[exponent]

    def __repr__(self) -> str:
        return f"DualOperatorResult({self.label})"


class ComponentFunctional(DualFunctional):
    """The coefficient of x^k in Y'(v, x) lambda."""

    def __init__(self, result: DualOperatorResult, exponent: Fraction):
        parent = result.functional
        depth = None
        if parent.depth is not None:
            depth = parent.depth + algebra_weight(result.vector) + int(exponent)
        super().__init__(parent.ctx, parent.lam, parent.mu, depth,
                         f"[x^{fmt_rational(exponent)}]{result.label}")
        self.result = result
        self.exponent = exponent

    def _value(self, p1: Partition, p2: Partition) -> Scalar:
        return self.result.coefficient(p1, p2, self.exponent)


@lru_cache(maxsize=None)
def _twisted_modes(v: FockVector) -> Dict[int, FockVector]:
    """e^(x L(1)) (-x^-2)^(L(0)) v grouped by the power of x."""
    out: Dict[int, FockVector] = {}
    for h in v.grades():
        sign = -1 if h % 2 else 1
        for k, term in enumerate(l1_terms(v.component(h))):
            s = k - 2 * h
            out[s] = out[s] + term * sign if s in out else term * sign
    return out


@lru_cache(maxsize=None)
def _conjugated_modes(v: FockVector) -> Tuple[Tuple[int, int, FockVector], ...]:
    """(h, k, L(1)^k v_h / k!) for the expansion of e^(c L(1)) y^(-2 L(0)) v."""
    out = []
    for h in v.grades():
        for k, term in enumerate(l1_terms(v.component(h))):
            out.append((h, k, term))
    return tuple(out)


def _basis_pair(f: DualFunctional, p1: Partition, p2: Partition) -> Tuple[FockVector, FockVector]:
    return (FockVector.basis_vector(f.ctx, f.lam, p1), FockVector.basis_vector(f.ctx, f.mu, p2))


def _z(ctx: ScalarContext, power: Rational, coeff: Rational = 1) -> Scalar:
    return ctx.z_power(power, coeff)


def tau_P(v: FockVector, lam_f: DualFunctional) -> DualOperatorResult:
    """tau_P(z)(x0^-1 delta((x1^-1 - z)/x0) Y_t(v, x1)) lambda, in (x0, x1).

        = z^-1 delta((x1^-1 - x0)/z) lambda(Y1(e^(x1 L(1)) (-x1^-2)^(L(0)) v, x0) w1 (x) w2)
          + x0^-1 delta((z - x1^-1)/(-x0)) lambda(w1 (x) Y2*(v, x1) w2)
    """
    key = ('tau_P', v)
    if key in lam_f.operators:
        return lam_f.operators[key]
    ctx = lam_f.ctx
    weight = algebra_weight(v)
    twisted = _twisted_modes(v)
    k1 = DeltaKernel(mono(ctx, _z(ctx, -1)), mono(ctx, 1, x1=-1), mono(ctx, -1, x0=1),
                     mono(ctx, _z(ctx, 1)), 'z^-1 d((x1^-1-x0)/z)')
    k2 = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, _z(ctx, 1)), mono(ctx, -1, x1=-1),
                     mono(ctx, -1, x0=1), 'x0^-1 d((z-x1^-1)/(-x0))')

    def build(p1: Partition, p2: Partition) -> LazySeries:
        b1, b2 = _basis_pair(lam_f, p1, p2)

        def first(key):
            u = twisted.get(int(key[1]))
            if u is None:
                return ctx.zero
            moved = mode(u, -int(key[0]) - 1, b1)
            return lam_f.apply(moved, b2) if moved else ctx.zero

        def second(key):
            moved = opposite_mode(v, int(key[0]), b2)
            return lam_f.apply(b1, moved) if moved else ctx.zero

        g1 = LazySeries(ctx, ('x0', 'x1'), first,
                        {'x0': Interval(-sum(p1) - weight, None), 'x1': Interval(-2 * weight, 0)},
                        label='lambda(Y1 w1, w2)')
        g2 = LazySeries(ctx, ('x1',), second, {'x1': Interval(None, sum(p2))},
                        label='lambda(w1, Y2* w2)')
        return kernel_product(k1, g1) + kernel_product(k2, g2)

    result = DualOperatorResult('tau_P', v, lam_f, ('x0', 'x1'), build,
                                f"tau_P({v!r}){lam_f.label}")
    lam_f.operators[key] = result
    return result


def Yprime_P(v: FockVector, lam_f: DualFunctional) -> DualOperatorResult:
    """Y'_P(z)(v, x) lambda: the residue in x0 of tau_P."""
    key = ('Y_P', v)
    if key in lam_f.operators:
        return lam_f.operators[key]
    tau = tau_P(v, lam_f)

    def build(p1: Partition, p2: Partition) -> LazySeries:
        return tau.series(p1, p2).residue('x0').remap(('x',), lambda k: k)

    result = DualOperatorResult('Y_P', v, lam_f, ('x',), build, f"Y'_P({v!r}){lam_f.label}")
    lam_f.operators[key] = result
    return result


def tau_Q(v: FockVector, g: DualFunctional, zeta: Optional[Scalar] = None) -> DualOperatorResult:
    """tau_Q(zeta)(zeta^-1 delta((x1 - x0)/zeta) Y_t(v, x0)) g, in (x0, x1).

        = x0^-1 delta((x1 - zeta)/x0) g(Y1*(v, x1) w1 (x) w2)
          - x0^-1 delta((zeta - x1)/(-x0)) g(w1 (x) Y2(v, x1) w2)

    zeta defaults to z^-1.
    """
    ctx = g.ctx
    zeta = _z(ctx, -1) if zeta is None else zeta
    key = ('tau_Q', v, zeta)
    if key in g.operators:
        return g.operators[key]
    weight = algebra_weight(v)
    k4 = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, -zeta),
                     mono(ctx, 1, x0=1), 'x0^-1 d((x1-zeta)/x0)')
    k5 = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, zeta), mono(ctx, -1, x1=1),
                     mono(ctx, -1, x0=1), 'x0^-1 d((zeta-x1)/(-x0))')

    def build(p1: Partition, p2: Partition) -> LazySeries:
        b1, b2 = _basis_pair(g, p1, p2)

        def first(key):
            moved = opposite_mode(v, int(key[0]), b1)
            return g.apply(moved, b2) if moved else ctx.zero

        def second(key):
            moved = mode(v, -int(key[0]) - 1, b2)
            return g.apply(b1, moved) if moved else ctx.zero

        g1 = LazySeries(ctx, ('x1',), first, {'x1': Interval(None, sum(p1))},
                        label='g(Y1* w1, w2)')
        g2 = LazySeries(ctx, ('x1',), second, {'x1': Interval(-(sum(p2) + weight), None)},
                        label='g(w1, Y2 w2)')
        return kernel_product(k4, g1) - kernel_product(k5, g2)

    result = DualOperatorResult('tau_Q', v, g, ('x0', 'x1'), build,
                                f"tau_Q({v!r}){g.label}", zeta)
    g.operators[key] = result
    return result


def Yprime_Q(v: FockVector, g: DualFunctional, zeta: Optional[Scalar] = None) -> DualOperatorResult:
    """Y'_Q(zeta)(v, x) g: the residue in x1 of tau_Q."""
    ctx = g.ctx
    zeta = _z(ctx, -1) if zeta is None else zeta
    key = ('Y_Q', v, zeta)
    if key in g.operators:
        return g.operators[key]
    tau = tau_Q(v, g, zeta)

    def build(p1: Partition, p2: Partition) -> LazySeries:
        return tau.series(p1, p2).residue('x1').remap(('x',), lambda k: k)

    result = DualOperatorResult('Y_Q', v, g, ('x',), build, f"Y'_Q({v!r}){g.label}", zeta)
    g.operators[key] = result
    return result


def L_prime(kind: str, n: int, f: DualFunctional, zeta: Optional[Scalar] = None) -> DualFunctional:
    """L'(n) f, the coefficient of x^(-n-2) in Y'(omega, x) f."""
    w = omega(f.ctx)
    result = Yprime_P(w, f) if kind == 'P' else Yprime_Q(w, f, zeta)
    return result.component(-n - 2)


def capped_exp(coeff: Scalar, f: DualFunctional, step: Callable[[DualFunctional], DualFunctional],
               audit: Sequence[Pair], cap: int, what: str) -> DualFunctional:
    """sum_k coeff^k step^k(f) / k!, stopping once a power vanishes on the audit pairs."""
    terms: List[Tuple[Scalar, DualFunctional]] = [(f.ctx.one, f)]
    current = f
    for k in range(1, cap + 1):
        current = step(current)
        if current.is_zero_on(audit):
            logger.debug("%s nilpotent after %d steps", what, k)
            return LinearCombination(f.ctx, f.lam, f.mu, terms, f"exp({what}){f.label}")
        terms.append((coeff.power(k) * Fraction(1, math.factorial(k)), current))
    raise NilpotencyCapError(cap, what)


# -----------------------------------------------------------------------------
# Comparisons
# -----------------------------------------------------------------------------

def compare_functionals(name: str, left: DualFunctional, right: DualFunctional,
                        pair_list: Sequence[Pair], **details) -> CheckOutcome:
    for p1, p2 in pair_list:
        a, b = left.value(p1, p2), right.value(p1, p2)
        if a != b:
            return CheckOutcome.failure(name, {
                'pair': _pair_json((p1, p2)), 'left': a.to_json(), 'right': b.to_json(),
            }, **details)
    grade = max((sum(p1) + sum(p2) for p1, p2 in pair_list), default=0)
    return CheckOutcome(name, Verdict.PASS, {'pairs': [0, grade]}, None, len(pair_list),
                        dict(details))


def _compare_series(name: str, left: LazySeries, right: LazySeries,
                    window: Mapping[str, Interval], pair: Pair, **details) -> CheckOutcome:
    context = f"{name} at {_pair_json(pair)}"
    try:
        comparison = compare_lazy(left, right, window, context)
    except IllDefinedProductError as exc:
        return CheckOutcome(name, Verdict.ILL_DEFINED, window_json(window),
                            {'reason': str(exc), 'pair': _pair_json(pair)}, 0, dict(details))
    outcome = CheckOutcome.from_comparison(name, comparison, window, **details)
    if outcome.witness is not None:
        outcome.witness['pair'] = _pair_json(pair)
    return outcome


def _first_failure(name: str, parts: List[CheckOutcome], **details) -> CheckOutcome:
    return CheckOutcome.combine(name, parts, **details)


def _audit_truncation(name: str, result: DualOperatorResult, floor: int, margin: int,
                      pair: Pair) -> Optional[CheckOutcome]:
    for k in range(floor - margin, floor):
        value = result.coefficient(pair[0], pair[1], k)
        if value:
            return CheckOutcome.failure(name, {
                'reason': 'lower truncation', 'exponent': {'x': str(k)}, 'floor': floor,
                'pair': _pair_json(pair), 'left': value.to_json(), 'right': 0,
            }, vector=repr(result.vector))
    return None


def check_P_compat(lam_f: DualFunctional, vectors: Sequence[FockVector],
                   pair_list: Sequence[Pair], window: Mapping[str, Interval],
                   margin: int = 3, default_depth: int = 4) -> CheckOutcome:
    """Lower truncation of Y'_P(v, x) lambda and

        tau_P(x0^-1 delta((x1^-1 - z)/x0) Y_t(v, x1)) lambda
          = x0^-1 delta((x1^-1 - z)/x0) Y'_P(v, x1) lambda

    for every v and pair, compared on window in (x0, x1).
    """
    name = 'P(z)-compatibility'
    ctx = lam_f.ctx
    kernel = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=-1), mono(ctx, _z(ctx, 1, -1)),
                         mono(ctx, 1, x0=1), 'x0^-1 d((x1^-1-z)/x0)')
    parts = []
    for v in vectors:
        result = Yprime_P(v, lam_f)
        floor = result.floor(default_depth)
        tau = tau_P(v, lam_f)
        for pair in pair_list:
            failed = _audit_truncation(name, result, floor, margin, pair)
            if failed is not None:
                return _first_failure(name, parts + [failed], functional=lam_f.label)
            h = result.series(*pair).remap(('x1',), lambda k: k,
                                           support={'x1': Interval(floor, None)})
            right = kernel_product(kernel, h)
            part = _compare_series(name, tau.series(*pair), right, window, pair, vector=repr(v))
            parts.append(part)
            if part.verdict != Verdict.PASS:
                return _first_failure(name, parts, functional=lam_f.label)
    return _first_failure(name, parts, functional=lam_f.label)


def check_Q_compat(g: DualFunctional, vectors: Sequence[FockVector],
                   pair_list: Sequence[Pair], window: Mapping[str, Interval],
                   zeta: Optional[Scalar] = None, margin: int = 3,
                   default_depth: int = 4) -> CheckOutcome:
    """Lower truncation of Y'_Q(v, x) g and

        tau_Q(zeta^-1 delta((x1 - x0)/zeta) Y_t(v, x0)) g
          = zeta^-1 delta((x1 - x0)/zeta) Y'_Q(v, x0) g

    at zeta (default z^-1), compared on window in (x0, x1).
    """
    name = 'Q(z^-1)-compatibility' if zeta is None else 'Q-compatibility'
    ctx = g.ctx
    zeta = _z(ctx, -1) if zeta is None else zeta
    kernel = DeltaKernel(mono(ctx, zeta.monomial_inverse()), mono(ctx, 1, x1=1),
                         mono(ctx, -1, x0=1), mono(ctx, zeta), 'zeta^-1 d((x1-x0)/zeta)')
    parts = []
    for v in vectors:
        result = Yprime_Q(v, g, zeta)
        floor = result.floor(default_depth)
        tau = tau_Q(v, g, zeta)
        for pair in pair_list:
            failed = _audit_truncation(name, result, floor, margin, pair)
            if failed is not None:
                return _first_failure(name, parts + [failed], functional=g.label)
            h = result.series(*pair).remap(('x0',), lambda k: k,
                                           support={'x0': Interval(floor, None)})
            right = kernel_product(kernel, h)
            part = _compare_series(name, tau.series(*pair), right, window, pair, vector=repr(v))
            parts.append(part)
            if part.verdict != Verdict.PASS:
                return _first_failure(name, parts, functional=g.label)
    return _first_failure(name, parts, functional=g.label)


# -----------------------------------------------------------------------------
# Properties of Y'_P and Y'_Q
# -----------------------------------------------------------------------------

def _dual_result(kind: str, v: FockVector, f: DualFunctional,
                 zeta: Optional[Scalar]) -> DualOperatorResult:
    return Yprime_P(v, f) if kind == 'P' else Yprime_Q(v, f, zeta)


def check_dual_vacuum(kind: str, f: DualFunctional, pair_list: Sequence[Pair],
                      exponents: Sequence[int], zeta: Optional[Scalar] = None) -> CheckOutcome:
    """Y'(1, x) f = f: constant term f, every other coefficient zero."""
    name = f"Y'_{kind}(1,x)=identity"
    result = _dual_result(kind, FockVector.basis_vector(f.ctx, 0), f, zeta)
    zero = ZeroFunctional(f.ctx, f.lam, f.mu)
    parts = []
    for k in exponents:
        expected = f if k == 0 else zero
        part = compare_functionals(name, result.component(k), expected, pair_list, exponent=k)
        parts.append(part)
        if not part.passed:
            break
    return CheckOutcome.combine(name, parts, functional=f.label)


def check_dual_derivative(kind: str, v: FockVector, f: DualFunctional,
                          pair_list: Sequence[Pair], exponents: Sequence[int],
                          zeta: Optional[Scalar] = None) -> CheckOutcome:
    """d/dx Y'(v, x) f = Y'(L(-1) v, x) f."""
    name = f"Y'_{kind} L(-1)-derivative"
    result = _dual_result(kind, v, f, zeta)
    lifted = _dual_result(kind, virasoro_L(-1, v), f, zeta)
    parts = []
    for k in exponents:
        left = result.component(k + 1).scaled(k + 1)
        part = compare_functionals(name, left, lifted.component(k), pair_list, exponent=k)
        parts.append(part)
        if not part.passed:
            break
    return CheckOutcome.combine(name, parts, functional=f.label, vector=repr(v))


def check_image_intertwines(table: IntertwiningMapTable, dual: FockVector, v: FockVector,
                            pair_list: Sequence[Pair], exponents: Sequence[int],
                            zeta: Optional[Scalar] = None) -> CheckOutcome:
    """Y'(v, x) F'(c') = F'(Y'(v, x) c') for the image of an intertwining map.

    P-maps use Y'_P(z); Q-maps use Y'_Q at zeta (the map's own parameter).
    """
    kind = table.kind
    name = f"F' intertwines Y'_{kind}"
    image = MapImage(table, dual)
    result = _dual_result(kind, v, image, zeta)
    parts = []
    for k in exponents:
        moved = contragredient_mode(v, k, dual)
        right = MapImage(table, moved) if moved else ZeroFunctional(image.ctx, image.lam, image.mu)
        part = compare_functionals(name, result.component(k), right, pair_list, exponent=k)
        parts.append(part)
        if not part.passed:
            break
    return CheckOutcome.combine(name, parts, table=table.label, vector=repr(v))


def check_L_bracket(kind: str, f: DualFunctional, pair_list: Sequence[Pair],
                    zeta: Optional[Scalar] = None) -> CheckOutcome:
    """[L'(0), L'(1)] f = -L'(1) f."""
    name = f"[L'_{kind}(0), L'_{kind}(1)] = -L'_{kind}(1)"
    l1f = L_prime(kind, 1, f, zeta)
    l0f = L_prime(kind, 0, f, zeta)
    left = L_prime(kind, 0, l1f, zeta) - L_prime(kind, 1, l0f, zeta)
    return compare_functionals(name, left, l1f.scaled(-1), pair_list, functional=f.label)


# -----------------------------------------------------------------------------
# Grading
# -----------------------------------------------------------------------------

def _coordinates(f: DualFunctional, pair_list: Sequence[Pair]) -> Dict[tuple, Fraction]:
    """The functional on pair_list flattened to rational coordinates."""
    out: Dict[tuple, Fraction] = {}
    for pair in pair_list:
        value = f.value(*pair)
        for r, cyclo in value.items():
            for i, q in cyclo.items():
                if q:
                    out[(pair, r, i)] = q
    return out


def _matrix(columns: Sequence[Dict[tuple, Fraction]]) -> sympy.Matrix:
    keys = sorted({k for col in columns for k in col}, key=repr)
    rows = [[sympy.Rational(col.get(k, Fraction(0)).numerator, col.get(k, Fraction(0)).denominator)
             for col in columns] for k in keys]
    if not rows:
        return sympy.zeros(1, len(columns))
    return sympy.Matrix(rows)


def _to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


class GradingAnalysis:
    """Krylov data of L'_P(0) on a functional."""

    def __init__(self, outcome: CheckOutcome, krylov: List[DualFunctional],
                 polynomial: Optional[sympy.Poly], components: Dict[Fraction, DualFunctional]):
        self.outcome = outcome
        self.krylov = krylov
        self.polynomial = polynomial
        self.components = components


def analyze_grading(lam_f: DualFunctional, pair_list: Sequence[Pair], cap: int) -> GradingAnalysis:
    name = 'grading'
    t = sympy.Symbol('t')
    krylov = [lam_f]
    columns = [_coordinates(lam_f, pair_list)]
    if not columns[0]:
        outcome = CheckOutcome(name, Verdict.PASS, {'pairs': len(pair_list)}, None, 0,
                               {'dimension': 0, 'minimal_polynomial': '1'})
        return GradingAnalysis(outcome, krylov, None, {})
    rank = 1
    relation = None
    for k in range(1, cap + 1):
        nxt = L_prime('P', 0, krylov[-1])
        krylov.append(nxt)
        columns.append(_coordinates(nxt, pair_list))
        matrix = _matrix(columns)
        new_rank = matrix.rank()
        if new_rank == rank:
            null = matrix.nullspace()[0]
            relation = [_to_fraction(c / null[k]) for c in null]
            break
        rank = new_rank
    if relation is None:
        outcome = CheckOutcome(name, Verdict.WINDOW_LIMITED, {'pairs': len(pair_list)},
                               None, len(columns), {'reason': f"no L'(0)-relation within {cap} steps"})
        return GradingAnalysis(outcome, krylov[:-1], None, {})
    degree = len(relation) - 1
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(relation)], t)
    squarefree = sympy.gcd(poly, poly.diff(t)).degree() == 0
    details = {'dimension': degree, 'minimal_polynomial': str(poly.as_expr())}
    if not squarefree:
        outcome = CheckOutcome.failure(name, {'reason': 'L\'(0) not semisimple',
                                              'minimal_polynomial': str(poly.as_expr())}, **details)
        return GradingAnalysis(outcome, krylov[:degree], poly, {})
    roots = sympy.roots(poly, t)
    components: Dict[Fraction, DualFunctional] = {}
    if all(r.is_rational for r in roots) and len(roots) == degree:
        ctx = lam_f.ctx
        for r in roots:
            projector = sympy.Poly(1, t)
            for s in roots:
                if s != r:
                    projector = projector * sympy.Poly((t - s) / (r - s), t)
            coeffs = list(reversed(projector.all_coeffs()))
            terms = [(ctx.scalar(_to_fraction(c)), krylov[i]) for i, c in enumerate(coeffs) if c]
            components[_to_fraction(r)] = LinearCombination(
                ctx, lam_f.lam, lam_f.mu, terms, f"P_{r}({lam_f.label})")
        details['weights'] = [fmt_rational(w) for w in sorted(components)]
    outcome = CheckOutcome(name, Verdict.PASS, {'pairs': len(pair_list)}, None,
                           len(columns), details)
    return GradingAnalysis(outcome, krylov[:degree], poly, components)


def check_grading(lam_f: DualFunctional, pair_list: Sequence[Pair], cap: int = 4) -> CheckOutcome:
    """lambda is a finite sum of L'_P(0)-eigenvectors on the pair window."""
    return analyze_grading(lam_f, pair_list, cap).outcome


def check_local_grading_restriction(lam_f: DualFunctional, pair_list: Sequence[Pair],
                                    cap: int = 3,
                                    expected: Optional[Mapping[Fraction, int]] = None,
                                    grading_cap: int = 4,
                                    generators: Optional[Sequence[FockVector]] = None,
                                    root_weight: Optional[Rational] = None) -> CheckOutcome:
    """Orbit of lambda under the components of Y'_P(v, x), by weight.

    v runs over homogeneous generators (alpha(-1) 1 by default). Reports
    per-weight dimensions up to cap above each weight of lambda and the
    lowest weight met. Only window-limited evidence can be produced; a
    failure needs expected dimensions or a root weight to disagree with.
    The root weight defaults to the lowest expected weight.
    """
    name = 'local-grading-restriction'
    analysis = analyze_grading(lam_f, pair_list, grading_cap)
    if analysis.outcome.verdict == Verdict.FAIL:
        return analysis.outcome
    if analysis.polynomial is None and analysis.outcome.passed:
        return CheckOutcome(name, Verdict.PASS, {'pairs': len(pair_list)}, None, 0,
                            {'dimensions': {}, 'lowest_weight': None})
    if not analysis.components:
        return CheckOutcome(name, Verdict.WINDOW_LIMITED, {'pairs': len(pair_list)}, None, 0,
                            {'reason': 'weights of the functional not determined'})
    ctx = lam_f.ctx
    generators = [heisenberg(ctx)] if generators is None else \
        [v for v in generators if algebra_weight(v) > 0]
    spans: Dict[Fraction, List[Dict[tuple, Fraction]]] = {}
    lowest = min(analysis.components)
    top = max(analysis.components) + cap
    bottom = lowest - cap
    queue: List[Tuple[DualFunctional, Fraction]] = []

    def admit(f: DualFunctional, weight: Fraction) -> None:
        coords = _coordinates(f, pair_list)
        if not coords:
            return
        current = spans.setdefault(weight, [])
        if current and _matrix(current + [coords]).rank() == len(current):
            return
        current.append(coords)
        queue.append((f, weight))

    for weight, f in sorted(analysis.components.items()):
        admit(f, weight)
    while queue:
        f, weight = queue.pop(0)
        for v in generators:
            h = algebra_weight(v)
            result = Yprime_P(v, f)
            # the x^k component moves weight by wt v + k
            for k in range(int(bottom - weight) - h, int(top - weight) - h + 1):
                child_weight = weight + h + k
                if bottom <= child_weight <= top:
                    admit(result.component(k), child_weight)
    dims = {w: len(v) for w, v in sorted(spans.items())}
    seen_lowest = min(dims) if dims else None
    details = {'dimensions': {fmt_rational(w): d for w, d in dims.items()},
               'lowest_weight': fmt_rational(seen_lowest) if seen_lowest is not None else None,
               'generators': [repr(v) for v in generators]}
    if root_weight is None and expected:
        root_weight = min(Fraction(w) for w in expected)
    if root_weight is not None and seen_lowest != Fraction(root_weight):
        return CheckOutcome.failure(name, {
            'reason': 'lowest weight', 'left': seen_lowest, 'right': Fraction(root_weight),
        }, **details)
    if expected is not None:
        wanted = {Fraction(w): d for w, d in expected.items()}
        for w in sorted(set(wanted) | set(dims)):
            if dims.get(w, 0) != wanted.get(w, 0):
                return CheckOutcome.failure(name, {
                    'weight': fmt_rational(w), 'left': dims.get(w, 0), 'right': wanted.get(w, 0),
                }, **details)
    return CheckOutcome(name, Verdict.WINDOW_LIMITED, {'weights': [fmt_rational(bottom),
                                                                   fmt_rational(top)]},
                        None, sum(dims.values()), details)



def fock_dimensions(root_weight: Rational, cap: int) -> Dict[Fraction, int]:
    """Graded dimensions of a Fock module with lowest weight root_weight."""
    return {Fraction(root_weight) + n: partition_count(n) for n in range(cap + 1)}


def check_membership(lam_f: DualFunctional, vectors: Sequence[FockVector],
                     pair_list: Sequence[Pair], window: Mapping[str, Interval],
                     orbit_cap: int = 3, grading_cap: int = 4, margin: int = 3,
                     default_depth: int = 4,
                     expected: Optional[Mapping[Fraction, int]] = None,
                     generators: Optional[Sequence[FockVector]] = None,
                     root_weight: Optional[Rational] = None) -> CheckOutcome:
    """P(z)-compatibility, grading and local grading restriction together."""
    parts = [check_P_compat(lam_f, vectors, pair_list, window, margin, default_depth)]
    if parts[0].verdict == Verdict.FAIL:
        return CheckOutcome.combine('membership', parts, functional=lam_f.label)
    parts.append(check_grading(lam_f, pair_list, grading_cap))
    parts.append(check_local_grading_restriction(lam_f, pair_list, orbit_cap, expected,
                                                 grading_cap, generators, root_weight))
    return CheckOutcome.combine('membership', parts, functional=lam_f.label)


# -----------------------------------------------------------------------------
# psi conjugation
# -----------------------------------------------------------------------------

def verify_psi_conjugation(f: DualFunctional, v: FockVector, pair_list: Sequence[Pair],
                           window: Mapping[str, Interval]) -> CheckOutcome:
    """tau_P(x0^-1 delta((x1^-1 - z)/x0) Y_t(v, x1)) psi*(f) equals

        (z x0)^-1 psi*(tau_Q(z^-1)(z x0 x1 delta((z^-1 + x0^-1)/(z x0 x1)^-1)
                        Y_t(e^(z x0 x1 L(1)) (x0 x1)^(-2 L(0)) v, x0^-1)) f)

    for any f. The right side is evaluated in (x0, y = x0 x1) as

        z^-1 delta(((zy)^-1 - z^-1)/x0^-1) f(Y1*(u(y), (zy)^-1) c1 (x) c2)
        - z^-1 delta((z^-1 - (zy)^-1)/(-x0^-1)) f(c1 (x) Y2(u(y), (zy)^-1) c2)

    with (c1, c2) = psi(w1, w2), u(y) = e^(zy L(1)) y^(-2 L(0)) v, and
    compared with the left side in (x0, x1).
    """
    name = 'psi-conjugation'
    ctx = f.ctx
    pulled = PsiPullback(f)
    tau = tau_P(v, pulled)
    weight = algebra_weight(v)
    modes = _conjugated_modes(v)
    zinv = _z(ctx, -1)
    q1 = DeltaKernel(mono(ctx, zinv), mono(ctx, zinv, y=-1), mono(ctx, -zinv),
                     mono(ctx, 1, x0=-1), 'z^-1 d(((zy)^-1-z^-1)/x0^-1)')
    q2 = DeltaKernel(mono(ctx, zinv), mono(ctx, zinv), mono(ctx, -zinv, y=-1),
                     mono(ctx, -1, x0=-1), 'z^-1 d((z^-1-(zy)^-1)/(-x0^-1))')
    parts = []
    for pair in pair_list:
        b1, b2 = _basis_pair(f, *pair)
        c1, c2 = psi(b1, b2)

        def first(key, c1=c1, c2=c2):
            t = int(key[0])
            total = ctx.zero
            for h, k, u in modes:
                s = k - 2 * h - t
                moved = opposite_mode(u, s, c1)
                if moved:
                    total = total + f.apply(moved, c2) * ctx.z_power(k - s)
            return total

        def second(key, c1=c1, c2=c2):
            t = int(key[0])
            total = ctx.zero
            for h, k, u in modes:
                s = k - 2 * h - t
                moved = mode(u, -s - 1, c2)
                if moved:
                    total = total + f.apply(c1, moved) * ctx.z_power(k - s)
            return total

        g1 = LazySeries(ctx, ('y',), first, {'y': Interval(-(weight + sum(pair[0])), None)},
                        label='f(Y1* c1, c2)')
        g2 = LazySeries(ctx, ('y',), second, {'y': Interval(None, sum(pair[1]) + weight)},
                        label='f(c1, Y2 c2)')
        in_y = kernel_product(q1, g1) - kernel_product(q2, g2)
        right = in_y.remap(('x0', 'x1'), lambda key: (key[0] - key[1], key[1]))
        part = _compare_series(name, tau.series(*pair), right, window, pair, vector=repr(v))
        parts.append(part)
        if part.verdict != Verdict.PASS:
            break
    return CheckOutcome.combine(name, parts, functional=f.label, vector=repr(v))


# -----------------------------------------------------------------------------
# P(z) / Q(z^-1) correspondence
# -----------------------------------------------------------------------------

def check_dual_jacobi(f: DualFunctional, u: FockVector, v: FockVector,
                      pair_list: Sequence[Pair], window: Mapping[str, Interval],
                      default_depth: int = 4) -> CheckOutcome:
    """Jacobi identity for Y'_P on a compatible f:

        x0^-1 delta((x1 - x2)/x0) Y'_P(u, x1) Y'_P(v, x2) f
          - x0^-1 delta((x2 - x1)/(-x0)) Y'_P(v, x2) Y'_P(u, x1) f
          = x2^-1 delta((x1 - x0)/x2) Y'_P(Y(u, x0) v, x2) f
    """
    name = "Y'_P Jacobi identity"
    ctx = f.ctx
    fu, fv = Yprime_P(u, f), Yprime_P(v, f)
    floor_u, floor_v = fu.floor(default_depth), fv.floor(default_depth)
    top = algebra_weight(u) + algebra_weight(v)
    k_a = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, -1, x2=1),
                      mono(ctx, 1, x0=1), 'x0^-1 d((x1-x2)/x0)')
    k_b = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x2=1), mono(ctx, -1, x1=1),
                      mono(ctx, -1, x0=1), 'x0^-1 d((x2-x1)/(-x0))')
    k_c = DeltaKernel(mono(ctx, 1, x2=-1), mono(ctx, 1, x1=1), mono(ctx, -1, x0=1),
                      mono(ctx, 1, x2=1), 'x2^-1 d((x1-x0)/x2)')
    parts = []
    for pair in pair_list:
        p1, p2 = pair

        def a_fn(key, p1=p1, p2=p2):
            inner = fv.component(key[1])
            return Yprime_P(u, inner).coefficient(p1, p2, key[0])

        def b_fn(key, p1=p1, p2=p2):
            inner = fu.component(key[0])
            return Yprime_P(v, inner).coefficient(p1, p2, key[1])

        def c_fn(key, p1=p1, p2=p2):
            moved = mode(u, -int(key[0]) - 1, v)
            return Yprime_P(moved, f).coefficient(p1, p2, key[1]) if moved else ctx.zero

        a = LazySeries(ctx, ('x1', 'x2'), a_fn, {'x2': Interval(floor_v, None)}, label='Y Y f')
        b = LazySeries(ctx, ('x1', 'x2'), b_fn, {'x1': Interval(floor_u, None)}, label='Y Y f')
        c = LazySeries(ctx, ('x0', 'x2'), c_fn, {'x0': Interval(-top, None)}, label='Y(Y) f')
        left = kernel_product(k_a, a) - kernel_product(k_b, b)
        right = kernel_product(k_c, c)
        part = _compare_series(name, left, right, window, pair, u=repr(u), v=repr(v))
        parts.append(part)
        if part.verdict != Verdict.PASS:
            break
    return CheckOutcome.combine(name, parts, functional=f.label)


def check_L1_transport(f: DualFunctional, pair_list: Sequence[Pair]) -> CheckOutcome:
    """(psi*)^-1(L'_P(1) f) = L'_Q(1) (psi*)^-1 f, with Q at z^-1."""
    left = PsiInversePullback(L_prime('P', 1, f))
    right = L_prime('Q', 1, PsiInversePullback(f))
    return compare_functionals("L'(1) transport", left, right, pair_list, functional=f.label)


def check_L0_transport(f: DualFunctional, pair_list: Sequence[Pair]) -> CheckOutcome:
    """(psi*)^-1(L'_P(0) f) = (L'_Q(0) + z L'_Q(1)) (psi*)^-1 f, with Q at z^-1."""
    g = PsiInversePullback(f)
    left = PsiInversePullback(L_prime('P', 0, f))
    right = L_prime('Q', 0, g) + L_prime('Q', 1, g).scaled(_z(f.ctx, 1))
    return compare_functionals("L'(0) transport", left, right, pair_list, functional=f.label)


def check_inverse_variable_bridge(f: DualFunctional, v: FockVector, pair_list: Sequence[Pair],
                                  exponents: Sequence[int], default_depth: int = 4) -> CheckOutcome:
    """Y'_P((1 + zX)^(-2 L(0)) e^(-z (1 + zX)^-1 L(1)) v, X (1 + zX)^-1) f
         = psi*(Y'_Q(z^-1)(v, X) (psi*)^-1 f)   with X = x0^-1,

    compared coefficient by coefficient in X.
    """
    name = 'inverse-variable bridge'
    ctx = f.ctx
    g = PsiInversePullback(f)
    rhs_result = Yprime_Q(v, g)
    parts = []
    for e in exponents:
        terms = []
        for h, k, u in _conjugated_modes(v):
            result = Yprime_P(u, f)
            floor = result.floor(default_depth)
            sign = -1 if k % 2 else 1
            for j in range(floor, e + 1):
                m = e - j
                c = binomial(-2 * h + k - j, m)
                if c:
                    terms.append((ctx.z_power(k + m, sign * c), result.component(j)))
        left = LinearCombination(ctx, f.lam, f.mu, terms)
        right = PsiPullback(rhs_result.component(e))
        part = compare_functionals(name, left, right, pair_list, exponent=e)
        parts.append(part)
        if not part.passed:
            break
    return CheckOutcome.combine(name, parts, functional=f.label, vector=repr(v))


def check_substituted_bridge(f: DualFunctional, v: FockVector, pair_list: Sequence[Pair],
                             exponents: Sequence[int], default_depth: int = 4) -> CheckOutcome:
    """Y'_P(v, x) f = psi*(Y'_Q(z^-1)(e^(z(1 - zx) L(1)) (1 - zx)^(-2 L(0)) v,
                                     x (1 - zx)^-1) (psi*)^-1 f)."""
    name = 'substituted bridge'
    ctx = f.ctx
    g = PsiInversePullback(f)
    lhs_result = Yprime_P(v, f)
    parts = []
    for e in exponents:
        terms = []
        for h, k, u in _conjugated_modes(v):
            result = Yprime_Q(u, g)
            floor = result.floor(default_depth)
            for j in range(floor, e + 1):
                m = e - j
                c = binomial(k - 2 * h - j, m)
                if c:
                    sign = -1 if m % 2 else 1
                    terms.append((ctx.z_power(k + m, sign * c), result.component(j)))
        right = PsiPullback(LinearCombination(ctx, f.lam, f.mu, terms))
        part = compare_functionals(name, lhs_result.component(e), right, pair_list, exponent=e)
        parts.append(part)
        if not part.passed:
            break
    return CheckOutcome.combine(name, parts, functional=f.label, vector=repr(v))


def check_conjugated_bridge(f: DualFunctional, v: FockVector, pair_list: Sequence[Pair],
                            exponents: Sequence[int], audit: Sequence[Pair],
                            cap: int = 8) -> CheckOutcome:
    """Y'_P(v, x) f = psi*(e^(z L'_Q(1)) Y'_Q(v, x) e^(-z L'_Q(1)) (psi*)^-1 f)."""
    name = 'conjugated bridge'
    ctx = f.ctx
    z = _z(ctx, 1)
    step = lambda h: L_prime('Q', 1, h)  # noqa: E731
    g = PsiInversePullback(f)
    lowered = capped_exp(-z, g, step, audit, cap, "-z L'_Q(1)")
    inner = Yprime_Q(v, lowered)
    lhs_result = Yprime_P(v, f)
    parts = []
    for e in exponents:
        raised = capped_exp(z, inner.component(e), step, audit, cap, "z L'_Q(1)")
        part = compare_functionals(name, lhs_result.component(e), PsiPullback(raised),
                                   pair_list, exponent=e)
        parts.append(part)
        if not part.passed:
            break
    return CheckOutcome.combine(name, parts, functional=f.label, vector=repr(v))


def check_stability(f: DualFunctional, v: FockVector, exponent: int,
                    vectors: Sequence[FockVector], pair_list: Sequence[Pair],
                    window: Mapping[str, Interval], margin: int = 3,
                    default_depth: int = 4) -> CheckOutcome:
    """A component of Y'_P(v, x) f of a compatible f is again compatible."""
    component = Yprime_P(v, f).component(exponent)
    outcome = check_P_compat(component, vectors, pair_list, window, margin, default_depth)
    outcome.name = 'stability'
    return outcome


def verify_compatibility_correspondence(
        f: DualFunctional, vectors: Sequence[FockVector], pair_list: Sequence[Pair],
        window: Mapping[str, Interval], jacobi_pairs: Sequence[Tuple[FockVector, FockVector]] = (),
        bridge_vectors: Sequence[FockVector] = (), bridge_exponents: Sequence[int] = (),
        audit: Optional[Sequence[Pair]] = None, margin: int = 3, default_depth: int = 4,
        nilpotency_cap: int = 8) -> CheckOutcome:
    """f is P(z)-compatible exactly when (psi*)^-1 f is Q(z^-1)-compatible.

    The verdict is about the equivalence: both-pass and both-fail agree. When
    both pass, the Jacobi identity, the L' transports and the bridges between
    Y'_P and Y'_Q are checked on f as well.
    """
    name = 'compatibility-correspondence'
    p_out = check_P_compat(f, vectors, pair_list, window, margin, default_depth)
    q_out = check_Q_compat(PsiInversePullback(f), vectors, pair_list, window,
                           margin=margin, default_depth=default_depth)
    details = {'p_compat': p_out.to_dict(), 'q_compat': q_out.to_dict()}
    if p_out.verdict != q_out.verdict:
        return CheckOutcome.failure(name, {
            'reason': 'compatibility verdicts differ',
            'left': p_out.verdict.value, 'right': q_out.verdict.value,
        }, functional=f.label, **details)
    agreement = CheckOutcome(f"{name} (verdicts agree: {p_out.verdict.value})", Verdict.PASS,
                             p_out.window, None, p_out.compared + q_out.compared)
    if not p_out.passed:
        out = CheckOutcome.combine(name, [agreement], functional=f.label)
        out.details.update(details)
        return out
    audit = list(audit) if audit is not None else pair_list
    parts = [agreement]
    for u, v in jacobi_pairs:
        parts.append(check_dual_jacobi(f, u, v, pair_list, window, default_depth))
    parts.append(check_L1_transport(f, pair_list))
    parts.append(check_L0_transport(f, pair_list))
    parts.append(check_L_bracket('P', f, pair_list))
    parts.append(check_L_bracket('Q', PsiInversePullback(f), pair_list))
    for v in bridge_vectors:
        parts.append(check_inverse_variable_bridge(f, v, pair_list, bridge_exponents,
                                                   default_depth))
        parts.append(check_substituted_bridge(f, v, pair_list, bridge_exponents, default_depth))
        parts.append(check_conjugated_bridge(f, v, pair_list, bridge_exponents, audit,
                                             nilpotency_cap))
    out = CheckOutcome.combine(name, parts, functional=f.label)
    out.details.update(details)
    return out
