"""
VTensor v1.0 - Heisenberg Fock modules

The rank-1 Heisenberg vertex operator algebra V = F_0 and its modules F_lam.
A basis vector alpha(-n1)...alpha(-nk) e^lam is stored as the partition
(n1 >= ... >= nk); its grade is the partition size and its weight is
lam^2/2 + grade. Contragredient vectors use the same keys for the dual basis.

Basis-level actions are computed over Q and cached; FockVector extends them
linearly over Scalar coefficients.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from vtensor.core.scalars import Rational, Scalar, ScalarContext, fmt_rational
from vtensor.core.series import binomial
from vtensor.errors import RepresentabilityError, WindowOverflowError

logger = logging.getLogger(__name__)

Partition = Tuple[int, ...]
RationalItems = Tuple[Tuple[Partition, Fraction], ...]


# -----------------------------------------------------------------------------
# Partitions and bases
# -----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def partitions(n: int, largest: Optional[int] = None) -> Tuple[Partition, ...]:
    """Partitions of n with parts <= largest, each sorted descending."""
    if n < 0:
        return ()
    if n == 0:
        return ((),)
    largest = n if largest is None else min(largest, n)
    out = []
    for first in range(largest, 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partition_count(n: int) -> int:
    return len(partitions(n))


def _add_part(part: Partition, n: int) -> Partition:
    return tuple(sorted(part + (n,), reverse=True))


def _remove_part(part: Partition, n: int) -> Partition:
    idx = part.index(n)
    return part[:idx] + part[idx + 1:]


def _sub_multisets(part: Partition) -> Iterator[Tuple[Partition, Fraction]]:
    """(sigma, prod C(c_n, j_n)) over sub-multisets sigma of part."""
    counts = sorted(Counter(part).items(), reverse=True)
    ranges = [range(c + 1) for _, c in counts]
    for choice in product(*ranges):
        sigma: List[int] = []
        weight = Fraction(1)
        for (n, c), j in zip(counts, choice):
            sigma.extend([n] * j)
            weight *= math.comb(c, j)
        yield tuple(sigma), weight


def _difference(part: Partition, sigma: Partition) -> Partition:
    left = Counter(part)
    left.subtract(Counter(sigma))
    return tuple(sorted(left.elements(), reverse=True))


def _merge(a: Partition, b: Partition) -> Partition:
    return tuple(sorted(a + b, reverse=True))


@dataclass(frozen=True, order=True)
class FockBasisElement:
    """alpha(-n1)...alpha(-nk) e^momentum."""
    momentum: Fraction
    partition: Partition = ()

    @property
    def grade(self) -> int:
        return sum(self.partition)

    @property
    def weight(self) -> Fraction:
        return Fraction(self.momentum) ** 2 / 2 + self.grade

    def __str__(self) -> str:
        modes = ''.join(f"a(-{n})" for n in self.partition)
        return f"{modes}e^{fmt_rational(self.momentum)}" if modes else f"e^{fmt_rational(self.momentum)}"

    def to_json(self) -> Dict[str, object]:
        return {'momentum': fmt_rational(self.momentum), 'partition': list(self.partition)}


def basis(momentum: Rational, grade: int) -> List[FockBasisElement]:
    momentum = Fraction(momentum)
    return [FockBasisElement(momentum, p) for p in partitions(grade)]


def basis_upto(momentum: Rational, max_grade: int) -> List[FockBasisElement]:
    out: List[FockBasisElement] = []
    for g in range(max_grade + 1):
        out.extend(basis(momentum, g))
    return out


# -----------------------------------------------------------------------------
# Basis-level actions over Q (cached)
# -----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _alpha_basis(n: int, momentum: Fraction, part: Partition) -> RationalItems:
    if n < 0:
        return ((_add_part(part, -n), Fraction(1)),)
    if n == 0:
        return ((part, momentum),) if momentum else ()
    count = part.count(n)
    if not count:
        return ()
    return ((_remove_part(part, n), Fraction(n * count)),)


def _apply_rational(items: Iterable[Tuple[Partition, Fraction]],
                    op: Callable[[Partition], RationalItems]) -> Dict[Partition, Fraction]:
    out: Dict[Partition, Fraction] = {}
    for part, c in items:
        for p2, c2 in op(part):
            out[p2] = out.get(p2, Fraction(0)) + c * c2
    return {p: c for p, c in out.items() if c}


@lru_cache(maxsize=None)
def _virasoro_basis(n: int, momentum: Fraction, part: Partition) -> RationalItems:
    """L(n) = 1/2 sum_k :alpha(n-k) alpha(k):, larger mode applied first."""
    grade = sum(part)
    out: Dict[Partition, Fraction] = {}
    for big in range(math.ceil(Fraction(n, 2)), max(grade, 0) + 1):
        small = n - big
        half = Fraction(1, 2) if big == small else Fraction(1)
        first = _alpha_basis(big, momentum, part)
        second = _apply_rational(first, lambda p: _alpha_basis(small, momentum, p))
        for p, c in second.items():
            out[p] = out.get(p, Fraction(0)) + half * c
    return tuple(sorted((p, c) for p, c in out.items() if c))


@lru_cache(maxsize=None)
def _intertwine_basis(lam: Fraction, part1: Partition, mu: Fraction, part2: Partition,
                      g_out: int) -> RationalItems:
    """Grade-g_out part of Y(alpha(-part1)e^lam, x) alpha(-part2)e^mu.

    It sits at x^(lam*mu + g_out - |part1| - |part2|) in F_(lam+mu).
    """
    if g_out < 0:
        return ()
    g2 = sum(part2)
    out: Dict[Partition, Fraction] = {}

    if not part1:
        # E^-(lam, x) E^+(lam, x) x^(lam alpha(0)) on alpha(-part2) e^mu
        for sigma, weight in _sub_multisets(part2):
            if lam == 0 and sigma:
                continue
            size = g_out - g2 + sum(sigma)
            if size < 0:
                continue
            removed = _difference(part2, sigma)
            remove_coeff = weight * (-lam) ** len(sigma)
            for nu in partitions(size):
                if lam == 0 and nu:
                    continue
                add_coeff = Fraction(1)
                for k, c in Counter(nu).items():
                    add_coeff *= (lam / k) ** c / math.factorial(c)
                key = _merge(removed, nu)
                out[key] = out.get(key, Fraction(0)) + remove_coeff * add_coeff
        return tuple(sorted((p, c) for p, c in out.items() if c))

    # Y(alpha(-n) v', x) = sum_{m <= -n} C(-m-1, n-1) x^(-m-n) alpha(m) Y(v', x)
    #                    + sum_{m >= 0} C(-m-1, n-1) x^(-m-n) Y(v', x) alpha(m)
    n, rest = part1[0], part1[1:]
    target = lam + mu
    for m in range(-g_out, -n + 1):
        coeff = binomial(-m - 1, n - 1)
        inner = _intertwine_basis(lam, rest, mu, part2, g_out + m)
        for p, c in _apply_rational(inner, lambda q: _alpha_basis(m, target, q)).items():
            out[p] = out.get(p, Fraction(0)) + coeff * c
    for m in range(0, g2 + 1):
        coeff = binomial(-m - 1, n - 1)
        for q, c in _alpha_basis(m, mu, part2):
            for p, c2 in _intertwine_basis(lam, rest, mu, q, g_out):
                out[p] = out.get(p, Fraction(0)) + coeff * c * c2
    return tuple(sorted((p, c) for p, c in out.items() if c))


# -----------------------------------------------------------------------------
# FockVector
# -----------------------------------------------------------------------------

class FockVector:
    """Finite combination of basis vectors of one sector, with Scalar coefficients."""

    __slots__ = ('ctx', 'momentum', '_coeffs')

    def __init__(self, ctx: ScalarContext, momentum: Rational,
                 coeffs: Optional[Mapping[Partition, Scalar]] = None):
        self.ctx = ctx
        self.momentum = Fraction(momentum)
        self._coeffs: Dict[Partition, Scalar] = {
            tuple(p): c for p, c in (coeffs or {}).items() if not c.is_zero()
        }

    @classmethod
    def basis_vector(cls, ctx: ScalarContext, momentum: Rational, partition: Partition = (),
                     coeff=1) -> 'FockVector':
        if not isinstance(coeff, Scalar):
            coeff = ctx.scalar(coeff)
        return cls(ctx, momentum, {tuple(sorted(partition, reverse=True)): coeff})

    @classmethod
    def of(cls, ctx: ScalarContext, element: FockBasisElement) -> 'FockVector':
        return cls.basis_vector(ctx, element.momentum, element.partition)

    @classmethod
    def from_rational(cls, ctx: ScalarContext, momentum: Rational,
                      items: Mapping[Partition, Fraction]) -> 'FockVector':
        return cls(ctx, momentum, {p: ctx.scalar(c) for p, c in items.items() if c})

    @classmethod
    def zero(cls, ctx: ScalarContext, momentum: Rational) -> 'FockVector':
        return cls(ctx, momentum, {})

    # -- inspection -----------------------------------------------------------

    def items(self) -> List[Tuple[Partition, Scalar]]:
        return sorted(self._coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def terms(self) -> Iterator[Tuple[FockBasisElement, Scalar]]:
        for p, c in self.items():
            yield FockBasisElement(self.momentum, p), c

    def coefficient(self, partition: Partition) -> Scalar:
        return self._coeffs.get(tuple(partition), self.ctx.zero)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def grades(self) -> List[int]:
        return sorted({sum(p) for p in self._coeffs})

    @property
    def max_grade(self) -> int:
        return max((sum(p) for p in self._coeffs), default=-1)

    def component(self, grade: int) -> 'FockVector':
        return FockVector(self.ctx, self.momentum,
                          {p: c for p, c in self._coeffs.items() if sum(p) == grade})

    def weight_of(self, grade: int) -> Fraction:
        return self.momentum ** 2 / 2 + grade

    # -- linear structure -----------------------------------------------------

    def _check(self, other: 'FockVector') -> None:
        if other.momentum != self.momentum:
            raise ValueError(f"sector mismatch: F_{self.momentum} vs F_{other.momentum}")

    def __add__(self, other: 'FockVector') -> 'FockVector':
        self._check(other)
        out = dict(self._coeffs)
        for p, c in other._coeffs.items():
            out[p] = out[p] + c if p in out else c
        return FockVector(self.ctx, self.momentum, out)

    def __neg__(self) -> 'FockVector':
        return FockVector(self.ctx, self.momentum, {p: -c for p, c in self._coeffs.items()})

    def __sub__(self, other: 'FockVector') -> 'FockVector':
        return self + (-other)

    def __mul__(self, factor) -> 'FockVector':
        return FockVector(self.ctx, self.momentum, {p: c * factor for p, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.momentum == other.momentum and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.momentum, tuple(sorted(self._coeffs.items()))))

    def extend(self, op: Callable[[Partition], RationalItems],
               momentum: Optional[Rational] = None) -> 'FockVector':
        """Apply a basis-level rational operator linearly."""
        out: Dict[Partition, Scalar] = {}
        for part, c in self._coeffs.items():
            for p2, r in op(part):
                value = c * r
                out[p2] = out[p2] + value if p2 in out else value
        return FockVector(self.ctx, self.momentum if momentum is None else momentum, out)

    def truncate(self, max_grade: int) -> 'FockVector':
        return FockVector(self.ctx, self.momentum,
                          {p: c for p, c in self._coeffs.items() if sum(p) <= max_grade})

    def to_json(self) -> Dict[str, object]:
        return {
            'momentum': fmt_rational(self.momentum),
            'terms': [[list(p), c.to_json()] for p, c in self.items()],
        }

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"0[F_{fmt_rational(self.momentum)}]"
        return ' + '.join(f"({c!r}){FockBasisElement(self.momentum, p)}" for p, c in self.items())


def sum_vectors(ctx: ScalarContext, momentum: Rational, vectors: Iterable[FockVector]) -> FockVector:
    total = FockVector.zero(ctx, momentum)
    for v in vectors:
        total = total + v
    return total


# -----------------------------------------------------------------------------
# Algebra vectors
# -----------------------------------------------------------------------------

def vacuum(ctx: ScalarContext) -> FockVector:
    return FockVector.basis_vector(ctx, 0)


def heisenberg(ctx: ScalarContext) -> FockVector:
    """alpha(-1) 1."""
    return FockVector.basis_vector(ctx, 0, (1,))


def omega(ctx: ScalarContext) -> FockVector:
    """The conformal vector 1/2 alpha(-1)^2 1."""
    return FockVector.basis_vector(ctx, 0, (1, 1), Fraction(1, 2))


def algebra_weight(v: FockVector) -> int:
    """Largest weight present in an algebra vector (0 for the zero vector)."""
    if v.momentum != 0:
        raise ValueError("not an algebra vector")
    return max(v.max_grade, 0)


# -----------------------------------------------------------------------------
# Operators
# -----------------------------------------------------------------------------

def _check_window(w: FockVector, max_grade: Optional[int], what: str) -> FockVector:
    if max_grade is not None and w.max_grade > max_grade:
        raise WindowOverflowError(f"{what} reaches grade {w.max_grade} > window {max_grade}")
    return w


def alpha(n: int, w: FockVector, max_grade: Optional[int] = None) -> FockVector:
    """Heisenberg mode alpha(n); creation for n < 0, momentum for n = 0."""
    mom = w.momentum
    return _check_window(w.extend(lambda p: _alpha_basis(n, mom, p)), max_grade, f"alpha({n})")


def virasoro_L(n: int, w: FockVector, max_grade: Optional[int] = None) -> FockVector:
    mom = w.momentum
    return _check_window(w.extend(lambda p: _virasoro_basis(n, mom, p)), max_grade, f"L({n})")


def l1_terms(w: FockVector) -> List[FockVector]:
    """[L(1)^k w / k! for k = 0, 1, ...] up to the last nonzero power."""
    terms = [w]
    current = w
    k = 0
    while True:
        k += 1
        current = virasoro_L(1, current) * Fraction(1, k)
        if current.is_zero():
            return terms
        terms.append(current)


def exp_L1(c, w: FockVector) -> FockVector:
    """e^(c L(1)) w; the sum stops since L(1) lowers the grade."""
    if not isinstance(c, Scalar):
        c = w.ctx.scalar(c)
    total = FockVector.zero(w.ctx, w.momentum)
    for k, term in enumerate(l1_terms(w)):
        total = total + term * c.power(k)
    return total


@dataclass(frozen=True)
class L0Factor:
    """c^(L(0)) for c = rational * z^z_exponent * e^(2 pi i phase).

    On a weight-h vector this is rational^h z^(z_exponent h) e^(2 pi i phase h).
    """
    z_exponent: Fraction = Fraction(0)
    phase: Fraction = Fraction(0)
    rational: Fraction = Fraction(1)

    def value(self, ctx: ScalarContext, h: Rational) -> Scalar:
        h = Fraction(h)
        if self.rational != 1 and h.denominator != 1:
            raise RepresentabilityError(
                f"{fmt_rational(self.rational)}^{fmt_rational(h)} is not in the coefficient field")
        base = Fraction(self.rational) ** int(h) if self.rational != 1 else Fraction(1)
        return ctx.z_power(Fraction(self.z_exponent) * h, base) * \
            ctx.root_of_unity(Fraction(self.phase) * h)

    def base(self, ctx: ScalarContext) -> Scalar:
        """c itself."""
        return self.value(ctx, 1)

    def inverse(self) -> 'L0Factor':
        return L0Factor(-Fraction(self.z_exponent), -Fraction(self.phase), 1 / Fraction(self.rational))


# e^((-2 log z + pi i) L(0))
PSI_L0 = L0Factor(Fraction(-2), Fraction(1, 2))


def scale_L0(factor: L0Factor, w: FockVector) -> FockVector:
    out: Dict[Partition, Scalar] = {}
    cache: Dict[int, Scalar] = {}
    for p, c in w.items():
        g = sum(p)
        if g not in cache:
            cache[g] = factor.value(w.ctx, w.weight_of(g))
        out[p] = c * cache[g]
    return FockVector(w.ctx, w.momentum, out)


def intertwiner_coefficient(v: FockVector, exponent: Rational, w: FockVector) -> FockVector:
    """Coefficient of x^exponent in Y(v, x) w, for v in F_lam and w in F_mu.

    Lands in F_(lam+mu); when lam = 0 this is the module vertex operator.
    """
    lam, mu = v.momentum, w.momentum
    exponent = Fraction(exponent)
    shift = exponent - lam * mu
    out: Dict[Partition, Scalar] = {}
    for p1, c1 in v.items():
        for p2, c2 in w.items():
            g_out = shift + sum(p1) + sum(p2)
            if g_out.denominator != 1 or g_out < 0:
                continue
            coeff = c1 * c2
            for p, r in _intertwine_basis(lam, p1, mu, p2, int(g_out)):
                value = coeff * r
                out[p] = out[p] + value if p in out else value
    return FockVector(v.ctx, lam + mu, out)


# Vector-level mode results, keyed with the scalar context since FockVector
# equality ignores it.
MODE_CACHE_SIZE = 1 << 16


def mode(v: FockVector, n: int, w: FockVector) -> FockVector:
    """v_n w: the coefficient of x^(-n-1) in Y(v, x) w."""
    if v.momentum != 0:
        raise ValueError("mode() takes an algebra vector; use intertwiner_coefficient")
    return _mode(v.ctx, v, n, w)


@lru_cache(maxsize=MODE_CACHE_SIZE)
def _mode(ctx: ScalarContext, v: FockVector, n: int, w: FockVector) -> FockVector:
    return intertwiner_coefficient(v, -n - 1, w)


def vertex_Y(v: FockVector, w: FockVector, max_grade: int) -> Dict[Fraction, FockVector]:
    """Y(v, x) w as {exponent: coefficient}, keeping output grades <= max_grade."""
    lam, mu = v.momentum, w.momentum
    out: Dict[Fraction, FockVector] = {}
    g1 = [sum(p) for p, _ in v.items()]
    g2 = [sum(p) for p, _ in w.items()]
    if not g1 or not g2:
        return out
    for g_out in range(max_grade + 1):
        for e in sorted({lam * mu + g_out - a - b for a in g1 for b in g2}):
            coeff = intertwiner_coefficient(v, e, w).component(g_out)
            if coeff:
                out[e] = out[e] + coeff if e in out else coeff
    return out


def opposite_mode(v: FockVector, s: int, w: FockVector) -> FockVector:
    """Coefficient of x^s in Y*(v, x) w = Y(e^(x L(1)) (-x^-2)^(L(0)) v, x^-1) w."""
    return _opposite_mode(v.ctx, v, s, w)


@lru_cache(maxsize=MODE_CACHE_SIZE)
def _opposite_mode(ctx: ScalarContext, v: FockVector, s: int, w: FockVector) -> FockVector:
    total = FockVector.zero(w.ctx, w.momentum)
    for h in v.grades():
        sign = -1 if h % 2 else 1
        for k, term in enumerate(l1_terms(v.component(h))):
            n = s - k + 2 * h - 1
            total = total + mode(term, n, w) * sign
    return total


def clear_mode_cache() -> None:
    _mode.cache_clear()
    _opposite_mode.cache_clear()


def mode_cache_info() -> Dict[str, object]:
    return {'mode': _mode.cache_info()._asdict(), 'opposite_mode': _opposite_mode.cache_info()._asdict()}


def opposite_Y(v: FockVector, w: FockVector, max_grade: int) -> Dict[Fraction, FockVector]:
    """Y*(v, x) w as {exponent: coefficient}, output grades <= max_grade."""
    out: Dict[Fraction, FockVector] = {}
    if v.is_zero() or w.is_zero():
        return out
    h_max = algebra_weight(v)
    g_max = w.max_grade
    # x^s moves grade g to g - h - s, so s ranges over g - h - g_out.
    for s in range(-h_max - max_grade, g_max + 1):
        coeff = opposite_mode(v, s, w).truncate(max_grade)
        if coeff:
            out[Fraction(s)] = coeff
    return out


def pairing(dual: FockVector, w: FockVector) -> Scalar:
    """<w', w> for the dual basis of the partition basis."""
    if dual.momentum != w.momentum:
        raise ValueError(f"pairing F_{dual.momentum}' with F_{w.momentum}")
    total = w.ctx.zero
    for p, c in dual.items():
        other = w.coefficient(p)
        if other:
            total = total + c * other
    return total


def contragredient_mode(v: FockVector, s: int, dual: FockVector) -> FockVector:
    """Coefficient of x^s in Y'(v, x) w', where <Y'(v,x) w', w> = <w', Y*(v,x) w>."""
    out = FockVector.zero(dual.ctx, dual.momentum)
    for h in v.grades():
        vh = v.component(h)
        for p, c in dual.items():
            g = sum(p) + h + s
            if g < 0:
                continue
            for elem in basis(dual.momentum, g):
                value = opposite_mode(vh, s, FockVector.of(dual.ctx, elem)).coefficient(p)
                if value:
                    out = out + FockVector(dual.ctx, dual.momentum, {elem.partition: c * value})
    return out


def graded_dimension(grade: int) -> int:
    return partition_count(grade)
