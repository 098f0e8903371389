"""
VTensor v1.0 - Exact scalars
Cyclotomic rationals Q(zeta_M) and Laurent monomials in a formal positive
parameter z^(1/N). Every numeric coefficient of the engine is a Scalar.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Optional, Tuple, Union

import sympy

from vtensor.errors import RepresentabilityError

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


def fmt_rational(q: Rational) -> str:
    """Render an exact rational as 'a/b' (plain 'a' when integral)."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -----------------------------------------------------------------------------
# Cyclotomic field tables
# -----------------------------------------------------------------------------

_T = sympy.Symbol('t')


@lru_cache(maxsize=None)
def cyclotomic_coefficients(order: int) -> Tuple[int, ...]:
    """Coefficients of the order-th cyclotomic polynomial, constant term first."""
    poly = sympy.Poly(sympy.cyclotomic_poly(order, _T), _T)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(order: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """zeta^k for 0 <= k < order, written in the power basis 1, zeta, ..., zeta^(phi-1)."""
    phi_coeffs = cyclotomic_coefficients(order)
    phi = len(phi_coeffs) - 1
    table = []
    current = [0] * phi
    current[0] = 1
    for _ in range(order):
        table.append(tuple((j, c) for j, c in enumerate(current) if c))
        # multiply by zeta; zeta^phi = -sum_{j<phi} c_j zeta^j
        top = current[-1]
        shifted = [0] + current[:-1]
        for j in range(phi):
            shifted[j] -= top * phi_coeffs[j]
        current = shifted
    logger.debug("Built cyclotomic power table for M=%d (phi=%d)", order, phi)
    return tuple(table)


def euler_phi(order: int) -> int:
    return len(cyclotomic_coefficients(order)) - 1


class CycloRational:
    """Element of Q(zeta_M), stored sparsely in the power basis modulo Phi_M."""

    __slots__ = ('order', '_terms')

    def __init__(self, order: int, terms: Optional[Mapping[int, Rational]] = None):
        self.order = order
        acc: Dict[int, Fraction] = {}
        if terms:
            table = _power_table(order)
            for k, c in terms.items():
                if not c:
                    continue
                for j, t in table[k % order]:
                    acc[j] = acc.get(j, Fraction(0)) + Fraction(c) * t
        self._terms: Dict[int, Fraction] = {j: c for j, c in acc.items() if c}

    @classmethod
    def _reduced(cls, order: int, terms: Dict[int, Fraction]) -> 'CycloRational':
        obj = cls.__new__(cls)
        obj.order = order
        obj._terms = terms
        return obj

    @classmethod
    def rational(cls, order: int, value: Rational) -> 'CycloRational':
        value = Fraction(value)
        return cls._reduced(order, {0: value} if value else {})

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        """Dense coordinates, length phi(M)."""
        dense = [Fraction(0)] * euler_phi(self.order)
        for j, c in self._terms.items():
            dense[j] = c
        return tuple(dense)

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def rational_value(self) -> Optional[Fraction]:
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {0}:
            return self._terms[0]
        return None

    def _check(self, other: 'CycloRational') -> None:
        if other.order != self.order:
            raise RepresentabilityError(f"mixing Q(zeta_{self.order}) with Q(zeta_{other.order})")

    def __add__(self, other: 'CycloRational') -> 'CycloRational':
        self._check(other)
        acc = dict(self._terms)
        for j, c in other._terms.items():
            s = acc.get(j, Fraction(0)) + c
            if s:
                acc[j] = s
            else:
                acc.pop(j, None)
        return CycloRational._reduced(self.order, acc)

    def __neg__(self) -> 'CycloRational':
        return CycloRational._reduced(self.order, {j: -c for j, c in self._terms.items()})

    def __sub__(self, other: 'CycloRational') -> 'CycloRational':
        return self + (-other)

    def __mul__(self, other: Union['CycloRational', Rational]) -> 'CycloRational':
        if not isinstance(other, CycloRational):
            other = Fraction(other)
            if not other:
                return CycloRational._reduced(self.order, {})
            return CycloRational._reduced(self.order, {j: c * other for j, c in self._terms.items()})
        self._check(other)
        if len(self._terms) == 1 and 0 in self._terms:
            return other * self._terms[0]
        if len(other._terms) == 1 and 0 in other._terms:
            return self * other._terms[0]
        table = _power_table(self.order)
        acc: Dict[int, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                prod = c1 * c2
                for j, t in table[(k1 + k2) % self.order]:
                    acc[j] = acc.get(j, Fraction(0)) + prod * t
        return CycloRational._reduced(self.order, {j: c for j, c in acc.items() if c})

    __rmul__ = __mul__

    def inverse(self) -> 'CycloRational':
        if not self._terms:
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if len(self._terms) == 1:
            (k, c), = self._terms.items()
            return CycloRational(self.order, {(-k) % self.order: 1 / c})
        f = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * _T ** k
                           for k, c in self._terms.items()), _T, domain='QQ')
        phi = sympy.Poly(sympy.cyclotomic_poly(self.order, _T), _T, domain='QQ')
        inv = f.invert(phi)
        terms = {}
        for (k,), c in inv.terms():
            c = sympy.Rational(c)
            terms[k] = Fraction(int(c.p), int(c.q))
        return CycloRational(self.order, terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloRational):
            return self.order == other.order and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.rational_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, tuple(sorted(self._terms.items()))))

    def to_json(self) -> Dict[str, object]:
        return {'M': self.order, 'coeffs': [fmt_rational(c) for c in self.coeffs]}

    def __repr__(self) -> str:
        if not self._terms:
            return '0'
        parts = []
        for j, c in sorted(self._terms.items()):
            parts.append(fmt_rational(c) if j == 0 else f"{fmt_rational(c)}*w^{j}")
        return ' + '.join(parts)


# -----------------------------------------------------------------------------
# Scalars: sum_r c_r z^r
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarContext:
    """The fixed field data of a run: zeta_M and the exponent lattice (1/N)Z."""
    order: int
    denominator: int

    def _check_exponent(self, r: Rational, what: str = 'z-exponent') -> Fraction:
        r = Fraction(r)
        if self.denominator % r.denominator:
            raise RepresentabilityError(f"{what} {fmt_rational(r)} not in (1/{self.denominator})Z")
        return r

    def scalar(self, value: Rational) -> 'Scalar':
        value = Fraction(value)
        if not value:
            return Scalar(self, {})
        return Scalar(self, {Fraction(0): CycloRational.rational(self.order, value)})

    @property
    def zero(self) -> 'Scalar':
        return Scalar(self, {})

    @property
    def one(self) -> 'Scalar':
        return self.scalar(1)

    def root_of_unity(self, r: Rational) -> 'Scalar':
        """e^(2 pi i r) = zeta_M^(M r)."""
        r = Fraction(r)
        steps = r * self.order
        if steps.denominator != 1:
            raise RepresentabilityError(
                f"e^(2 pi i * {fmt_rational(r)}) needs an order divisible by {r.denominator}, "
                f"have M={self.order}"
            )
        return Scalar(self, {Fraction(0): CycloRational(self.order, {int(steps) % self.order: 1})})

    def z_power(self, r: Rational, coeff: Rational = 1) -> 'Scalar':
        r = self._check_exponent(r)
        if not coeff:
            return self.zero
        return Scalar(self, {r: CycloRational.rational(self.order, coeff)})

    def exp_lp(self, n: Rational, p: int) -> 'Scalar':
        """e^(n l_p(z)) = z^n e^(2 p pi i n) for the positive parameter z."""
        return self.z_power(n) * self.root_of_unity(Fraction(n) * p)


def root_of_unity(ctx: ScalarContext, r: Rational) -> 'Scalar':
    return ctx.root_of_unity(r)


def z_power(ctx: ScalarContext, r: Rational) -> 'Scalar':
    return ctx.z_power(r)


class Scalar:
    """Exact element of Q(zeta_M)[z^(1/N), z^(-1/N)]; immutable."""

    __slots__ = ('ctx', '_terms')

    def __init__(self, ctx: ScalarContext, terms: Mapping[Fraction, CycloRational]):
        self.ctx = ctx
        self._terms: Dict[Fraction, CycloRational] = {
            Fraction(r): c for r, c in terms.items() if not c.is_zero()
        }

    @classmethod
    def _raw(cls, ctx: ScalarContext, terms: Dict[Fraction, CycloRational]) -> 'Scalar':
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._terms = terms
        return obj

    # -- inspection -----------------------------------------------------------

    @property
    def terms(self) -> Dict[Fraction, CycloRational]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Fraction, CycloRational]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def monomial_parts(self) -> Tuple[Fraction, CycloRational]:
        if len(self._terms) != 1:
            raise RepresentabilityError(f"expected a monomial, got {self!r}")
        (r, c), = self._terms.items()
        return r, c

    def rational_value(self) -> Optional[Fraction]:
        """The value as a rational number when it is a z-free rational constant."""
        if not self._terms:
            return Fraction(0)
        if set(self._terms) != {Fraction(0)}:
            return None
        return self._terms[Fraction(0)].rational_value()

    # -- ring operations ------------------------------------------------------

    def _coerce(self, other) -> 'Scalar':
        if isinstance(other, Scalar):
            if other.ctx != self.ctx:
                raise RepresentabilityError("scalars from different contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.scalar(other)
        raise TypeError(f"cannot combine Scalar with {type(other).__name__}")

    def __add__(self, other) -> 'Scalar':
        other = self._coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for r, c in other._terms.items():
            if r in acc:
                s = acc[r] + c
                if s.is_zero():
                    del acc[r]
                else:
                    acc[r] = s
            else:
                acc[r] = c
        return Scalar._raw(self.ctx, acc)

    __radd__ = __add__

    def __neg__(self) -> 'Scalar':
        return Scalar._raw(self.ctx, {r: -c for r, c in self._terms.items()})

    def __sub__(self, other) -> 'Scalar':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'Scalar':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'Scalar':
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ctx.zero
            return Scalar._raw(self.ctx, {r: c * other for r, c in self._terms.items()})
        other = self._coerce(other)
        acc: Dict[Fraction, CycloRational] = {}
        for r1, c1 in self._terms.items():
            for r2, c2 in other._terms.items():
                r = r1 + r2
                prod = c1 * c2
                acc[r] = acc[r] + prod if r in acc else prod
        return Scalar(self.ctx, acc)

    __rmul__ = __mul__

    def monomial_inverse(self) -> 'Scalar':
        """(c z^r)^(-1) = c^(-1) z^(-r); only monomials are invertible."""
        if not self._terms:
            raise ZeroDivisionError("monomial_inverse of zero")
        if len(self._terms) != 1:
            raise RepresentabilityError(f"monomial_inverse of a {len(self._terms)}-term scalar")
        (r, c), = self._terms.items()
        return Scalar._raw(self.ctx, {-r: c.inverse()})

    def __truediv__(self, other) -> 'Scalar':
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._coerce(other).monomial_inverse()

    def power(self, k: Rational) -> 'Scalar':
        """self^k: any integer k for monomials, k >= 0 otherwise.

        Rational k is allowed only for monomials with coefficient 1, where the
        positive-parameter branch z^(r k) is unambiguous.
        """
        k = Fraction(k)
        if k.denominator != 1:
            r, c = self.monomial_parts()
            if c != CycloRational.rational(self.ctx.order, 1):
                raise RepresentabilityError(f"non-integral power {fmt_rational(k)} of {self!r}")
            return self.ctx.z_power(r * k)
        k = int(k)
        if k < 0:
            return self.monomial_inverse().power(-k)
        if len(self._terms) == 1:
            (r, c), = self._terms.items()
            acc = CycloRational.rational(self.ctx.order, 1)
            base = c
            e = k
            while e:
                if e & 1:
                    acc = acc * base
                base = base * base
                e >>= 1
            return Scalar(self.ctx, {r * k: acc})
        result = self.ctx.one
        for _ in range(k):
            result = result * self
        return result

    # -- comparison / output --------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.rational_value() == other
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._terms.items())))

    def to_json(self) -> object:
        """Canonical form: list of {z, zeta} terms sorted by z-exponent."""
        return [
            {'z': fmt_rational(r), 'zeta': c.to_json()['coeffs']}
            for r, c in sorted(self._terms.items())
        ]

    def __repr__(self) -> str:
        if not self._terms:
            return '0'
        parts = []
        for r, c in sorted(self._terms.items()):
            coeff = repr(c)
            if len(c._terms) > 1:
                coeff = f"({coeff})"
            parts.append(coeff if r == 0 else f"{coeff}*z^({fmt_rational(r)})")
        return ' + '.join(parts)


def scalar_sum(ctx: ScalarContext, values: Iterable[Scalar]) -> Scalar:
    total = ctx.zero
    for value in values:
        total = total + value
    return total
