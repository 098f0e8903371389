"""
VTensor v1.0 - Formal series
Sparse multivariate series over Scalar with exponents in (1/N)Z.

Every series carries two boxes per variable:
  window   exponents where the stored terms are the true coefficients
  support  exponents where the true series may be nonzero
A series is exact when its support lies inside its window.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from vtensor.core.scalars import Rational, Scalar, ScalarContext, fmt_rational
from vtensor.errors import IllDefinedProductError, RepresentabilityError, WindowError

logger = logging.getLogger(__name__)

Exponent = Tuple[Fraction, ...]

# Canonical variable order; anything else sorts after these alphabetically.
VARIABLE_ORDER = ('x', 'x0', 'x1', 'x2', 'y', 't', 'q')


def order_variables(names: Iterable[str]) -> Tuple[str, ...]:
    def key(name: str):
        if name in VARIABLE_ORDER:
            return (0, VARIABLE_ORDER.index(name), name)
        return (1, 0, name)
    return tuple(sorted(set(names), key=key))


def binomial(r: Rational, m: int) -> Fraction:
    """Generalized binomial coefficient C(r, m) for rational r and integer m >= 0."""
    if m < 0:
        return Fraction(0)
    r = Fraction(r)
    num = Fraction(1)
    for i in range(m):
        num *= r - i
    return num / math.factorial(m)


# -----------------------------------------------------------------------------
# Intervals
# -----------------------------------------------------------------------------

def _ge(x: Optional[Fraction], bound: Optional[Fraction]) -> bool:
    """x >= bound, where None is -infinity for x and no bound for bound."""
    if bound is None:
        return True
    return x is not None and x >= bound


def _le(x: Optional[Fraction], bound: Optional[Fraction]) -> bool:
    if bound is None:
        return True
    return x is not None and x <= bound


@dataclass(frozen=True)
class Interval:
    """Closed exponent interval; None on a side means unbounded."""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, 'lo', Fraction(self.lo))
        if self.hi is not None:
            object.__setattr__(self, 'hi', Fraction(self.hi))
        if self.lo is not None and self.hi is not None and self.lo > self.hi:
            raise WindowError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, e: Rational) -> 'Interval':
        return cls(Fraction(e), Fraction(e))

    @property
    def finite(self) -> bool:
        return self.lo is not None and self.hi is not None

    def contains(self, e: Rational) -> bool:
        return (self.lo is None or e >= self.lo) and (self.hi is None or e <= self.hi)

    def covers(self, other: 'Interval') -> bool:
        return _ge(other.lo, self.lo) and _le(other.hi, self.hi)

    def intersect(self, other: 'Interval') -> Optional['Interval']:
        lo = other.lo if self.lo is None else self.lo if other.lo is None else max(self.lo, other.lo)
        hi = other.hi if self.hi is None else self.hi if other.hi is None else min(self.hi, other.hi)
        if lo is not None and hi is not None and lo > hi:
            return None
        return Interval(lo, hi)

    def hull(self, other: 'Interval') -> 'Interval':
        lo = None if self.lo is None or other.lo is None else min(self.lo, other.lo)
        hi = None if self.hi is None or other.hi is None else max(self.hi, other.hi)
        return Interval(lo, hi)

    def __add__(self, other: 'Interval') -> 'Interval':
        lo = None if self.lo is None or other.lo is None else self.lo + other.lo
        hi = None if self.hi is None or other.hi is None else self.hi + other.hi
        return Interval(lo, hi)

    def shift(self, c: Rational) -> 'Interval':
        return Interval(None if self.lo is None else self.lo + c,
                        None if self.hi is None else self.hi + c)

    def scale(self, k: Rational) -> 'Interval':
        k = Fraction(k)
        if k == 0:
            return Interval.point(0)
        lo = None if self.lo is None else self.lo * k
        hi = None if self.hi is None else self.hi * k
        return Interval(lo, hi) if k > 0 else Interval(hi, lo)

    def lattice(self, offset: Rational = 0) -> List[Fraction]:
        """Points offset + Z inside a finite interval, ascending."""
        if not self.finite:
            raise WindowError("cannot enumerate an unbounded interval")
        offset = Fraction(offset) % 1
        start = math.ceil(self.lo - offset)
        stop = math.floor(self.hi - offset)
        return [offset + k for k in range(start, stop + 1)]

    def to_json(self) -> List[Optional[str]]:
        return [None if self.lo is None else fmt_rational(self.lo),
                None if self.hi is None else fmt_rational(self.hi)]


UNBOUNDED = Interval()


def closed(lo: Rational, hi: Rational) -> Interval:
    return Interval(Fraction(lo), Fraction(hi))


def _product_window(sa: Interval, wa: Interval, sb: Interval, wb: Interval) -> Interval:
    """Exponents e of a*b whose every contributing pair lies in both validity windows."""
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    impossible = False

    def raise_lo(bound):
        nonlocal lo
        lo = bound if lo is None else max(lo, bound)

    def lower_hi(bound):
        nonlocal hi
        hi = bound if hi is None else min(hi, bound)

    if not _ge(sa.lo, wa.lo):
        if sb.hi is None:
            impossible = True
        else:
            raise_lo(wa.lo + sb.hi)
    if not _le(sa.hi, wa.hi):
        if sb.lo is None:
            impossible = True
        else:
            lower_hi(wa.hi + sb.lo)
    if not _ge(sb.lo, wb.lo):
        if sa.hi is None:
            impossible = True
        else:
            raise_lo(wb.lo + sa.hi)
    if not _le(sb.hi, wb.hi):
        if sa.lo is None:
            impossible = True
        else:
            lower_hi(wb.hi + sa.lo)
    if impossible or (lo is not None and hi is not None and lo > hi):
        raise WindowError("product has no certified window")
    return Interval(lo, hi)


# -----------------------------------------------------------------------------
# FormalSeries
# -----------------------------------------------------------------------------

class FormalSeries:
    """Immutable sparse series sum c_e x^e over named variables."""

    __slots__ = ('ctx', 'variables', 'terms', 'window', 'support')

    def __init__(self, ctx: ScalarContext, variables: Sequence[str],
                 terms: Mapping[Exponent, Scalar],
                 window: Optional[Sequence[Interval]] = None,
                 support: Optional[Sequence[Interval]] = None):
        self.ctx = ctx
        self.variables: Tuple[str, ...] = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        self.window: Tuple[Interval, ...] = tuple(window) if window is not None else \
            tuple(UNBOUNDED for _ in self.variables)
        stored: Dict[Exponent, Scalar] = {}
        for exps, coeff in terms.items():
            if coeff.is_zero():
                continue
            exps = tuple(Fraction(e) for e in exps)
            for e in exps:
                if ctx.denominator % e.denominator:
                    raise RepresentabilityError(
                        f"exponent {fmt_rational(e)} not in (1/{ctx.denominator})Z")
            if all(w.contains(e) for w, e in zip(self.window, exps)):
                stored[exps] = coeff
        self.terms: Dict[Exponent, Scalar] = stored
        if support is None:
            support = self._term_hull() if self._window_unbounded() else \
                tuple(UNBOUNDED for _ in self.variables)
        self.support: Tuple[Interval, ...] = tuple(support)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def polynomial(cls, ctx: ScalarContext, variables: Sequence[str],
                   terms: Mapping[Exponent, Scalar]) -> 'FormalSeries':
        return cls(ctx, variables, terms)

    @classmethod
    def constant(cls, ctx: ScalarContext, value) -> 'FormalSeries':
        if not isinstance(value, Scalar):
            value = ctx.scalar(value)
        return cls(ctx, (), {(): value})

    @classmethod
    def monomial(cls, ctx: ScalarContext, coeff: Scalar,
                 exponents: Mapping[str, Rational]) -> 'FormalSeries':
        variables = order_variables(exponents)
        return cls(ctx, variables, {tuple(Fraction(exponents[v]) for v in variables): coeff})

    # -- inspection -----------------------------------------------------------

    def _window_unbounded(self) -> bool:
        return all(w.lo is None and w.hi is None for w in self.window)

    def _term_hull(self) -> Tuple[Interval, ...]:
        if not self.terms:
            return tuple(Interval.point(0) for _ in self.variables)
        cols = list(zip(*self.terms.keys())) if self.variables else []
        return tuple(Interval(min(col), max(col)) for col in cols)

    @property
    def exact(self) -> bool:
        return all(w.covers(s) for w, s in zip(self.window, self.support))

    def index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise KeyError(f"series has no variable {var!r}") from None

    def window_of(self, var: str) -> Interval:
        return self.window[self.index(var)] if var in self.variables else UNBOUNDED

    def items(self) -> Iterator[Tuple[Exponent, Scalar]]:
        return iter(sorted(self.terms.items()))

    def coefficient(self, exponents: Mapping[str, Rational]) -> Scalar:
        exps = tuple(Fraction(exponents.get(v, 0)) for v in self.variables)
        for var in exponents:
            if var not in self.variables and exponents[var] != 0:
                return self.ctx.zero
        if not all(w.contains(e) for w, e in zip(self.window, exps)):
            raise WindowError(f"exponent {dict(zip(self.variables, exps))} outside validity window")
        return self.terms.get(exps, self.ctx.zero)

    def is_zero(self) -> bool:
        return not self.terms

    # -- alignment ------------------------------------------------------------

    def aligned(self, variables: Sequence[str]) -> 'FormalSeries':
        """Re-index onto a superset of variables; new variables sit at exponent 0."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = set(self.variables) - set(variables)
        if missing:
            raise ValueError(f"cannot drop variables {sorted(missing)}")
        pos = [self.variables.index(v) if v in self.variables else None for v in variables]
        zero = Fraction(0)
        terms = {tuple(exps[p] if p is not None else zero for p in pos): c
                 for exps, c in self.terms.items()}
        window = [self.window[p] if p is not None else UNBOUNDED for p in pos]
        support = [self.support[p] if p is not None else Interval.point(0) for p in pos]
        return FormalSeries(self.ctx, variables, terms, window, support)

    def _pair(self, other: 'FormalSeries') -> Tuple['FormalSeries', 'FormalSeries']:
        variables = order_variables(self.variables + other.variables)
        return self.aligned(variables), other.aligned(variables)

    # -- linear structure -----------------------------------------------------

    def __add__(self, other: 'FormalSeries') -> 'FormalSeries':
        a, b = self._pair(other)
        window = []
        for wa, wb in zip(a.window, b.window):
            w = wa.intersect(wb)
            if w is None:
                raise WindowError("sum has no common validity window")
            window.append(w)
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            terms[exps] = terms[exps] + c if exps in terms else c
        support = [sa.hull(sb) for sa, sb in zip(a.support, b.support)]
        return FormalSeries(self.ctx, a.variables, terms, window, support)

    def __neg__(self) -> 'FormalSeries':
        return FormalSeries(self.ctx, self.variables, {e: -c for e, c in self.terms.items()},
                            self.window, self.support)

    def __sub__(self, other: 'FormalSeries') -> 'FormalSeries':
        return self + (-other)

    def scale(self, factor) -> 'FormalSeries':
        return FormalSeries(self.ctx, self.variables,
                            {e: c * factor for e, c in self.terms.items()},
                            self.window, self.support)

    # -- products -------------------------------------------------------------

    def __mul__(self, other: 'FormalSeries') -> 'FormalSeries':
        if not isinstance(other, FormalSeries):
            return self.scale(other)
        return self.mul(other)

    def mul(self, other: 'FormalSeries') -> 'FormalSeries':
        a, b = self._pair(other)
        window = []
        for var, sa, wa, sb, wb in zip(a.variables, a.support, a.window, b.support, b.window):
            if (sa.lo is None and sb.hi is None) or (sa.hi is None and sb.lo is None):
                raise IllDefinedProductError(
                    f"product in {var} needs infinite sums: supports {sa.to_json()} and {sb.to_json()}")
            window.append(_product_window(sa, wa, sb, wb))
        terms: Dict[Exponent, Scalar] = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                exps = tuple(x + y for x, y in zip(ea, eb))
                if not all(w.contains(e) for w, e in zip(window, exps)):
                    continue
                prod = ca * cb
                terms[exps] = terms[exps] + prod if exps in terms else prod
        support = [sa + sb for sa, sb in zip(a.support, b.support)]
        return FormalSeries(self.ctx, a.variables, terms, window, support)

    # -- calculus -------------------------------------------------------------

    def residue(self, var: str) -> 'FormalSeries':
        """Res_var: the coefficient of var^(-1), as a series in the other variables."""
        if var not in self.variables:
            return FormalSeries(self.ctx, self.variables, {}, self.window, self.support)
        i = self.index(var)
        if not self.window[i].contains(-1):
            raise WindowError(f"window of {var} excludes the exponent -1")
        keep = [j for j in range(len(self.variables)) if j != i]
        terms = {tuple(e[j] for j in keep): c for e, c in self.terms.items() if e[i] == -1}
        return FormalSeries(self.ctx, [self.variables[j] for j in keep], terms,
                            [self.window[j] for j in keep], [self.support[j] for j in keep])

    def derivative(self, var: str) -> 'FormalSeries':
        if var not in self.variables:
            return FormalSeries(self.ctx, self.variables, {}, self.window, self.support)
        i = self.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i] != 0:
                shifted = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[shifted] = c * e[i]
        window = list(self.window)
        support = list(self.support)
        window[i] = window[i].shift(-1)
        support[i] = support[i].shift(-1)
        return FormalSeries(self.ctx, self.variables, terms, window, support)

    def substitute_monomial(self, var: str, coeff: Scalar,
                            monomial: Mapping[str, Rational]) -> 'FormalSeries':
        """var^n -> coeff^n * prod(v^(k_v n)) termwise."""
        if var not in self.variables:
            return self
        if not coeff.is_monomial():
            raise RepresentabilityError("substitution image must be a monomial")
        i = self.index(var)
        others = [v for v in self.variables if v != var]
        variables = order_variables(others + [v for v in monomial if monomial[v] != 0])
        terms: Dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            n = e[i]
            new = {v: e[self.variables.index(v)] for v in others}
            for v, k in monomial.items():
                new[v] = new.get(v, Fraction(0)) + Fraction(k) * n
            exps = tuple(new.get(v, Fraction(0)) for v in variables)
            value = c * coeff.power(n)
            terms[exps] = terms[exps] + value if exps in terms else value

        if self.exact:
            return FormalSeries(self.ctx, variables, terms)
        image = [v for v, k in monomial.items() if k != 0]
        if len(image) != 1 or (image[0] != var and image[0] in self.variables):
            raise WindowError("cannot transport a truncation window through a multi-variable image")
        target, k = image[0], Fraction(monomial[image[0]])
        window, support = [], []
        for v in variables:
            if v == target:
                window.append(self.window[i].scale(k))
                support.append(self.support[i].scale(k))
            else:
                j = self.index(v)
                window.append(self.window[j])
                support.append(self.support[j])
        return FormalSeries(self.ctx, variables, terms, window, support)

    def eval_exp_lp(self, var: str, p: int) -> 'FormalSeries':
        """Replace var^n by e^(n l_p(z)) = z^n e^(2 p pi i n)."""
        if var not in self.variables:
            return self
        i = self.index(var)
        if not self.window[i].covers(self.support[i]):
            raise WindowError(f"eval at e^(l_p(z)) needs every {var}-term; window is truncated")
        keep = [j for j in range(len(self.variables)) if j != i]
        terms: Dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            exps = tuple(e[j] for j in keep)
            value = c * self.ctx.exp_lp(e[i], p)
            terms[exps] = terms[exps] + value if exps in terms else value
        return FormalSeries(self.ctx, [self.variables[j] for j in keep], terms,
                            [self.window[j] for j in keep], [self.support[j] for j in keep])

    def restrict(self, window: Mapping[str, Interval]) -> 'FormalSeries':
        new_window = []
        for var, w in zip(self.variables, self.window):
            cut = w.intersect(window.get(var, UNBOUNDED))
            if cut is None:
                raise WindowError(f"restriction empties the window of {var}")
            new_window.append(cut)
        return FormalSeries(self.ctx, self.variables, self.terms, new_window, self.support)

    # -- output ---------------------------------------------------------------

    def to_json(self) -> Dict[str, object]:
        return {
            'variables': list(self.variables),
            'window': {v: w.to_json() for v, w in zip(self.variables, self.window)},
            'exact': self.exact,
            'terms': [[[fmt_rational(x) for x in e], c.to_json()] for e, c in self.items()],
        }

    def __repr__(self) -> str:
        if not self.terms:
            return '0'
        parts = []
        for e, c in self.items():
            mono = '*'.join(f"{v}^({fmt_rational(x)})" for v, x in zip(self.variables, e) if x != 0)
            parts.append(f"({c!r})" + (f"*{mono}" if mono else ''))
        return ' + '.join(parts)


# -----------------------------------------------------------------------------
# Constructors for the displayed expansions
# -----------------------------------------------------------------------------

def delta(ctx: ScalarContext, var: str, window: Interval) -> FormalSeries:
    """delta(var) = sum over n in Z of var^n, stored on a finite window."""
    if not window.finite:
        raise WindowError("delta needs a finite window")
    one = ctx.one
    terms = {(Fraction(n),): one for n in range(math.ceil(window.lo), math.floor(window.hi) + 1)}
    return FormalSeries(ctx, (var,), terms, (window,), (UNBOUNDED,))


def iota_plus_binomial(ctx: ScalarContext, a: Scalar, u: Optional[str], b: Scalar,
                       v: Optional[str], r: Rational,
                       window: Optional[Mapping[str, Interval]] = None) -> FormalSeries:
    """(a u + b v)^r expanded in nonnegative powers of the second summand b v."""
    window = dict(window or {})
    if u is not None and u == v:
        raise ValueError("both summands use the same variable")
    r = Fraction(r)
    if ctx.denominator % r.denominator:
        raise RepresentabilityError(f"exponent {fmt_rational(r)} not in (1/{ctx.denominator})Z")

    m_lo, m_hi = 0, None
    if r >= 0 and r.denominator == 1:
        m_hi = int(r)
    if v is not None:
        wv = window.get(v, UNBOUNDED)
        if wv.lo is not None:
            m_lo = max(m_lo, math.ceil(wv.lo))
        if wv.hi is not None:
            m_hi = math.floor(wv.hi) if m_hi is None else min(m_hi, math.floor(wv.hi))
    if u is not None:
        wu = window.get(u, UNBOUNDED)
        if wu.hi is not None:
            m_lo = max(m_lo, math.ceil(r - wu.hi))
        if wu.lo is not None:
            bound = math.floor(r - wu.lo)
            m_hi = bound if m_hi is None else min(m_hi, bound)
    if m_hi is None:
        raise WindowError("window must bound the expansion index")

    variables = order_variables([x for x in (u, v) if x is not None])
    terms: Dict[Exponent, Scalar] = {}
    for m in range(m_lo, m_hi + 1):
        c = binomial(r, m)
        if not c:
            continue
        coeff = a.power(r - m) * b.power(m) * c
        exps = {x: Fraction(0) for x in variables}
        if u is not None:
            exps[u] += r - m
        if v is not None:
            exps[v] += m
        key = tuple(exps[x] for x in variables)
        terms[key] = terms[key] + coeff if key in terms else coeff

    polynomial = r >= 0 and r.denominator == 1
    win, sup = [], []
    for x in variables:
        win.append(window.get(x, UNBOUNDED))
        if polynomial:
            sup.append(closed(0, r))
        elif x == v:
            sup.append(Interval(0, None))
        else:
            sup.append(Interval(None, r))
    return FormalSeries(ctx, variables, terms, win, sup)


# -----------------------------------------------------------------------------
# Windowed comparison
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """First exponent (lexicographic) where two expressions differ."""
    variables: Tuple[str, ...]
    exponent: Tuple[Fraction, ...]
    left: Scalar
    right: Scalar
    context: Optional[str] = None

    def to_json(self) -> Dict[str, object]:
        data = {
            'exponent': {v: fmt_rational(e) for v, e in zip(self.variables, self.exponent)},
            'left': self.left.to_json(),
            'right': self.right.to_json(),
        }
        if self.context:
            data['at'] = self.context
        return data


@dataclass(frozen=True)
class Comparison:
    equal: bool
    witness: Optional[Witness] = None
    compared: int = 0

    def __bool__(self) -> bool:
        return self.equal


def equal_on_window(a: FormalSeries, b: FormalSeries,
                    window: Mapping[str, Interval]) -> Comparison:
    """Exact coefficientwise comparison of a and b on window."""
    a, b = a._pair(b)
    for var, wa, wb in zip(a.variables, a.window, b.window):
        w = window.get(var, UNBOUNDED)
        if not (wa.covers(w) and wb.covers(w)):
            raise WindowError(f"comparison window for {var} not covered by both operands")
    box = [window.get(var, UNBOUNDED) for var in a.variables]
    keys = sorted(k for k in set(a.terms) | set(b.terms)
                  if all(w.contains(e) for w, e in zip(box, k)))
    zero = a.ctx.zero
    for key in keys:
        left = a.terms.get(key, zero)
        right = b.terms.get(key, zero)
        if left != right:
            return Comparison(False, Witness(a.variables, key, left, right), len(keys))
    return Comparison(True, None, len(keys))
