"""
VTensor v1.0 - Delta kernels and lazy series

A kernel is a displayed expression outer * delta((first + second) / inner)
whose four pieces are signed scalar monomials times monomials in the formal
variables. Expanding in nonnegative powers of the second summand,

    outer * sum_n sum_{m>=0} C(n, m) first^(n-m) second^m inner^(-n)

and the exponent of the (n, m) term is o + n (a - d) + m (b - a), with
a, b, d, o the exponent vectors of first, second, inner, outer.

Products kernel * g are taken coefficient by coefficient. For a target
exponent the admissible (n, m) form a polygon cut out by the support box of
g; the product is well defined at that target exactly when the polygon is
bounded, which is decided structurally before any coefficient is summed.
"""

import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from vtensor.core.scalars import Rational, Scalar, ScalarContext, fmt_rational
from vtensor.core.series import (
    UNBOUNDED, Comparison, Exponent, FormalSeries, Interval, Witness, binomial,
    order_variables,
)
from vtensor.errors import IllDefinedProductError, WindowError

logger = logging.getLogger(__name__)

# Enumeration guard for a single coefficient's polygon.
MAX_POLYGON_POINTS = 200_000


# -----------------------------------------------------------------------------
# Integer points of two-parameter polygons
# -----------------------------------------------------------------------------

Constraint = Tuple[Fraction, Fraction, Fraction]  # a*n + b*m <= c


def _feasible(point: Tuple[Fraction, Fraction], constraints: Sequence[Constraint]) -> bool:
    n, m = point
    return all(a * n + b * m <= c for a, b, c in constraints)


def _vertices(constraints: Sequence[Constraint]) -> List[Tuple[Fraction, Fraction]]:
    found = []
    for i in range(len(constraints)):
        a1, b1, c1 = constraints[i]
        for j in range(i + 1, len(constraints)):
            a2, b2, c2 = constraints[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            point = ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)
            if _feasible(point, constraints):
                found.append(point)
    return found


def _recession_direction(constraints: Sequence[Constraint]) -> Optional[Tuple[Fraction, Fraction]]:
    """A nonzero direction d with a.d <= 0 for every constraint, if any exists."""
    candidates = [(Fraction(1), Fraction(0)), (Fraction(-1), Fraction(0)),
                  (Fraction(0), Fraction(1)), (Fraction(0), Fraction(-1))]
    for a, b, _ in constraints:
        if a or b:
            candidates.append((b, -a))
            candidates.append((-b, a))
    for d in candidates:
        if all(a * d[0] + b * d[1] <= 0 for a, b, _ in constraints):
            return d
    return None


def polygon_points(constraints: Sequence[Constraint]) -> List[Tuple[int, int]]:
    """Integer (n, m) of the delta expansion satisfying every constraint.

    The index set splits into n <= -1, m >= 0 and 0 <= m <= n (where
    C(n, m) vanishes beyond m = n). Raises IllDefinedProductError when a
    nonempty piece is unbounded.
    """
    one, zero = Fraction(1), Fraction(0)
    pieces = (
        [(one, zero, -one), (zero, -one, zero)],                      # n <= -1, m >= 0
        [(-one, zero, zero), (zero, -one, zero), (-one, one, zero)],  # n >= 0, 0 <= m <= n
    )
    points: List[Tuple[int, int]] = []
    for extra in pieces:
        cons = list(constraints) + extra
        verts = _vertices(cons)
        if not verts:
            continue
        if _recession_direction(cons) is not None:
            raise IllDefinedProductError(
                "coefficient needs infinitely many delta-expansion terms")
        n_lo = math.ceil(min(v[0] for v in verts))
        n_hi = math.floor(max(v[0] for v in verts))
        m_lo = math.ceil(min(v[1] for v in verts))
        m_hi = math.floor(max(v[1] for v in verts))
        if (n_hi - n_lo + 1) * (m_hi - m_lo + 1) > MAX_POLYGON_POINTS:
            raise WindowError("delta-expansion polygon too large to enumerate")
        for n in range(n_lo, n_hi + 1):
            for m in range(m_lo, m_hi + 1):
                if all(a * n + b * m <= c for a, b, c in cons):
                    points.append((n, m))
    return points


# -----------------------------------------------------------------------------
# Kernel pieces
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """coeff * prod(var^exp): one summand or factor of a displayed delta."""
    coeff: Scalar
    exps: Tuple[Tuple[str, Fraction], ...] = ()

    def exponent(self, var: str) -> Fraction:
        for name, e in self.exps:
            if name == var:
                return e
        return Fraction(0)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(name for name, e in self.exps if e != 0)


def mono(ctx: ScalarContext, coeff=1, **exps: Rational) -> Piece:
    """mono(ctx, -1, x0=-1) is -x0^(-1); coeff may be a Scalar or a rational."""
    if not isinstance(coeff, Scalar):
        coeff = ctx.scalar(coeff)
    if not coeff.is_monomial():
        raise ValueError(f"kernel pieces must be monomials, got {coeff!r}")
    return Piece(coeff, tuple(sorted((k, Fraction(v)) for k, v in exps.items() if v != 0)))


class DeltaKernel:
    """outer * delta((first + second) / inner), expanded in powers of second."""

    def __init__(self, outer: Piece, first: Piece, second: Piece, inner: Piece, label: str = ''):
        self.outer, self.first, self.second, self.inner = outer, first, second, inner
        self.label = label
        self.ctx = outer.coeff.ctx
        self.variables = order_variables(
            outer.variables + first.variables + second.variables + inner.variables)
        self.origin = {v: outer.exponent(v) for v in self.variables}
        self.u = {v: first.exponent(v) - inner.exponent(v) for v in self.variables}
        self.w = {v: second.exponent(v) - first.exponent(v) for v in self.variables}
        for v in self.variables:
            if self.u[v].denominator != 1 or self.w[v].denominator != 1:
                raise ValueError(f"kernel {label} has non-integral expansion directions")
        self._pivot = self._find_pivot()

    def _find_pivot(self) -> Tuple[str, str, Fraction]:
        for i, p in enumerate(self.variables):
            for q in self.variables[i + 1:]:
                det = self.u[p] * self.w[q] - self.u[q] * self.w[p]
                if det:
                    return p, q, det
        raise ValueError(f"kernel {self.label} has dependent expansion directions")

    def term(self, n: int, m: int) -> Tuple[Dict[str, Fraction], Scalar]:
        exps = {v: self.origin[v] + n * self.u[v] + m * self.w[v] for v in self.variables}
        c = binomial(n, m)
        if not c:
            return exps, self.ctx.zero
        return exps, (self.outer.coeff * self.first.coeff.power(n - m)
                      * self.second.coeff.power(m) * self.inner.coeff.power(-n) * c)

    def solve(self, exponents: Mapping[str, Fraction]) -> Optional[Tuple[int, int]]:
        """The unique (n, m) whose term has the given exponent, if any."""
        p, q, det = self._pivot
        rp = Fraction(exponents.get(p, 0)) - self.origin[p]
        rq = Fraction(exponents.get(q, 0)) - self.origin[q]
        n = (rp * self.w[q] - rq * self.w[p]) / det
        m = (self.u[p] * rq - self.u[q] * rp) / det
        if n.denominator != 1 or m.denominator != 1 or m < 0:
            return None
        n, m = int(n), int(m)
        if 0 <= n < m:
            return None
        for v in self.variables:
            if self.origin[v] + n * self.u[v] + m * self.w[v] != Fraction(exponents.get(v, 0)):
                return None
        for v, e in exponents.items():
            if v not in self.variables and e != 0:
                return None
        return n, m

    def coefficient(self, exponents: Mapping[str, Rational]) -> Scalar:
        nm = self.solve({k: Fraction(v) for k, v in exponents.items()})
        if nm is None:
            return self.ctx.zero
        return self.term(*nm)[1]

    def constraints_for(self, var: str, target: Fraction, box: Interval) -> List[Constraint]:
        """(n, m) with target - E_var(n, m) inside box."""
        u, w, o = self.u.get(var, Fraction(0)), self.w.get(var, Fraction(0)), self.origin.get(var, Fraction(0))
        cons = []
        if box.lo is not None:
            cons.append((u, w, target - o - box.lo))
        if box.hi is not None:
            cons.append((-u, -w, box.hi - target + o))
        return cons

    def materialize(self, window: Mapping[str, Interval]) -> FormalSeries:
        cons: List[Constraint] = []
        for v in self.variables:
            box = window.get(v)
            if box is None or not box.finite:
                raise WindowError(f"kernel materialization needs a finite window in {v}")
            # E_v(n, m) in box, i.e. target 0 minus E in -box
            cons.extend(self.constraints_for(v, Fraction(0), box.scale(-1)))
        terms: Dict[Exponent, Scalar] = {}
        for n, m in polygon_points(cons):
            exps, c = self.term(n, m)
            if c:
                terms[tuple(exps[v] for v in self.variables)] = c
        return FormalSeries(self.ctx, self.variables, terms,
                            [window[v] for v in self.variables],
                            [UNBOUNDED for _ in self.variables])

    def __repr__(self) -> str:
        return f"DeltaKernel({self.label or 'anonymous'})"


# -----------------------------------------------------------------------------
# Lazy series
# -----------------------------------------------------------------------------

CoefficientFn = Callable[[Exponent], Scalar]


class LazySeries:
    """A series known through an exact coefficient oracle and a support box.

    Exponents of variable v lie in offsets[v] + Z. Coefficients are memoized.
    """

    def __init__(self, ctx: ScalarContext, variables: Sequence[str], fn: CoefficientFn,
                 support: Optional[Mapping[str, Interval]] = None,
                 offsets: Optional[Mapping[str, Rational]] = None, label: str = ''):
        self.ctx = ctx
        self.variables = tuple(variables)
        self._fn = fn
        support = support or {}
        offsets = offsets or {}
        self.support = {v: support.get(v, UNBOUNDED) for v in self.variables}
        self.offsets = {v: Fraction(offsets.get(v, 0)) % 1 for v in self.variables}
        self.label = label
        self._memo: Dict[Exponent, Scalar] = {}
        self._lock = threading.Lock()

    def _key(self, exponents) -> Optional[Exponent]:
        if isinstance(exponents, Mapping):
            for v, e in exponents.items():
                if v not in self.variables and e != 0:
                    return None
            return tuple(Fraction(exponents.get(v, 0)) for v in self.variables)
        return tuple(Fraction(e) for e in exponents)

    def coefficient(self, exponents) -> Scalar:
        key = self._key(exponents)
        if key is None:
            return self.ctx.zero
        for v, e in zip(self.variables, key):
            if (e - self.offsets[v]).denominator != 1 or not self.support[v].contains(e):
                return self.ctx.zero
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        value = self._fn(key)
        with self._lock:
            self._memo[key] = value
        return value

    def at(self, **exponents: Rational) -> Scalar:
        return self.coefficient(exponents)

    # -- derived series -------------------------------------------------------

    def with_support(self, **bounds: Interval) -> 'LazySeries':
        """Same oracle, support cut to the given boxes (terms outside read as zero)."""
        support = dict(self.support)
        empty = False
        for v, box in bounds.items():
            cut = support[v].intersect(box)
            empty = empty or cut is None
            support[v] = cut if cut is not None else box
        fn = (lambda key: self.ctx.zero) if empty else self.coefficient
        return LazySeries(self.ctx, self.variables, fn, support, self.offsets, self.label)

    def specialize(self, var: str, exponent: Rational) -> 'LazySeries':
        """The coefficient of var^exponent, as a series in the remaining variables."""
        i = self.variables.index(var)
        exponent = Fraction(exponent)
        rest = self.variables[:i] + self.variables[i + 1:]

        def fn(key: Exponent) -> Scalar:
            return self.coefficient(key[:i] + (exponent,) + key[i:])

        return LazySeries(self.ctx, rest, fn, {v: self.support[v] for v in rest},
                          {v: self.offsets[v] for v in rest}, self.label)

    def residue(self, var: str) -> 'LazySeries':
        return self.specialize(var, -1)

    def derivative(self, var: str) -> 'LazySeries':
        i = self.variables.index(var)

        def fn(key: Exponent) -> Scalar:
            up = key[i] + 1
            return self.coefficient(key[:i] + (up,) + key[i + 1:]) * up

        support = dict(self.support)
        support[var] = support[var].shift(-1)
        return LazySeries(self.ctx, self.variables, fn, support, self.offsets, self.label)

    def scale(self, factor) -> 'LazySeries':
        return LazySeries(self.ctx, self.variables, lambda key: self.coefficient(key) * factor,
                          self.support, self.offsets, self.label)

    def aligned(self, variables: Sequence[str]) -> 'LazySeries':
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = [variables.index(v) for v in self.variables]
        extra = [i for i, v in enumerate(variables) if v not in self.variables]

        def fn(key: Exponent) -> Scalar:
            if any(key[i] != 0 for i in extra):
                return self.ctx.zero
            return self.coefficient(tuple(key[i] for i in pos))

        support = {v: self.support.get(v, Interval.point(0)) for v in variables}
        offsets = {v: self.offsets.get(v, Fraction(0)) for v in variables}
        return LazySeries(self.ctx, variables, fn, support, offsets, self.label)

    def _combine(self, other: 'LazySeries', sign: int) -> 'LazySeries':
        variables = order_variables(self.variables + other.variables)
        a, b = self.aligned(variables), other.aligned(variables)

        def fn(key: Exponent) -> Scalar:
            right = b.coefficient(key)
            return a.coefficient(key) + (right if sign > 0 else -right)

        support = {v: a.support[v].hull(b.support[v]) for v in variables}
        offsets = {}
        for v in variables:
            if a.offsets[v] != b.offsets[v]:
                raise ValueError(f"cannot add series on different lattices in {v}")
            offsets[v] = a.offsets[v]
        return LazySeries(self.ctx, variables, fn, support, offsets, self.label or other.label)

    def __add__(self, other: 'LazySeries') -> 'LazySeries':
        return self._combine(other, 1)

    def __sub__(self, other: 'LazySeries') -> 'LazySeries':
        return self._combine(other, -1)

    def __neg__(self) -> 'LazySeries':
        return self.scale(-1)

    def remap(self, variables: Sequence[str], transform: Callable[[Exponent], Exponent],
              offsets: Optional[Mapping[str, Rational]] = None,
              support: Optional[Mapping[str, Interval]] = None) -> 'LazySeries':
        """Series whose coefficient at key is this series' coefficient at transform(key)."""
        return LazySeries(self.ctx, variables, lambda key: self.coefficient(transform(key)),
                          support, offsets, self.label)

    # -- windows --------------------------------------------------------------

    def points(self, window: Mapping[str, Interval]) -> List[Exponent]:
        axes = []
        for v in self.variables:
            box = window.get(v)
            if box is None or not box.finite:
                raise WindowError(f"lazy series {self.label} needs a finite window in {v}")
            cut = box.intersect(self.support[v])
            axes.append(cut.lattice(self.offsets[v]) if cut is not None else [])
        keys: List[Exponent] = [()]
        for axis in axes:
            keys = [k + (e,) for k in keys for e in axis]
        return keys

    def materialize(self, window: Mapping[str, Interval]) -> FormalSeries:
        terms = {key: self.coefficient(key) for key in self.points(window)}
        return FormalSeries(self.ctx, self.variables, terms,
                            [window[v] for v in self.variables],
                            [self.support[v] for v in self.variables])

    def __repr__(self) -> str:
        return f"LazySeries({self.label or ','.join(self.variables)})"


def kernel_product(kernel: DeltaKernel, g: LazySeries, label: str = '') -> LazySeries:
    """kernel * g, coefficient by coefficient."""
    variables = order_variables(kernel.variables + g.variables)
    offsets = {}
    for v in variables:
        base = g.offsets.get(v, Fraction(0))
        offsets[v] = (base + kernel.origin.get(v, Fraction(0))) % 1

    def fn(key: Exponent) -> Scalar:
        target = dict(zip(variables, key))
        cons: List[Constraint] = []
        for v in variables:
            box = g.support.get(v, Interval.point(0))
            cons.extend(kernel.constraints_for(v, target[v], box))
        total = kernel.ctx.zero
        for n, m in polygon_points(cons):
            exps, c = kernel.term(n, m)
            if not c:
                continue
            rest = {v: target[v] - exps.get(v, Fraction(0)) for v in variables}
            value = g.coefficient(rest)
            if value:
                total = total + c * value
        return total

    return LazySeries(kernel.ctx, variables, fn, offsets=offsets,
                      label=label or f"{kernel.label}*{g.label}")


def compare_lazy(left: LazySeries, right: LazySeries,
                 window: Mapping[str, Interval], context: Optional[str] = None) -> Comparison:
    """Exact comparison on a finite window, first difference in lexicographic order."""
    variables = order_variables(left.variables + right.variables)
    a, b = left.aligned(variables), right.aligned(variables)
    axes = []
    for v in variables:
        box = window.get(v)
        if box is None or not box.finite:
            raise WindowError(f"comparison needs a finite window in {v}")
        pts = set(box.lattice(a.offsets[v])) | set(box.lattice(b.offsets[v]))
        axes.append(sorted(pts))
    keys: List[Exponent] = [()]
    for axis in axes:
        keys = [k + (e,) for k in keys for e in axis]
    for key in keys:
        lv, rv = a.coefficient(key), b.coefficient(key)
        if lv != rv:
            return Comparison(False, Witness(variables, key, lv, rv, context), len(keys))
    return Comparison(True, None, len(keys))


def lazy_from_series(series: FormalSeries, label: str = '') -> LazySeries:
    """View an exact FormalSeries as a LazySeries."""
    if not series.exact:
        raise WindowError("only exact series can be viewed lazily")
    terms = series.terms

    def fn(key: Exponent) -> Scalar:
        return terms.get(key, series.ctx.zero)

    offsets = {}
    for i, v in enumerate(series.variables):
        residues = {e[i] % 1 for e in terms}
        if len(residues) > 1:
            raise ValueError(f"series mixes lattices in {v}")
        offsets[v] = residues.pop() if residues else Fraction(0)
    return LazySeries(series.ctx, series.variables, fn,
                      dict(zip(series.variables, series.support)), offsets, label)
