"""Tests for delta kernels and lazy series."""

from fractions import Fraction

import pytest

from vtensor.core.kernels import (
    DeltaKernel, LazySeries, compare_lazy, kernel_product, lazy_from_series, mono,
    polygon_points,
)
from vtensor.core.series import FormalSeries, Interval, closed, iota_plus_binomial
from vtensor.errors import IllDefinedProductError, WindowError

ONE, ZERO = Fraction(1), Fraction(0)


def jacobi_kernel(ctx):
    """x0^-1 delta((x1 - x2)/x0)."""
    return DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, -1, x2=1),
                       mono(ctx, 1, x0=1), 'x0^-1 d((x1-x2)/x0)')


def test_polygon_points_bounded():
    # n in [-2, 1], m <= 1
    cons = [(ONE, ZERO, ONE), (-ONE, ZERO, 2 * ONE), (ZERO, ONE, ONE)]
    points = set(polygon_points(cons))
    assert points == {(-2, 0), (-2, 1), (-1, 0), (-1, 1), (0, 0), (1, 0), (1, 1)}


def test_polygon_points_unbounded():
    with pytest.raises(IllDefinedProductError):
        polygon_points([(ONE, ZERO, -ONE), (-ONE, ZERO, ONE)])


def test_kernel_coefficients(ctx):
    k = jacobi_kernel(ctx)
    assert k.variables == ('x0', 'x1', 'x2')
    assert k.coefficient({'x0': -1}) == 1
    assert k.coefficient({'x0': -2, 'x1': 1}) == 1
    assert k.coefficient({'x0': -2, 'x2': 1}) == -1
    assert k.coefficient({'x0': -3, 'x1': 1, 'x2': 1}) == -2
    assert k.coefficient({'x1': -1}) == 1
    assert k.coefficient({'x1': -2, 'x2': 1}) == 1
    # off the kernel lattice
    assert k.coefficient({'x0': -1, 'x1': 1}) == 0


def test_kernel_matches_binomial_expansion(ctx):
    """Coefficient of x0^(-n-1) in the kernel is (x1 - x2)^n expanded in x2."""
    k = jacobi_kernel(ctx)
    window = {'x0': closed(-3, 1), 'x1': closed(-3, 3), 'x2': closed(0, 3)}
    series = k.materialize(window)
    for n in (-2, -1, 0, 1, 2):
        expansion = iota_plus_binomial(ctx, ctx.one, 'x1', ctx.scalar(-1), 'x2', n,
                                       {'x2': window['x2']})
        for (e1, e2), c in expansion.terms.items():
            if window['x1'].contains(e1):
                assert series.coefficient({'x0': -n - 1, 'x1': e1, 'x2': e2}) == c


def test_materialize_needs_finite_window(ctx):
    with pytest.raises(WindowError):
        jacobi_kernel(ctx).materialize({'x0': closed(-2, 2), 'x1': closed(-2, 2)})


def test_lazy_series_basics(ctx):
    calls = []

    def fn(key):
        calls.append(key)
        return ctx.scalar(key[0] + 1)

    s = LazySeries(ctx, ('x',), fn, {'x': closed(0, 5)}, label='ramp')
    assert s.at(x=2) == 3
    assert s.at(x=2) == 3
    assert len(calls) == 1
    assert s.at(x=9) == 0
    assert s.at(x=Fraction(1, 2)) == 0
    assert s.derivative('x').at(x=1) == 6
    assert s.with_support(x=closed(0, 1)).at(x=3) == 0
    assert (s + s).at(x=0) == 2
    assert (s - s).at(x=4) == 0
    assert s.specialize('x', 3).at() == 4


def test_lazy_roundtrip_through_series(ctx):
    series = FormalSeries.polynomial(ctx, ('x',), {(0,): ctx.one, (2,): ctx.scalar(3)})
    lazy = lazy_from_series(series)
    assert lazy.at(x=2) == 3
    assert lazy.materialize({'x': closed(-1, 3)}).terms == series.terms


def test_compare_lazy_witness(ctx):
    a = LazySeries(ctx, ('x',), lambda key: ctx.one, {'x': closed(0, 4)})
    b = a.with_support(x=closed(0, 2))
    result = compare_lazy(a, b, {'x': closed(0, 4)}, context='cut')
    assert not result
    assert result.witness.exponent == (Fraction(3),)
    assert result.witness.to_json()['at'] == 'cut'
    assert compare_lazy(a, b, {'x': closed(0, 2)})


def test_kernel_product_with_polynomial(ctx):
    """x0^-1 delta((x1 - x2)/x0) * x1 agrees with the materialized product."""
    k = jacobi_kernel(ctx)
    g = lazy_from_series(FormalSeries.monomial(ctx, ctx.one, {'x1': 1}))
    product = kernel_product(k, g)
    for n, m in ((0, 0), (1, 0), (1, 1), (-1, 2)):
        exps, c = k.term(n, m)
        shifted = dict(exps)
        shifted['x1'] += 1
        assert product.coefficient(shifted) == c


def test_kernel_product_ill_defined(ctx):
    """x0^-1 delta((x1 - 1)/x0) against a series unbounded in x1 both ways."""
    k = DeltaKernel(mono(ctx, 1, x0=-1), mono(ctx, 1, x1=1), mono(ctx, -1),
                    mono(ctx, 1, x0=1), 'shifted')
    g = LazySeries(ctx, ('x1',), lambda key: ctx.one, {'x1': Interval()})
    with pytest.raises(IllDefinedProductError):
        kernel_product(k, g).coefficient({'x0': 0, 'x1': 0})
