"""Tests for windowed formal series."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vtensor.core.series import (
    FormalSeries, Interval, binomial, closed, delta, equal_on_window, iota_plus_binomial,
    order_variables,
)
from vtensor.errors import IllDefinedProductError, RepresentabilityError, WindowError


def poly(ctx, var, coeffs):
    return FormalSeries.polynomial(ctx, (var,), {(Fraction(e),): ctx.scalar(c)
                                                 for e, c in coeffs.items()})


class TestInterval:
    def test_bad_bounds(self):
        with pytest.raises(WindowError):
            Interval(Fraction(2), Fraction(1))

    def test_set_operations(self):
        a, b = closed(-2, 3), closed(1, 5)
        assert a.intersect(b) == closed(1, 3)
        assert a.intersect(closed(4, 6)) is None
        assert a.hull(b) == closed(-2, 5)
        assert a + b == closed(-1, 8)
        assert a.shift(1) == closed(-1, 4)
        assert a.scale(-1) == closed(-3, 2)
        assert Interval(None, None).covers(a)
        assert not a.covers(Interval(None, Fraction(0)))

    def test_lattice(self):
        assert closed(-1, 1).lattice() == [-1, 0, 1]
        assert closed(0, 2).lattice(Fraction(1, 4)) == [Fraction(1, 4), Fraction(5, 4)]
        with pytest.raises(WindowError):
            Interval(Fraction(0), None).lattice()


def test_binomial_generalized():
    assert binomial(5, 2) == 10
    assert binomial(2, 3) == 0
    assert [binomial(-1, m) for m in range(4)] == [1, -1, 1, -1]
    assert binomial(Fraction(1, 2), 2) == Fraction(-1, 8)


def test_variable_order():
    assert order_variables(['y', 'x2', 'x0', 'x']) == ('x', 'x0', 'x2', 'y')


def test_polynomial_product_and_calculus(ctx):
    a = poly(ctx, 'x', {0: 1, 1: 1})
    square = a * a
    assert square.exact
    assert square.coefficient({'x': 1}) == 2
    assert square.derivative('x').coefficient({'x': 0}) == 2
    assert square.derivative('x').coefficient({'x': 1}) == 2
    shifted = square * FormalSeries.monomial(ctx, ctx.one, {'x': -2})
    assert shifted.residue('x').coefficient({}) == 2


def test_eval_exp_lp_is_multiplicative(ctx):
    a = poly(ctx, 'x', {Fraction(1, 4): 1, -1: 2})
    b = poly(ctx, 'x', {Fraction(1, 2): 3})
    for p in (0, 1):
        left = (a * b).eval_exp_lp('x', p).coefficient({})
        right = a.eval_exp_lp('x', p).coefficient({}) * b.eval_exp_lp('x', p).coefficient({})
        assert left == right


def test_eval_exp_lp_needs_full_support(ctx):
    d = delta(ctx, 'x', closed(-3, 3))
    with pytest.raises(WindowError):
        d.eval_exp_lp('x', 0)


def test_delta_window(ctx):
    d = delta(ctx, 'x', closed(-3, 3))
    assert not d.exact
    assert d.coefficient({'x': -3}) == 1
    with pytest.raises(WindowError):
        d.coefficient({'x': 4})
    with pytest.raises(WindowError):
        delta(ctx, 'x', Interval(Fraction(0), None))


def test_square_of_delta_is_ill_defined(ctx):
    d = delta(ctx, 'x', closed(-3, 3))
    with pytest.raises(IllDefinedProductError):
        d.mul(d)


def test_exponent_lattice_enforced(ctx):
    with pytest.raises(RepresentabilityError):
        FormalSeries.monomial(ctx, ctx.one, {'x': Fraction(1, 3)})


def test_binomial_expansion_polynomial(ctx):
    s = iota_plus_binomial(ctx, ctx.one, 'x', ctx.one, 'y', 2)
    assert s.variables == ('x', 'y')
    assert s.coefficient({'x': 2}) == 1
    assert s.coefficient({'x': 1, 'y': 1}) == 2
    assert s.coefficient({'y': 2}) == 1
    assert s.exact


def test_binomial_expansion_negative_power(ctx):
    s = iota_plus_binomial(ctx, ctx.one, 'x', ctx.one, 'y', -1, {'y': closed(0, 3)})
    for m in range(4):
        assert s.coefficient({'x': -1 - m, 'y': m}) == (-1) ** m
    with pytest.raises(WindowError):
        iota_plus_binomial(ctx, ctx.one, 'x', ctx.one, 'y', -1)


def test_binomial_expansion_times_base_is_one(ctx):
    # (x + y)^-1 (x + y) = 1 on the window where the truncation is invisible
    window = {'y': closed(0, 4)}
    inv = iota_plus_binomial(ctx, ctx.one, 'x', ctx.one, 'y', -1, window)
    base = FormalSeries.polynomial(ctx, ('x', 'y'), {(1, 0): ctx.one, (0, 1): ctx.one})
    product = inv * base
    one = FormalSeries.constant(ctx, 1)
    assert equal_on_window(product, one, {'x': closed(-4, 0), 'y': closed(0, 4)})


def test_comparison_witness(ctx):
    a = poly(ctx, 'x', {0: 1, 2: 5})
    b = poly(ctx, 'x', {0: 1, 2: 4})
    result = equal_on_window(a, b, {'x': closed(0, 3)})
    assert not result
    assert result.witness.exponent == (Fraction(2),)
    assert result.witness.to_json()['exponent'] == {'x': '2'}
    assert result.compared == 2


def test_comparison_outside_window_raises(ctx):
    d = delta(ctx, 'x', closed(-2, 2))
    with pytest.raises(WindowError):
        equal_on_window(d, d, {'x': closed(-3, 3)})


# -- substitution ---------------------------------------------------------------

def test_substitute_monomial_scales_exponents(ctx):
    a = poly(ctx, 'x', {Fraction(1, 4): 3, -1: 1})
    image = a.substitute_monomial('x', ctx.z_power(1), {'y': 2})
    assert image.variables == ('y',)
    assert image.coefficient({'y': Fraction(1, 2)}) == ctx.z_power(Fraction(1, 4), 3)
    assert image.coefficient({'y': -2}) == ctx.z_power(-1)
    assert image.exact


def test_substitute_monomial_inverts_variable(ctx):
    a = poly(ctx, 'x', {2: 5, -1: 1})
    inverted = a.substitute_monomial('x', ctx.one, {'x': -1})
    assert inverted.coefficient({'x': -2}) == 5
    assert inverted.coefficient({'x': 1}) == 1
    again = inverted.substitute_monomial('x', ctx.one, {'x': -1})
    assert again.terms == a.terms


def test_substitute_monomial_merges_into_existing_variable(ctx):
    # x^n y^m with x -> y: terms landing on one exponent add up
    s = FormalSeries.polynomial(ctx, ('x', 'y'), {(1, 0): ctx.one, (0, 1): ctx.scalar(2)})
    merged = s.substitute_monomial('x', ctx.one, {'y': 1})
    assert merged.variables == ('y',)
    assert merged.coefficient({'y': 1}) == 3


def test_substitute_monomial_is_multiplicative(ctx):
    a = poly(ctx, 'x', {0: 1, Fraction(1, 4): 2})
    b = poly(ctx, 'x', {-1: 3, Fraction(1, 2): -1})
    coeff = ctx.z_power(-1)
    left = (a * b).substitute_monomial('x', coeff, {'y': -1})
    right = a.substitute_monomial('x', coeff, {'y': -1}) * b.substitute_monomial('x', coeff, {'y': -1})
    assert left.terms == right.terms


def test_substitute_monomial_transports_window(ctx):
    d = delta(ctx, 'x', closed(-3, 3))
    flipped = d.substitute_monomial('x', ctx.one, {'y': -1})
    assert flipped.window_of('y') == closed(-3, 3)
    assert flipped.coefficient({'y': 2}) == 1
    with pytest.raises(WindowError):
        flipped.coefficient({'y': 4})


def test_substitute_monomial_rejects_bad_images(ctx):
    a = poly(ctx, 'x', {1: 1})
    with pytest.raises(RepresentabilityError):
        a.substitute_monomial('x', ctx.one + ctx.z_power(1), {'y': 1})
    d = delta(ctx, 'x', closed(-2, 2))
    with pytest.raises(WindowError):
        d.substitute_monomial('x', ctx.one, {'y': 1, 'w': 1})


def test_substitute_monomial_ignores_absent_variable(ctx):
    a = poly(ctx, 'x', {1: 1})
    assert a.substitute_monomial('y', ctx.one, {'w': 1}) is a


# -- ring laws on Laurent polynomials -------------------------------------------

quarter_exponents = st.integers(min_value=-8, max_value=8).map(lambda k: Fraction(k, 4))
coefficients = st.fractions(min_value=-4, max_value=4, max_denominator=5)
laurent = st.dictionaries(quarter_exponents, coefficients, max_size=4)


@settings(max_examples=25, deadline=None)
@given(laurent, laurent, laurent)
def test_product_is_associative_and_commutative(ctx, a, b, c):
    a, b, c = (poly(ctx, 'x', t) for t in (a, b, c))
    assert ((a * b) * c).terms == (a * (b * c)).terms
    assert (a * b).terms == (b * a).terms
    assert (a * (b + c)).terms == (a * b + a * c).terms


@settings(max_examples=25, deadline=None)
@given(laurent, laurent)
def test_derivative_obeys_leibniz(ctx, a, b):
    a, b = poly(ctx, 'x', a), poly(ctx, 'x', b)
    left = (a * b).derivative('x')
    right = a.derivative('x') * b + a * b.derivative('x')
    assert left.terms == right.terms


@settings(max_examples=25, deadline=None)
@given(laurent, laurent, st.integers(min_value=-2, max_value=2))
def test_eval_exp_lp_is_a_ring_map(ctx, a, b, p):
    a, b = poly(ctx, 'x', a), poly(ctx, 'x', b)
    at = lambda s: s.eval_exp_lp('x', p).coefficient({})  # noqa: E731
    assert at(a * b) == at(a) * at(b)
    assert at(a + b) == at(a) + at(b)
