"""Tests for exact cyclotomic scalars."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vtensor.core.scalars import (
    CycloRational, ScalarContext, cyclotomic_coefficients, euler_phi, fmt_rational, scalar_sum,
)
from vtensor.errors import RepresentabilityError

ORDER = 8

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
cyclo = st.dictionaries(st.integers(min_value=0, max_value=ORDER - 1), small_fractions,
                        max_size=4).map(lambda terms: CycloRational(ORDER, terms))


def test_fmt_rational():
    assert fmt_rational(Fraction(3, 1)) == '3'
    assert fmt_rational(Fraction(-1, 2)) == '-1/2'
    assert fmt_rational(0) == '0'


def test_cyclotomic_tables():
    assert cyclotomic_coefficients(4) == (1, 0, 1)
    assert cyclotomic_coefficients(8) == (1, 0, 0, 0, 1)
    assert euler_phi(32) == 16


def test_power_basis_reduction():
    # zeta_8^4 = -1
    assert CycloRational(ORDER, {4: 1}) == -1
    assert CycloRational(ORDER, {8: 1}) == 1
    assert CycloRational(ORDER, {2: 1}) * CycloRational(ORDER, {2: 1}) == -1


@settings(max_examples=30, deadline=None)
@given(cyclo, cyclo, cyclo)
def test_field_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == 0


@settings(max_examples=20, deadline=None)
@given(cyclo)
def test_field_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == 1


def test_roots_of_unity(ctx):
    assert ctx.root_of_unity(Fraction(1, 2)) == -1
    i = ctx.root_of_unity(Fraction(1, 4))
    assert i * i == -1
    assert ctx.root_of_unity(1) == 1
    assert ctx.root_of_unity(Fraction(1, 32)).power(32) == 1


def test_root_of_unity_outside_field(ctx):
    with pytest.raises(RepresentabilityError):
        ctx.root_of_unity(Fraction(1, 64))


def test_z_power_lattice(ctx):
    assert ctx.z_power(Fraction(1, 4)).power(4) == ctx.z_power(1)
    with pytest.raises(RepresentabilityError):
        ctx.z_power(Fraction(1, 3))


def test_exp_lp_branches(ctx):
    half = Fraction(1, 2)
    assert ctx.exp_lp(half, 0) == ctx.z_power(half)
    assert ctx.exp_lp(half, 1) == -ctx.z_power(half)
    assert ctx.exp_lp(2, 1) == ctx.z_power(2)
    # e^(n l_p) e^(m l_p) = e^((n + m) l_p)
    a, b = Fraction(1, 4), Fraction(3, 4)
    assert ctx.exp_lp(a, 1) * ctx.exp_lp(b, 1) == ctx.exp_lp(a + b, 1)


def test_scalar_arithmetic(ctx):
    z = ctx.z_power(1)
    s = z + ctx.scalar(2)
    assert (s - z) == 2
    assert not s.is_monomial()
    assert (z * 3 / z) == 3
    assert s.power(2) == ctx.z_power(2) + z * 4 + ctx.scalar(4)
    assert z.power(-2) == ctx.z_power(-2)
    assert ctx.z_power(Fraction(1, 2)).power(Fraction(1, 2)) == ctx.z_power(Fraction(1, 4))


def test_rational_power_requires_unit_monomial(ctx):
    with pytest.raises(RepresentabilityError):
        ctx.z_power(1, coeff=2).power(Fraction(1, 2))


def test_monomial_inverse_rejects_sums(ctx):
    with pytest.raises(RepresentabilityError):
        (ctx.one + ctx.z_power(1)).monomial_inverse()
    with pytest.raises(ZeroDivisionError):
        ctx.zero.monomial_inverse()


def test_mixed_contexts_rejected(ctx):
    other = ScalarContext(64, 4)
    with pytest.raises(RepresentabilityError):
        ctx.one + other.z_power(1)


def test_scalar_sum_and_json(ctx):
    total = scalar_sum(ctx, [ctx.one, ctx.z_power(Fraction(1, 4)), ctx.one])
    assert total.to_json()[0]['z'] == '0'
    assert total.to_json()[1]['z'] == '1/4'
    assert total.to_json()[0]['zeta'][0] == '2'
    assert len(total.to_json()[0]['zeta']) == euler_phi(32)
