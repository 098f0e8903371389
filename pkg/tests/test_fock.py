"""Tests for the rank-1 Heisenberg Fock modules."""

from fractions import Fraction

import pytest

from vtensor.core.fock import (
    FockBasisElement, FockVector, L0Factor, PSI_L0, alpha, basis_upto, clear_mode_cache, exp_L1,
    graded_dimension, heisenberg, intertwiner_coefficient, mode, mode_cache_info, omega,
    opposite_mode, opposite_Y, pairing, partition_count, partitions, scale_L0, vacuum, vertex_Y,
    virasoro_L,
)
from vtensor.core.scalars import ScalarContext
from vtensor.errors import RepresentabilityError, WindowOverflowError

HALF = Fraction(1, 2)


def test_partitions():
    assert [partition_count(n) for n in range(7)] == [1, 1, 2, 3, 5, 7, 11]
    assert set(partitions(3)) == {(3,), (2, 1), (1, 1, 1)}
    assert graded_dimension(4) == 5


def test_basis_weights():
    e = FockBasisElement(HALF, (2, 1))
    assert e.grade == 3
    assert e.weight == Fraction(1, 8) + 3
    assert str(e) == 'a(-2)a(-1)e^1/2'
    assert len(basis_upto(HALF, 3)) == 1 + 1 + 2 + 3


def test_vector_arithmetic(ctx):
    a = FockVector.basis_vector(ctx, HALF, (1,))
    b = FockVector.basis_vector(ctx, HALF)
    s = a * 2 + b
    assert s.grades() == [0, 1]
    assert s.max_grade == 1
    assert s.component(1) == a * 2
    assert (s - s).is_zero()
    assert FockVector.zero(ctx, HALF).max_grade == -1
    assert s.truncate(0) == b


def test_heisenberg_modes(ctx, e_half):
    a1 = alpha(-1, e_half)
    assert a1 == FockVector.basis_vector(ctx, HALF, (1,))
    assert alpha(1, a1) == e_half
    assert alpha(0, e_half) == e_half * HALF
    assert alpha(2, a1).is_zero()
    with pytest.raises(WindowOverflowError):
        alpha(-3, e_half, max_grade=2)


def test_virasoro_modes(ctx, e_half):
    a1 = FockVector.basis_vector(ctx, HALF, (1,))
    assert virasoro_L(0, e_half) == e_half * Fraction(1, 8)
    assert virasoro_L(0, a1) == a1 * Fraction(9, 8)
    assert virasoro_L(-1, e_half) == a1 * HALF
    assert virasoro_L(1, a1) == e_half * HALF


def test_virasoro_central_term(ctx, e_half):
    """[L(2), L(-2)] = 4 L(0) + c/2 with c = 1."""
    w = e_half
    left = virasoro_L(2, virasoro_L(-2, w)) - virasoro_L(-2, virasoro_L(2, w))
    right = virasoro_L(0, w) * 4 + w * HALF
    assert left == right


def test_exp_L1(ctx):
    w = FockVector.basis_vector(ctx, HALF, (1,))
    e = FockVector.basis_vector(ctx, HALF)
    assert exp_L1(3, w) == w + e * Fraction(3, 2)


def test_scale_L0_and_factor(ctx, e_half):
    # (z^2)^(L(0)) on a weight-1/8 vector
    factor = L0Factor(Fraction(2), Fraction(0))
    expected = FockVector.basis_vector(ctx, HALF, (), ctx.z_power(Fraction(1, 4)))
    assert scale_L0(factor, e_half) == expected
    assert PSI_L0.base(ctx) == -ctx.z_power(-2)
    roundtrip = scale_L0(PSI_L0.inverse(), scale_L0(PSI_L0, e_half))
    assert roundtrip == e_half
    with pytest.raises(RepresentabilityError):
        L0Factor(rational=Fraction(2)).value(ctx, Fraction(1, 8))


def test_algebra_modes(ctx, e_half):
    assert mode(vacuum(ctx), -1, e_half) == e_half
    assert mode(heisenberg(ctx), -1, e_half) == FockVector.basis_vector(ctx, HALF, (1,))
    assert mode(heisenberg(ctx), 0, e_half) == e_half * HALF
    # omega_1 = L(0)
    assert mode(omega(ctx), 1, e_half) == e_half * Fraction(1, 8)
    with pytest.raises(ValueError):
        mode(e_half, 0, e_half)


def test_intertwiner_leading_terms(ctx):
    lam, mu = HALF, Fraction(-1, 2)
    v = FockVector.basis_vector(ctx, lam)
    w = FockVector.basis_vector(ctx, mu)
    lowest = intertwiner_coefficient(v, lam * mu, w)
    assert lowest == FockVector.basis_vector(ctx, 0)
    next_term = intertwiner_coefficient(v, lam * mu + 1, w)
    assert next_term == FockVector.basis_vector(ctx, 0, (1,), lam)
    assert intertwiner_coefficient(v, lam * mu - 1, w).is_zero()


def test_vertex_Y_grades(ctx, e_half):
    series = vertex_Y(heisenberg(ctx), e_half, 1)
    assert series[Fraction(-1)] == e_half * HALF
    assert series[Fraction(0)] == FockVector.basis_vector(ctx, HALF, (1,))
    assert all(c.max_grade <= 1 for c in series.values())


def test_pairing(ctx):
    w = FockVector.basis_vector(ctx, HALF, (1,), 3) + FockVector.basis_vector(ctx, HALF, (), 2)
    dual = FockVector.basis_vector(ctx, HALF, (1,))
    assert pairing(dual, w) == 3
    with pytest.raises(ValueError):
        pairing(FockVector.basis_vector(ctx, 0), w)


def test_opposite_vertex_operator_of_vacuum(ctx):
    w = FockVector.basis_vector(ctx, Fraction(1, 2), (1,))
    series = opposite_Y(vacuum(ctx), w, 2)
    assert (series[0] - w).is_zero()
    assert all(c.is_zero() for e, c in series.items() if e != 0)


def test_cached_modes_match_fresh_ones(ctx):
    w = FockVector.basis_vector(ctx, HALF, (2, 1))
    v = omega(ctx) + heisenberg(ctx) * 3
    clear_mode_cache()
    first = [mode(v, n, w) for n in range(-2, 3)]
    opposite = opposite_mode(v, -1, w)
    assert mode_cache_info()['mode']['hits'] == 0
    assert [mode(v, n, w) for n in range(-2, 3)] == first
    assert opposite_mode(v, -1, w) == opposite
    assert mode_cache_info()['mode']['hits'] >= 5
    assert mode_cache_info()['opposite_mode']['hits'] == 1
    # same coefficients, different field: the cache must not hand back the old context
    other = FockVector.basis_vector(ScalarContext(64, 4), HALF, (2, 1))
    moved = mode(heisenberg(other.ctx), -1, other)
    assert moved.ctx == other.ctx
