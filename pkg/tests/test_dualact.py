"""Tests for functionals on F_lam (x) F_mu and the dual vertex operators."""

import random
from fractions import Fraction

import pytest

from vtensor.core.dualact import (
    LinearCombination, MapImage, PsiInversePullback, PsiPullback, TableFunctional,
    Yprime_P, ZeroFunctional, capped_exp, check_conjugated_bridge, check_dual_jacobi,
    check_dual_vacuum, check_grading, check_image_intertwines, check_inverse_variable_bridge,
    check_L0_transport, check_L1_transport, check_L_bracket, check_local_grading_restriction,
    check_membership, check_P_compat, check_Q_compat, check_stability, check_substituted_bridge,
    compare_functionals, fock_dimensions, pairs, psi, psi_inverse, psi_star, psi_star_inverse,
    tau_P, tau_Q, verify_compatibility_correspondence, verify_psi_conjugation,
)
from vtensor.core.fock import FockVector, heisenberg, mode, omega, opposite_mode
from vtensor.core.maps import spanning_vectors
from vtensor.core.outcome import Verdict
from vtensor.core.series import binomial
from vtensor.errors import DomainExhaustedError, NilpotencyCapError
from vtensor.suites._helpers import COMPAT_WINDOW, JACOBI_WINDOW, p_table, q_table

HALF = Fraction(1, 2)


@pytest.fixture
def table_f(ctx):
    return TableFunctional(ctx, HALF, HALF, {
        ((), ()): ctx.scalar(2),
        ((1,), ()): ctx.scalar(-1),
        ((), (1, 1)): ctx.scalar(Fraction(1, 3)),
    }, label='sample')


def test_pairs():
    assert pairs(HALF, HALF, 1) == [((), ()), ((), (1,)), ((1,), ())]
    assert len(pairs(HALF, HALF, 2)) == 1 * 4 + 1 * 2 + 2 * 1


def test_table_functional_values(ctx, table_f):
    assert table_f.value((), ()) == 2
    assert table_f.value((1,), (1,)) == 0
    w1 = FockVector.basis_vector(ctx, HALF) * 3
    w2 = FockVector.basis_vector(ctx, HALF)
    assert table_f.apply(w1, w2) == 6
    with pytest.raises(ValueError):
        table_f.apply(FockVector.basis_vector(ctx, 0), w2)


def test_apply_reuses_values_for_equal_vectors(ctx, table_f):
    w1 = FockVector.basis_vector(ctx, HALF) + FockVector.basis_vector(ctx, HALF, (1,), 2)
    w2 = FockVector.basis_vector(ctx, HALF, (1, 1))
    first = table_f.apply(w1, w2)
    assert first == ctx.scalar(Fraction(1, 3))
    again = FockVector.basis_vector(ctx, HALF) + FockVector.basis_vector(ctx, HALF, (1,), 2)
    assert table_f.apply(again, w2) is first


def test_table_functional_domain(ctx):
    f = TableFunctional(ctx, HALF, HALF, {((), ()): ctx.one}, domain=1, label='short')
    assert f.value((1,), ()) == 0
    with pytest.raises(DomainExhaustedError):
        f.value((1,), (1,))


def test_random_functionals_are_seeded(ctx):
    a = TableFunctional.random(ctx, HALF, HALF, 2, random.Random(7))
    b = TableFunctional.random(ctx, HALF, HALF, 2, random.Random(7))
    assert a.entries == b.entries
    assert a.entries


def test_linear_structure(ctx, table_f):
    pair_list = pairs(HALF, HALF, 2)
    doubled = table_f + table_f
    assert compare_functionals('double', doubled, table_f.scaled(2), pair_list).passed
    assert (table_f - table_f).is_zero_on(pair_list)
    assert ZeroFunctional(ctx, HALF, HALF).is_zero_on(pair_list)


def test_psi_inverts(ctx):
    b1 = FockVector.basis_vector(ctx, HALF, (1,))
    b2 = FockVector.basis_vector(ctx, HALF, (1,))
    w1, w2 = psi(*psi_inverse(b1, b2))
    assert (w1, w2) == (b1, b2)


def test_psi_pullbacks_invert(ctx, table_f):
    pair_list = pairs(HALF, HALF, 2)
    roundtrip = PsiInversePullback(PsiPullback(table_f))
    assert compare_functionals('psi roundtrip', roundtrip, table_f, pair_list).passed
    assert psi_star(psi_star_inverse(table_f)) is table_f


def test_psi_pullback_moves_values(ctx, table_f):
    # psi changes the lowest pair by the L(0) factor on the second slot
    pulled = PsiPullback(table_f)
    assert pulled.value((), ()) != table_f.value((), ())


def test_capped_exp(ctx, table_f):
    audit = pairs(HALF, HALF, 1)
    with pytest.raises(NilpotencyCapError):
        capped_exp(ctx.one, table_f, lambda g: g, audit, 3, 'identity')
    zero = ZeroFunctional(ctx, HALF, HALF)
    result = capped_exp(ctx.one, table_f, lambda g: zero, audit, 3, 'zero')
    assert isinstance(result, LinearCombination)
    assert compare_functionals('exp', result, table_f, audit).passed


def test_fock_dimensions():
    assert fock_dimensions(HALF, 3) == {HALF: 1, Fraction(3, 2): 1, Fraction(5, 2): 2,
                                        Fraction(7, 2): 3}


@pytest.mark.parametrize('kind', ['P', 'Q'])
def test_dual_vacuum(ctx, table_f, kind):
    outcome = check_dual_vacuum(kind, table_f, pairs(HALF, HALF, 1), (-1, 0, 1))
    assert outcome.verdict == Verdict.PASS


def test_map_image_is_compatible(ctx):
    image = MapImage(p_table(ctx, HALF, HALF, 0), FockVector.basis_vector(ctx, 1))
    outcome = check_P_compat(image, [heisenberg(ctx)], pairs(HALF, HALF, 1), COMPAT_WINDOW)
    assert outcome.verdict == Verdict.PASS


def test_lowest_pair_functional_is_not_compatible(ctx):
    # supported on e (x) e only; the pair e (x) alpha(-1)e exposes the mismatch
    f = TableFunctional(ctx, HALF, HALF, {((), ()): ctx.one}, label='lowest')
    outcome = check_P_compat(f, [heisenberg(ctx)], pairs(HALF, HALF, 1), COMPAT_WINDOW)
    assert outcome.verdict == Verdict.FAIL
    assert outcome.witness


def test_map_image_rejects_wrong_sector(ctx):
    with pytest.raises(ValueError):
        MapImage(p_table(ctx, HALF, HALF, 0), FockVector.basis_vector(ctx, 0))


# -- generating series against hand-expanded delta functions -------------------

def _tau_P_expanded(ctx, f, p1, p2, a, b):
    """[x0^a x1^b] of tau_P(alpha(-1) 1) f, summing the delta expansions term by term.

    Y_t(alpha(-1) 1, x1) = -x1^-2 Y(alpha(-1) 1, .) since L(1) kills alpha(-1) 1.
    """
    b1 = FockVector.basis_vector(ctx, f.lam, p1)
    b2 = FockVector.basis_vector(ctx, f.mu, p2)
    a_vec = heisenberg(ctx)
    total = ctx.zero
    # z^-1 d((x1^-1 - x0)/z) against Y1(-x1^-2 alpha, x0): x0^(i-j-1) x1^(-(n-i)-2)
    for i in range(0, a + sum(p1) + 2):
        n = i - b - 2
        c = binomial(n, i)
        moved = mode(a_vec, i - a - 1, b1)
        if c and moved:
            sign = -1 if i % 2 else 1
            total = total - f.apply(moved, b2) * (sign * c) * ctx.z_power(b + 1 - i)
    # x0^-1 d((z - x1^-1)/(-x0)) against Y2*(alpha, x1): x0^(-n-1) x1^(s-i)
    n = -a - 1
    for i in range(0, sum(p2) - b + 1):
        c = binomial(n, i)
        moved = opposite_mode(a_vec, b + i, b2)
        if c and moved:
            sign = -1 if (n + i) % 2 else 1
            total = total + f.apply(b1, moved) * (sign * c) * ctx.z_power(n - i)
    return total


def _tau_Q_expanded(ctx, g, p1, p2, a, b):
    """[x0^a x1^b] of tau_Q(z^-1)(alpha(-1) 1) g from the delta expansions."""
    b1 = FockVector.basis_vector(ctx, g.lam, p1)
    b2 = FockVector.basis_vector(ctx, g.mu, p2)
    a_vec = heisenberg(ctx)
    total = ctx.zero
    n = -a - 1
    # x0^-1 d((x1 - zeta)/x0) against Y1*(alpha, x1): x1^(n-i+s), zeta = z^-1
    for i in range(0, sum(p1) - b + n + 1):
        c = binomial(n, i)
        moved = opposite_mode(a_vec, b - n + i, b1)
        if c and moved:
            sign = -1 if i % 2 else 1
            total = total + g.apply(moved, b2) * (sign * c) * ctx.z_power(-i)
    # x0^-1 d((zeta - x1)/(-x0)) against Y2(alpha, x1): x1^(i-j-1)
    for i in range(0, sum(p2) + b + 2):
        c = binomial(n, i)
        moved = mode(a_vec, i - b - 1, b2)
        if c and moved:
            sign = -1 if (n + i) % 2 else 1
            total = total - g.apply(b1, moved) * (sign * c) * ctx.z_power(i - n)
    return total


def test_tau_P_matches_delta_expansion(ctx, table_f):
    tau = tau_P(heisenberg(ctx), table_f)
    checked = 0
    for p1, p2 in pairs(HALF, HALF, 1):
        for a in range(-3, 3):
            for b in range(-3, 2):
                expected = _tau_P_expanded(ctx, table_f, p1, p2, a, b)
                assert tau.coefficient(p1, p2, a, b) == expected, (p1, p2, a, b)
                checked += bool(expected)
    assert checked


def test_Yprime_P_is_the_x0_residue(ctx, table_f):
    result = Yprime_P(heisenberg(ctx), table_f)
    for p1, p2 in pairs(HALF, HALF, 1):
        for b in range(-3, 2):
            assert result.coefficient(p1, p2, b) == _tau_P_expanded(ctx, table_f, p1, p2, -1, b)


def test_tau_Q_matches_delta_expansion(ctx, table_f):
    tau = tau_Q(heisenberg(ctx), table_f)
    checked = 0
    for p1, p2 in pairs(HALF, HALF, 1):
        for a in range(-3, 2):
            for b in range(-3, 3):
                expected = _tau_Q_expanded(ctx, table_f, p1, p2, a, b)
                assert tau.coefficient(p1, p2, a, b) == expected, (p1, p2, a, b)
                checked += bool(expected)
    assert checked


# -- verifiers on map images (positive) and bare tables (negative) -------------

@pytest.fixture
def image(ctx):
    """F'_P(e^1') for F_P(Y, 0) on F_1/2 x F_1/2; its lowest weight is 1/2."""
    return MapImage(p_table(ctx, HALF, HALF, 0), FockVector.basis_vector(ctx, 1))


@pytest.fixture
def lowest(ctx):
    return TableFunctional(ctx, HALF, HALF, {((), ()): ctx.one}, label='lowest')


def test_grading_of_map_image(image):
    outcome = check_grading(image, pairs(HALF, HALF, 2))
    assert outcome.verdict == Verdict.PASS
    assert outcome.details['weights'] == ['1/2']
    assert outcome.details['dimension'] == 1


@pytest.mark.parametrize('orbit', ['alpha', 'weight-two'])
def test_local_grading_restriction_matches_fock_dimensions(ctx, image, orbit):
    generators = None if orbit == 'alpha' else spanning_vectors(ctx, 2)
    outcome = check_local_grading_restriction(image, pairs(HALF, HALF, 3), cap=2,
                                              expected=fock_dimensions(HALF, 2),
                                              generators=generators)
    assert outcome.verdict == Verdict.WINDOW_LIMITED
    assert outcome.details['dimensions'] == {'1/2': 1, '3/2': 1, '5/2': 2}
    assert outcome.details['lowest_weight'] == '1/2'


def test_local_grading_restriction_rejects_wrong_root(image):
    outcome = check_local_grading_restriction(image, pairs(HALF, HALF, 3), cap=2,
                                              root_weight=Fraction(3, 2))
    assert outcome.verdict == Verdict.FAIL
    assert outcome.witness['reason'] == 'lowest weight'
    assert outcome.witness['left'] == HALF


def test_local_grading_restriction_rejects_unexpected_weights(image):
    # expectations stop at the root; the orbit reaches 3/2
    outcome = check_local_grading_restriction(image, pairs(HALF, HALF, 3), cap=2,
                                              expected={HALF: 1})
    assert outcome.verdict == Verdict.FAIL
    assert outcome.witness == {'weight': '3/2', 'left': 1, 'right': 0}

    wrong = check_local_grading_restriction(image, pairs(HALF, HALF, 3), cap=2,
                                            expected={HALF: 1, Fraction(3, 2): 2,
                                                      Fraction(5, 2): 2})
    assert wrong.verdict == Verdict.FAIL
    assert wrong.witness['weight'] == '3/2'


def test_membership(ctx, image, lowest):
    pair_list = pairs(HALF, HALF, 3)
    accepted = check_membership(image, [heisenberg(ctx)], pair_list, COMPAT_WINDOW, orbit_cap=2,
                                expected=fock_dimensions(HALF, 2))
    assert accepted.verdict in (Verdict.PASS, Verdict.WINDOW_LIMITED)
    rejected = check_membership(lowest, [heisenberg(ctx)], pairs(HALF, HALF, 1), COMPAT_WINDOW)
    assert rejected.verdict == Verdict.FAIL
    assert rejected.witness


@pytest.mark.parametrize('vector', ['heisenberg', 'omega'])
def test_psi_conjugation(ctx, table_f, vector):
    v = heisenberg(ctx) if vector == 'heisenberg' else omega(ctx)
    outcome = verify_psi_conjugation(table_f, v, pairs(HALF, HALF, 1), COMPAT_WINDOW)
    assert outcome.verdict == Verdict.PASS, outcome.witness
    assert outcome.compared > 0


def test_Q_compat_of_pulled_back_image(ctx, image, lowest):
    vectors = [heisenberg(ctx)]
    pair_list = pairs(HALF, HALF, 1)
    assert check_Q_compat(PsiInversePullback(image), vectors, pair_list, COMPAT_WINDOW).passed
    rejected = check_Q_compat(PsiInversePullback(lowest), vectors, pair_list, COMPAT_WINDOW)
    assert rejected.verdict == Verdict.FAIL


def test_compatibility_correspondence(ctx, image, lowest):
    vectors = [heisenberg(ctx)]
    pair_list = pairs(HALF, HALF, 1)
    both_pass = verify_compatibility_correspondence(
        image, vectors, pair_list, COMPAT_WINDOW,
        jacobi_pairs=[(heisenberg(ctx), heisenberg(ctx))])
    assert both_pass.verdict == Verdict.PASS, both_pass.witness
    assert both_pass.details['p_compat']['verdict'] == 'PASS'

    both_fail = verify_compatibility_correspondence(lowest, vectors, pair_list, COMPAT_WINDOW)
    assert both_fail.verdict == Verdict.PASS
    assert both_fail.details['p_compat']['verdict'] == 'FAIL'
    assert both_fail.details['q_compat']['verdict'] == 'FAIL'


def test_dual_jacobi(ctx, image):
    outcome = check_dual_jacobi(image, heisenberg(ctx), heisenberg(ctx), pairs(HALF, HALF, 1),
                                JACOBI_WINDOW)
    assert outcome.verdict == Verdict.PASS, outcome.witness


def test_L_transports_and_brackets(image):
    pair_list = pairs(HALF, HALF, 1)
    assert check_L1_transport(image, pair_list).passed
    assert check_L0_transport(image, pair_list).passed
    assert check_L_bracket('P', image, pair_list).passed
    assert check_L_bracket('Q', PsiInversePullback(image), pair_list).passed


def test_bridges(ctx, image):
    pair_list = pairs(HALF, HALF, 1)
    v = heisenberg(ctx)
    exponents = (-1, 0, 1)
    assert check_inverse_variable_bridge(image, v, pair_list, exponents).passed
    assert check_substituted_bridge(image, v, pair_list, exponents).passed
    assert check_conjugated_bridge(image, v, pair_list, exponents, pair_list).passed


def test_stability(ctx, image):
    outcome = check_stability(image, heisenberg(ctx), -1, [heisenberg(ctx)], pairs(HALF, HALF, 1),
                              COMPAT_WINDOW)
    assert outcome.name == 'stability'
    assert outcome.verdict == Verdict.PASS


@pytest.mark.parametrize('kind', ['P', 'Q'])
def test_image_intertwines(ctx, kind):
    if kind == 'P':
        table, zeta = p_table(ctx, HALF, HALF, 0), None
    else:
        table, zeta = q_table(ctx, HALF, HALF, 0, 0), ctx.z_power(1)
    dual = FockVector.basis_vector(ctx, 1, (1,))
    outcome = check_image_intertwines(table, dual, heisenberg(ctx), pairs(HALF, HALF, 1),
                                      (-1, 0, 1), zeta)
    assert outcome.verdict == Verdict.PASS, outcome.witness
