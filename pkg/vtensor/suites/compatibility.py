"""
VTensor v1.0 - Compatibility suites
The P(z)/Q(z^-1) compatibility correspondence, the Jacobi identity and
L' relations on compatible functionals, and membership of map images in
the space of compatible, locally grading-restricted functionals.
"""

import logging
from typing import List, Sequence

from vtensor.core.dualact import (
    DualFunctional, MapImage, PsiInversePullback, check_L0_transport, check_L1_transport,
    check_L_bracket, check_dual_jacobi, check_membership, check_stability, fock_dimensions, pairs,
    verify_compatibility_correspondence,
)
from vtensor.core.fock import FockVector, heisenberg, omega
from vtensor.core.maps import spanning_vectors
from vtensor.core.outcome import CheckOutcome, Verdict
from vtensor.suites._helpers import (
    COMPAT_WINDOW, JACOBI_WINDOW, p_table, random_functionals, sector_label,
    structured_functionals,
)
from vtensor.suites.base import BaseSuite, SuiteCase, SuiteContext, register_suite

logger = logging.getLogger(__name__)

STRUCTURED_COUNT = 10
RANDOM_COUNT = 10
COMPAT_PAIR_GRADE = 2
BRIDGE_EXPONENTS = (-1, 0, 1)
MEMBERSHIP_PAIR_GRADE = 3
MEMBERSHIP_ORBIT_CAP = 4
MEMBERSHIP_ORBIT_WEIGHT = 2


def _structured(run: SuiteContext) -> List[DualFunctional]:
    lam, mu = run.config.sector_pairs[0]
    return structured_functionals(run.ctx, lam, mu, list(run.config.branch_p), STRUCTURED_COUNT)


def _compat_pairs(run: SuiteContext):
    lam, mu = run.config.sector_pairs[0]
    return pairs(lam, mu, COMPAT_PAIR_GRADE)


def _vectors(run: SuiteContext) -> List[FockVector]:
    return [heisenberg(run.ctx), omega(run.ctx)]


def check_correspondence(f: DualFunctional, expected: Verdict, vectors: Sequence[FockVector],
                         pair_list, bridge_vectors: Sequence[FockVector] = (),
                         margin: int = 3, nilpotency_cap: int = 8) -> CheckOutcome:
    """The correspondence holds and P(z)-compatibility itself has the expected verdict."""
    out = verify_compatibility_correspondence(
        f, vectors, pair_list, COMPAT_WINDOW, bridge_vectors=bridge_vectors,
        bridge_exponents=BRIDGE_EXPONENTS, margin=margin, nilpotency_cap=nilpotency_cap)
    if out.verdict != Verdict.PASS:
        return out
    p_compat = out.details['p_compat']
    if p_compat['verdict'] != expected.value:
        return CheckOutcome.failure(out.name, {
            'reason': 'unexpected P(z)-compatibility verdict',
            'left': p_compat['verdict'], 'right': expected.value,
        }, functional=f.label)
    if expected == Verdict.FAIL and not p_compat['witness']:
        return CheckOutcome.failure(out.name, {'reason': 'incompatibility without a witness'},
                                    functional=f.label)
    return out


@register_suite
class CompatibilityEquivalenceSuite(BaseSuite):
    name = 'compat-equivalence'
    identity = 'f is P(z)-compatible iff (psi*)^-1 f is Q(z^-1)-compatible'
    description = 'correspondence on intertwining-map images and random functionals'
    anchor = 'P(z)- and Q(z^-1)-compatibility correspond under psi*'
    aliases = ('compatibility',)

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        config = run.config
        lam, mu = config.sector_pairs[0]
        pair_list = _compat_pairs(run)
        vectors = _vectors(run)
        bridges = [heisenberg(ctx)]
        out = []
        for f in _structured(run):
            out.append(SuiteCase(
                f"structured {f.label}",
                lambda f=f: check_correspondence(f, Verdict.PASS, vectors, pair_list, bridges,
                                                 config.truncation_margin, config.nilpotency_cap)))
        rng = run.rng(self.name)
        count = min(RANDOM_COUNT, config.random_functionals)
        for f in random_functionals(ctx, lam, mu, config.random_table_grade, rng, count):
            out.append(SuiteCase(
                f"random {f.label}",
                lambda f=f: check_correspondence(f, Verdict.FAIL, vectors, pair_list,
                                                 margin=config.truncation_margin)))
        for f in _structured(run)[:2]:
            out.append(SuiteCase(
                f"stability {f.label}",
                lambda f=f: check_stability(f, heisenberg(ctx), -1, vectors, pair_list,
                                            COMPAT_WINDOW, config.truncation_margin),
                "components of Y'_P(v, x) f are compatible"))
        return out


@register_suite
class DualJacobiSuite(BaseSuite):
    name = 'dual-jacobi'
    identity = ("x0^-1 d((x1-x2)/x0) Y'_P(u,x1)Y'_P(v,x2)f - x0^-1 d((x2-x1)/(-x0)) Y'_P(v,x2)Y'_P(u,x1)f"
                " = x2^-1 d((x1-x0)/x2) Y'_P(Y(u,x0)v,x2)f")
    description = "Jacobi identity for Y'_P on compatible functionals"
    anchor = "Jacobi identity for Y'_P"

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        pair_list = pairs(*run.config.sector_pairs[0], 1)
        a, w = heisenberg(ctx), omega(ctx)
        samples = (('omega', 'omega', w, w), ('alpha(-1)1', 'omega', a, w),
                   ('alpha(-1)1', 'alpha(-1)1', a, a))
        out = []
        for f in _structured(run):
            for u_label, v_label, u, v in samples:
                out.append(SuiteCase(
                    f"{f.label} u={u_label} v={v_label}",
                    lambda f=f, u=u, v=v: check_dual_jacobi(f, u, v, pair_list, JACOBI_WINDOW)))
        return out


@register_suite
class VirasoroRelationSuite(BaseSuite):
    name = 'virasoro-relations'
    identity = "L' transport under psi* and [L'(0), L'(1)] = -L'(1)"
    description = "L'_P and L'_Q relations on compatible functionals"
    anchor = "L'_P and L'_Q relations"
    aliases = ('L-relations',)

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        pair_list = _compat_pairs(run)
        out = []
        for f in _structured(run):
            out.extend([
                SuiteCase(f"{f.label} L'(1) transport",
                          lambda f=f: check_L1_transport(f, pair_list),
                          "(psi*)^-1 L'_P(1) f = L'_Q(1) (psi*)^-1 f"),
                SuiteCase(f"{f.label} L'(0) transport",
                          lambda f=f: check_L0_transport(f, pair_list),
                          "(psi*)^-1 L'_P(0) f = (L'_Q(0) + z L'_Q(1)) (psi*)^-1 f"),
                SuiteCase(f"{f.label} P bracket",
                          lambda f=f: check_L_bracket('P', f, pair_list),
                          "[L'_P(0), L'_P(1)] f = -L'_P(1) f"),
                SuiteCase(f"{f.label} Q bracket",
                          lambda f=f: check_L_bracket('Q', PsiInversePullback(f), pair_list),
                          "[L'_Q(0), L'_Q(1)] g = -L'_Q(1) g"),
            ])
        return out


@register_suite
class MembershipSuite(BaseSuite):
    name = 'membership'
    identity = 'F\'((e^(lam+mu))\') is compatible and locally grading-restricted'
    description = 'images of lowest-weight dual vectors lie in the compatible subspace'
    anchor = 'compatibility and local grading restriction'
    aliases = ('hboxtr-membership',)

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        config = run.config
        vectors = _vectors(run)
        cap = min(MEMBERSHIP_ORBIT_CAP, max(config.grade - 1, 0))
        generators = spanning_vectors(ctx, min(MEMBERSHIP_ORBIT_WEIGHT, max(config.grade, 1)))
        out = []
        for lam, mu in config.sector_pairs:
            pair_list = pairs(lam, mu, MEMBERSHIP_PAIR_GRADE)
            root = (lam + mu) ** 2 / 2
            expected = fock_dimensions(root, cap)
            for p in config.branch_p:
                image = MapImage(p_table(ctx, lam, mu, p), FockVector.basis_vector(ctx, lam + mu))
                out.append(SuiteCase(
                    f"{sector_label(lam, mu)} p={p}",
                    lambda image=image, pair_list=pair_list, expected=expected, root=root:
                    check_membership(
                        image, vectors, pair_list, COMPAT_WINDOW, orbit_cap=cap,
                        margin=config.truncation_margin, expected=expected,
                        generators=generators, root_weight=root)))
        return out
