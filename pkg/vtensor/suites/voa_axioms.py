"""
VTensor v1.0 - Vertex operator algebra axiom suite
Vacuum and creation properties, L(-1)-derivative, Jacobi and Borcherds
identities and Virasoro brackets for the Heisenberg VOA on a Fock module.
"""

import logging
from fractions import Fraction
from itertools import product
from typing import List, Tuple

from vtensor.core.axioms import (
    check_borcherds_identity, check_creation_property, check_intertwiner_leading_term,
    check_vacuum_property, check_vertex_grading, check_virasoro_relation,
)
from vtensor.core.fock import FockVector, algebra_weight
from vtensor.core.maps import check_intertwiner_derivative, check_intertwiner_jacobi, spanning_vectors
from vtensor.suites._helpers import JACOBI_WINDOW, fock_intertwiner, module_basis, run_all
from vtensor.suites.base import BaseSuite, SuiteCase, SuiteContext, register_suite

logger = logging.getLogger(__name__)

# Vectors reach weight/grade G - 1 but never beyond this.
MAX_SAMPLE_WEIGHT = 4
JACOBI_WEIGHT = 2
JACOBI_TARGET_GRADE = 1
VIRASORO_MODES = (-2, -1, 0, 1, 2)


def borcherds_modes(u_weight: int, v_weight: int) -> List[Tuple[int, int, int]]:
    """(m, n, l) with n at -1, 0 and the last nonzero u_n v, m in {0, 1}.

    l is chosen so both sides land in the grade of w.
    """
    top = u_weight + v_weight - 1
    modes = []
    for n in dict.fromkeys((-1, 0, top)):
        for m in (0, 1):
            modes.append((m, n, u_weight + v_weight - m - n - 2))
    return modes


@register_suite
class VOAAxiomSuite(BaseSuite):
    name = 'voa-axioms'
    identity = 'Heisenberg VOA axioms'
    description = 'vacuum, creation, derivative, Jacobi, Borcherds and Virasoro checks'
    anchor = 'Jacobi identity of the Heisenberg module'

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        grade = run.config.grade
        top = min(max(grade - 1, 0), MAX_SAMPLE_WEIGHT)
        mu = Fraction(1, run.config.momentum_denominator)
        algebra = spanning_vectors(ctx, top)
        module = module_basis(ctx, mu, top)
        module_op = fock_intertwiner(ctx, Fraction(0), mu)
        out = [
            SuiteCase('vacuum', lambda: run_all(
                'vacuum property', (check_vacuum_property(w, grade) for w in module),
                momentum=str(mu)), 'Y(1, x) w = w'),
            SuiteCase('creation', lambda: run_all(
                'creation property', (check_creation_property(v, grade) for v in algebra)),
                'Y(v, x) 1 = v + O(x)'),
            SuiteCase('vertex-grading', lambda: run_all(
                'vertex operator grading',
                (check_vertex_grading(v, w, grade) for v in algebra for w in module)),
                'wt v_n w = wt v + wt w - n - 1'),
        ]
        for v in algebra:
            out.append(SuiteCase(
                f"derivative {v!r}",
                lambda v=v: run_all('L(-1)-derivative', (
                    check_intertwiner_derivative(module_op, v, w, grade) for w in module)),
                'd/dx Y(v, x) = Y(L(-1) v, x)'))

        jacobi_samples = [v for v in spanning_vectors(ctx, JACOBI_WEIGHT) if algebra_weight(v) > 0]
        targets = module_basis(ctx, mu, JACOBI_TARGET_GRADE)
        for u, v in product(jacobi_samples, jacobi_samples):
            out.append(SuiteCase(
                f"jacobi {u!r} {v!r}",
                lambda u=u, v=v: run_all('Jacobi identity', (
                    check_intertwiner_jacobi(module_op, u, v, w, dual, JACOBI_WINDOW)
                    for w in targets for dual in targets)),
                'x0^-1 d((x1-x2)/x0) Y(u,x1)Y(v,x2) - x0^-1 d((x2-x1)/(-x0)) Y(v,x2)Y(u,x1)'
                ' = x2^-1 d((x1-x0)/x2) Y(Y(u,x0)v,x2)'))

        for u in algebra:
            out.append(SuiteCase(
                f"borcherds {u!r}",
                lambda u=u: run_all('Borcherds identity', (
                    check_borcherds_identity(u, v, w, m, n, l)
                    for v in algebra if algebra_weight(u) + algebra_weight(v) <= top
                    for w in module
                    for m, n, l in borcherds_modes(algebra_weight(u), algebra_weight(v)))),
                'sum C(m,i)(u_(n+i)v)_(m+l-i) = sum (-1)^i C(n,i)(u_(m+n-i)v_(l+i) - (-1)^n v_(n+l-i)u_(m+i))',
                anchor='Borcherds identity'))

        out.append(SuiteCase('virasoro', lambda: run_all('Virasoro relation', (
            check_virasoro_relation(m, n, w)
            for w in module_basis(ctx, mu, 3) for m, n in product(VIRASORO_MODES, repeat=2))),
            '[L(m), L(n)] = (m-n) L(m+n) + (m^3-m)/12 delta_(m+n,0)'))

        for lam, nu in run.config.sector_pairs:
            out.append(SuiteCase(
                f"leading-term ({lam},{nu})",
                lambda lam=lam, nu=nu: check_intertwiner_leading_term(
                    FockVector.basis_vector(ctx, lam), FockVector.basis_vector(ctx, nu)),
                'Y(e^lam, x) e^mu = x^(lam mu) (e^(lam+mu) + ...)'))
        return out
