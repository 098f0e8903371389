"""
VTensor v1.0 - Dual vertex operator suites
Y'_P and Y'_Q on random functionals, images of intertwining maps and the
psi-conjugation identity relating tau_P to tau_Q.
"""

import logging
from typing import List

from vtensor.core.dualact import (
    check_dual_derivative, check_dual_vacuum, check_image_intertwines, pairs,
    verify_psi_conjugation,
)
from vtensor.core.fock import heisenberg, omega
from vtensor.suites._helpers import (
    COMPAT_WINDOW, algebra_samples, module_basis, p_table, q_table, random_functionals, run_all,
    sector_label,
)
from vtensor.suites.base import BaseSuite, SuiteCase, SuiteContext, register_suite

logger = logging.getLogger(__name__)

DUAL_EXPONENTS = (-2, -1, 0, 1, 2)
DUAL_PAIR_GRADE = 3
PSI_PAIR_GRADE = 4


@register_suite
class DualVertexOperatorSuite(BaseSuite):
    name = 'dual-vertex-operator'
    identity = "Y'(1, x) = identity and d/dx Y'(v, x) = Y'(L(-1) v, x)"
    description = "vacuum and derivative properties of Y'_P and Y'_Q, images of F'"
    anchor = "vacuum and L(-1)-derivative of Y'_P and Y'_Q"
    aliases = ('dual-vertex-operators',)

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        config = run.config
        lam, mu = config.sector_pairs[0]
        pair_list = pairs(lam, mu, DUAL_PAIR_GRADE)
        rng = run.rng(self.name)
        functionals = random_functionals(ctx, lam, mu, config.random_table_grade, rng,
                                         config.random_functionals)
        vectors = [heisenberg(ctx), omega(ctx)]
        out = []
        for f in functionals:
            for kind in ('P', 'Q'):
                out.append(SuiteCase(
                    f"{f.label} {kind} vacuum",
                    lambda f=f, kind=kind: check_dual_vacuum(kind, f, pair_list, DUAL_EXPONENTS),
                    f"Y'_{kind}(1, x) f = f"))
                out.append(SuiteCase(
                    f"{f.label} {kind} derivative",
                    lambda f=f, kind=kind: run_all(f"Y'_{kind} L(-1)-derivative", (
                        check_dual_derivative(kind, v, f, pair_list, DUAL_EXPONENTS)
                        for v in vectors)),
                    f"d/dx Y'_{kind}(v, x) f = Y'_{kind}(L(-1) v, x) f"))

        z = ctx.z_power(1)
        for lam, mu in config.sector_pairs:
            duals = module_basis(ctx, lam + mu, 1)
            pair_list = pairs(lam, mu, 2)
            tables = [p_table(ctx, lam, mu, p) for p in config.branch_p]
            tables += [q_table(ctx, lam, mu, r, p) for r in config.branch_r for p in config.branch_p]
            for table in tables:
                zeta = z if table.kind == 'Q' else None
                out.append(SuiteCase(
                    f"{sector_label(lam, mu)} {table.label}",
                    lambda table=table, zeta=zeta, duals=duals, pair_list=pair_list: run_all(
                        "F' intertwines", (
                            check_image_intertwines(table, c, v, pair_list, DUAL_EXPONENTS, zeta)
                            for c in duals for v in vectors)),
                    "Y'(v, x) F'(c') = F'(Y'(v, x) c')"))
        return out


@register_suite
class PsiConjugationSuite(BaseSuite):
    name = 'psi-conjugation'
    identity = ("tau_P(x0^-1 d((x1^-1-z)/x0) Y_t(v,x1)) psi*(f) = (z x0)^-1 psi*(tau_Q(z^-1)("
                "z x0 x1 d((z^-1+x0^-1)/(z x0 x1)^-1) Y_t(e^(z x0 x1 L(1)) (x0 x1)^(-2L(0)) v, x0^-1)) f)")
    description = 'conjugating tau_Q(z^-1) by psi* gives tau_P(z)'
    anchor = 'psi* conjugates tau_Q(z^-1) into tau_P(z)'

    def cases(self, run: SuiteContext) -> List[SuiteCase]:
        ctx = run.ctx
        config = run.config
        lam, mu = config.sector_pairs[0]
        pair_list = pairs(lam, mu, min(PSI_PAIR_GRADE, config.grade))
        rng = run.rng(self.name)
        functionals = random_functionals(ctx, lam, mu, config.random_table_grade, rng,
                                         config.random_functionals)
        out = []
        for f in functionals:
            for label, v in algebra_samples(ctx):
                out.append(SuiteCase(
                    f"{f.label} v={label}",
                    lambda f=f, v=v: verify_psi_conjugation(f, v, pair_list, COMPAT_WINDOW)))
        return out
