"""Shared fixtures: the default scalar field and small sample vectors."""

from fractions import Fraction

import pytest

from vtensor.config import RunConfig
from vtensor.core.fock import FockVector
from vtensor.core.scalars import ScalarContext

HALF = Fraction(1, 2)


@pytest.fixture(scope='session')
def ctx() -> ScalarContext:
    """d = 2: exponents in (1/4)Z, coefficients in Q(zeta_32)."""
    return ScalarContext(32, 4)


@pytest.fixture
def e_half(ctx):
    return FockVector.basis_vector(ctx, HALF)


@pytest.fixture
def small_config(tmp_path) -> RunConfig:
    """One sector, one branch each way; fast enough for end-to-end runs."""
    return RunConfig(
        sectors=((HALF, HALF),),
        branch_p=(0,),
        branch_r=(0,),
        grade=3,
        random_functionals=2,
        workers=1,
        output_path=str(tmp_path / 'report.json'),
    )
