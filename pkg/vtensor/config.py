"""
VTensor v1.0 - Central Configuration
All settings are driven by environment variables with sensible defaults.
"""

import math
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple

from vtensor.errors import ConfigError


def _int_list(raw: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in raw.split(',') if part.strip())


def _sector_list(raw: str) -> Tuple[Tuple[Fraction, Fraction], ...]:
    sectors = []
    for part in raw.split(','):
        if part.strip():
            lam, _, mu = part.partition(':')
            sectors.append((Fraction(lam.strip()), Fraction(mu.strip())))
    return tuple(sectors)


class Config:
    """Run defaults with environment variable overrides."""

    # -------------------------------------------------------------------------
    # Base paths
    # -------------------------------------------------------------------------
    BASE_DIR = Path(__file__).parent.parent  # vtensor repo root
    OUTPUT_PATH = os.getenv('VT_OUTPUT', str(BASE_DIR / 'reports' / 'report.json'))
    OUTPUT_FORMAT = os.getenv('VT_FORMAT', 'json')

    # -------------------------------------------------------------------------
    # Heisenberg instance and windows
    # -------------------------------------------------------------------------
    MOMENTUM_DENOMINATOR = int(os.getenv('VT_MOMENTUM_DENOMINATOR', 2))
    GRADE = int(os.getenv('VT_GRADE', 5))
    # 0 means "derive the smallest admissible order"
    CYCLOTOMIC_ORDER = int(os.getenv('VT_CYCLOTOMIC_ORDER', 0))

    # Sector pairs (lambda, mu) exercised by the map suites, e.g. "1/2:1/2,1:1/2".
    # Empty means derive them from the momentum denominator.
    SECTORS = _sector_list(os.getenv('VT_SECTORS', ''))

    # -------------------------------------------------------------------------
    # Branches and sampling
    # -------------------------------------------------------------------------
    BRANCH_P = _int_list(os.getenv('VT_BRANCH_P', '0,1'))
    BRANCH_R = _int_list(os.getenv('VT_BRANCH_R', '0,-1'))
    SEED = int(os.getenv('VT_SEED', 20240601))
    RANDOM_FUNCTIONALS = int(os.getenv('VT_RANDOM_FUNCTIONALS', 25))
    RANDOM_TABLE_GRADE = int(os.getenv('VT_RANDOM_TABLE_GRADE', 2))

    # -------------------------------------------------------------------------
    # Dual-action checks
    # -------------------------------------------------------------------------
    TRUNCATION_MARGIN = int(os.getenv('VT_TRUNCATION_MARGIN', 3))
    NILPOTENCY_CAP = int(os.getenv('VT_NILPOTENCY_CAP', 8))

    # -------------------------------------------------------------------------
    # Work pool
    # -------------------------------------------------------------------------
    WORKERS = int(os.getenv('VT_WORKERS', 4))
    # 'process' or 'thread'
    POOL = os.getenv('VT_POOL', 'process')

    # -------------------------------------------------------------------------
    # Logging
    # -------------------------------------------------------------------------
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_DIR = os.getenv('LOG_DIR', str(BASE_DIR / 'logs'))
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    LOG_MAX_BYTES = int(os.getenv('LOG_MAX_BYTES', 10 * 1024 * 1024))  # 10 MB
    LOG_BACKUP_COUNT = int(os.getenv('LOG_BACKUP_COUNT', 5))


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters of one verification run."""
    momentum_denominator: int = Config.MOMENTUM_DENOMINATOR
    grade: int = Config.GRADE
    branch_p: Tuple[int, ...] = Config.BRANCH_P
    branch_r: Tuple[int, ...] = Config.BRANCH_R
    cyclotomic_order: int = Config.CYCLOTOMIC_ORDER
    seed: int = Config.SEED
    suites: Tuple[str, ...] = ()
    output_path: str = Config.OUTPUT_PATH
    output_format: str = Config.OUTPUT_FORMAT
    sectors: Tuple[Tuple[Fraction, Fraction], ...] = Config.SECTORS
    random_functionals: int = Config.RANDOM_FUNCTIONALS
    random_table_grade: int = Config.RANDOM_TABLE_GRADE
    truncation_margin: int = Config.TRUNCATION_MARGIN
    nilpotency_cap: int = Config.NILPOTENCY_CAP
    workers: int = Config.WORKERS
    pool: str = Config.POOL
    include_timings: bool = False
    inject_corruption: bool = False

    @property
    def denominator(self) -> int:
        """N: every exponent of z and of the formal variables lies in (1/N)Z."""
        return self.momentum_denominator ** 2

    @property
    def auto_order(self) -> int:
        """Smallest admissible M: a multiple of 2N d^2 and of the 4d^2 that e^(pi i h) needs."""
        d2 = self.momentum_denominator ** 2
        return math.lcm(2 * self.denominator * d2, 4 * d2)

    @property
    def order(self) -> int:
        """M, the order of the root of unity generating the coefficient field."""
        return self.cyclotomic_order or self.auto_order

    def momenta(self) -> Tuple[Fraction, ...]:
        """Momenta of the sample sectors: 0, +-1/d, +-1 for d = 2."""
        d = self.momentum_denominator
        values = {Fraction(0), Fraction(1, d), Fraction(-1, d), Fraction(1), Fraction(-1)}
        return tuple(sorted(values))

    @property
    def sector_pairs(self) -> Tuple[Tuple[Fraction, Fraction], ...]:
        """The explicit sectors, or (q, q), (q, -q), (1, q) for q = 1/d."""
        if self.sectors:
            return self.sectors
        momenta = self.momenta()
        q = min(m for m in momenta if m > 0)
        top = max(momenta)
        return tuple(dict.fromkeys(((q, q), (q, -q), (top, q))))

    def validate(self) -> 'RunConfig':
        if self.momentum_denominator < 1:
            raise ConfigError("momentum denominator must be positive")
        if self.grade < 0:
            raise ConfigError("grade window G must be >= 0")
        if self.cyclotomic_order and self.cyclotomic_order % self.auto_order:
            raise ConfigError(
                f"cyclotomic order {self.cyclotomic_order} is not a multiple of "
                f"the minimum {self.auto_order}"
            )
        if not self.branch_p or not self.branch_r:
            raise ConfigError("at least one branch p and one branch r are required")
        if self.output_format not in ('json', 'text'):
            raise ConfigError(f"unknown report format: {self.output_format}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.pool not in ('process', 'thread'):
            raise ConfigError(f"unknown pool kind: {self.pool}")
        for lam, mu in self.sector_pairs:
            for q in (lam, mu):
                if self.momentum_denominator % Fraction(q).denominator:
                    raise ConfigError(f"momentum {q} not in (1/{self.momentum_denominator})Z")
        return self

    def with_overrides(self, **changes) -> 'RunConfig':
        return replace(self, **{k: v for k, v in changes.items() if v is not None}).validate()
