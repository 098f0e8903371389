"""
VTensor v1.0 - Verification suites
Importing a suite module registers its suites with the shared registry.
"""

import importlib
import logging

from vtensor.suites.base import (
    BaseSuite, SuiteCase, SuiteContext, SuiteRegistry, VerificationReport, Verdict, registry,
)

logger = logging.getLogger(__name__)

SUITE_MODULES = (
    'vtensor.suites.delta_calculus',
    'vtensor.suites.voa_axioms',
    'vtensor.suites.conjugation',
    'vtensor.suites.intertwining',
    'vtensor.suites.dual',
    'vtensor.suites.compatibility',
)


def load_suites() -> SuiteRegistry:
    """Import every suite module; a module that fails to import is logged and skipped."""
    for module_path in SUITE_MODULES:
        try:
            importlib.import_module(module_path)
        except ImportError as exc:
            logger.warning("Could not load suites from %s: %s", module_path, exc)
    return registry


__all__ = [
    'BaseSuite', 'SuiteCase', 'SuiteContext', 'SuiteRegistry', 'VerificationReport', 'Verdict',
    'registry', 'load_suites', 'SUITE_MODULES',
]
