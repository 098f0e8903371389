"""
VTensor v1.0 - Run orchestration
Logging setup and the suite work pool.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import replace
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from vtensor.config import Config, RunConfig
from vtensor.core.fock import mode_cache_info
from vtensor.report import json_default
from vtensor.suites import load_suites
from vtensor.suites.base import SuiteContext, VerificationReport

logger = logging.getLogger(__name__)

_logging_configured = False


def _setup_logging(log_level: Optional[str] = None) -> None:
    """Configure application-wide logging with rotating file handler."""
    global _logging_configured
    level = getattr(logging, (log_level or Config.LOG_LEVEL).upper(), logging.INFO)
    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    if _logging_configured:
        for handler in root_logger.handlers:
            handler.setLevel(level)
        return

    log_dir = Path(Config.LOG_DIR)
    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            str(log_dir / 'vtensor.log'),
            maxBytes=Config.LOG_MAX_BYTES,
            backupCount=Config.LOG_BACKUP_COUNT,
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(Config.LOG_FORMAT))
        root_logger.addHandler(file_handler)
    except OSError as e:
        # read-only checkouts still get console logging
        logging.getLogger(__name__).warning("File logging disabled: %s", e)

    # Console handler; stderr keeps stdout free for the report
    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(Config.LOG_FORMAT))
    root_logger.addHandler(console_handler)
    _logging_configured = True


def selected_suites(config: RunConfig) -> List[str]:
    """Suite names a run will execute: the explicit selection, or every registered suite."""
    registry = load_suites()
    if config.suites:
        return list(dict.fromkeys(registry.canonical(name) for name in config.suites))
    return registry.names()


def _plain(value: Any) -> Any:
    return json.loads(json.dumps(value, default=json_default))


def portable(report: VerificationReport) -> VerificationReport:
    """The report with exact values flattened the way the JSON report writes them."""
    return replace(report, window=_plain(report.window), witness=_plain(report.witness),
                   details=_plain(report.details))


def _run_in_process(name: str, config: RunConfig, log_level: str) -> List[VerificationReport]:
    """Process-pool entry point; suites register again in the child."""
    _setup_logging(log_level)
    run = SuiteContext.from_config(config)
    return [portable(r) for r in load_suites().run_suite(name, run)]


def run_suites(config: RunConfig, names: Optional[Sequence[str]] = None) -> List[VerificationReport]:
    """Run suites concurrently; reports come back in selection order.

    An empty selection (names=[]) gives an empty report list.
    """
    registry = load_suites()
    run = SuiteContext.from_config(config)
    names = selected_suites(run.config) if names is None else [registry.canonical(n) for n in names]
    if not names:
        logger.info("No suites selected")
        return []

    use_processes = config.pool == 'process' and config.workers > 1 and len(names) > 1
    logger.info("Running %d suite(s) with %d %s worker(s): %s", len(names), config.workers,
                'process' if use_processes else 'thread', ', '.join(names))
    results: Dict[str, List[VerificationReport]] = {}
    if use_processes:
        level = logging.getLevelName(logging.getLogger().getEffectiveLevel())
        with ProcessPoolExecutor(max_workers=min(config.workers, len(names))) as pool:
            futures = {name: pool.submit(_run_in_process, name, run.config, level) for name in names}
            for name, future in futures.items():
                results[name] = future.result()
    else:
        with ThreadPoolExecutor(max_workers=config.workers, thread_name_prefix='vtensor-suite') as pool:
            futures = {name: pool.submit(registry.run_suite, name, run) for name in names}
            for name, future in futures.items():
                results[name] = future.result()
        logger.debug("Mode cache: %s", mode_cache_info())

    reports: List[VerificationReport] = []
    for name in names:
        reports.extend(results[name])
    return reports
