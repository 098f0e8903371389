"""
VTensor v1.0 - Report emitters
Canonical JSON and plain-text renderings of a run, plus the exit-status policy.
"""

import json
import logging
from collections import Counter
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from vtensor.config import RunConfig
from vtensor.core.outcome import Verdict
from vtensor.core.scalars import fmt_rational
from vtensor.errors import ReportError
from vtensor.suites.base import VerificationReport

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 2


def json_default(obj: Any) -> Any:
    """json.dumps hook for the exact types that end up in report details."""
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, Enum):
        return obj.value
    if hasattr(obj, 'to_json'):
        return obj.to_json()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj, key=repr)
    raise TypeError(f"{type(obj).__name__} is not report-serializable")


def canonical_order(reports: Sequence[VerificationReport]) -> List[VerificationReport]:
    """Reports grouped by suite name; cases keep the order their suite built them in."""
    return sorted(reports, key=lambda r: r.suite)


def exit_status(reports: Sequence[VerificationReport]) -> int:
    """1 iff some report is FAIL or ILL-DEFINED. WINDOW-LIMITED only warns."""
    return 1 if any(r.failed for r in reports) else 0


def summarize(reports: Sequence[VerificationReport]) -> Dict[str, Any]:
    counts = Counter(r.verdict.value for r in reports)
    return {
        'total': len(reports),
        'by_verdict': {v.value: counts.get(v.value, 0) for v in Verdict},
        'exit_status': exit_status(reports),
        'window_limited_warning': counts.get(Verdict.WINDOW_LIMITED.value, 0) > 0,
    }


def config_header(config: RunConfig) -> Dict[str, Any]:
    return {
        'momentum_denominator': config.momentum_denominator,
        'denominator': config.denominator,
        'cyclotomic_order': config.order,
        'grade': config.grade,
        'branch_p': list(config.branch_p),
        'branch_r': list(config.branch_r),
        'seed': config.seed,
        'suites': list(config.suites),
        'sectors': [[fmt_rational(lam), fmt_rational(mu)] for lam, mu in config.sector_pairs],
        'random_functionals': config.random_functionals,
    }


def render_json(reports: Sequence[VerificationReport], config: RunConfig) -> str:
    """Byte-stable JSON: sorted keys, canonical report order, no wall time by default."""
    payload = {
        'schema': SCHEMA_VERSION,
        'config': config_header(config),
        'summary': summarize(reports),
        'reports': [r.to_dict(include_timings=config.include_timings)
                    for r in canonical_order(reports)],
    }
    return json.dumps(payload, sort_keys=True, indent=2, default=json_default) + '\n'


def render_text(reports: Sequence[VerificationReport], config: RunConfig) -> str:
    summary = summarize(reports)
    lines = [
        f"VTensor run  d={config.momentum_denominator} N={config.denominator} "
        f"M={config.order} G={config.grade} seed={config.seed}",
        '',
    ]
    suite: Optional[str] = None
    for r in canonical_order(reports):
        if r.suite != suite:
            suite = r.suite
            label = r.anchor.get('label')
            lines.append(f"[{suite}]  {label}" if label else f"[{suite}]")
        lines.append(f"  {r.verdict.value:<14} {r.case}  ({r.duration_ms}ms, {r.compared} compared)")
        if r.witness:
            lines.append(f"      witness: {json.dumps(r.witness, sort_keys=True, default=json_default)}")
        elif r.verdict in (Verdict.WINDOW_LIMITED, Verdict.ILL_DEFINED) and 'error' in r.details:
            lines.append(f"      {r.details['error']}")
    counts = ', '.join(f"{k}={v}" for k, v in summary['by_verdict'].items())
    lines += ['', f"{summary['total']} cases: {counts}"]
    if summary['window_limited_warning']:
        lines.append('warning: some checks were limited by the truncation window')
    return '\n'.join(lines) + '\n'


def emit_report(reports: Sequence[VerificationReport], config: RunConfig,
                fmt: Optional[str] = None, path: Optional[str] = None) -> str:
    """Render the run and write it to `path` ('-' for none). Returns the rendered text."""
    fmt = fmt or config.output_format
    if fmt == 'json':
        text = render_json(reports, config)
    elif fmt == 'text':
        text = render_text(reports, config)
    else:
        raise ReportError(f"unknown report format: {fmt}")

    path = config.output_path if path is None else path
    if path and path != '-':
        target = Path(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding='utf-8')
        except OSError as e:
            raise ReportError(f"could not write report to {target}: {e}") from e
        logger.info("Report written to %s (%d cases)", target, len(reports))
    return text
