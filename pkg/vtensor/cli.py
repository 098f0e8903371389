"""
VTensor v1.0 - Command line
Parse flags into a RunConfig, run the selected suites and emit the report.
"""

import argparse
import logging
import sys
from typing import List, Optional, Tuple

from vtensor import __version__
from vtensor.app import _setup_logging, run_suites, selected_suites
from vtensor.config import RunConfig
from vtensor.errors import VTensorError
from vtensor.report import emit_report, exit_status
from vtensor.suites import load_suites

logger = logging.getLogger(__name__)

EXIT_USAGE = 2


def _branch_list(raw: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(part) for part in raw.split(',') if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")
    if not values:
        raise argparse.ArgumentTypeError("at least one branch is required")
    return values


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog='vtensor',
        description='Exact verification of the P(z)/Q(z) tensor-product calculus '
                    'on the rank-1 Heisenberg vertex operator algebra.',
    )
    parser.add_argument('--suite', dest='suites', action='append', metavar='NAME',
                        help='suite to run (repeatable; default: all)')
    parser.add_argument('--momentum-denominator', type=int, metavar='D',
                        help='momenta lie in (1/D)Z')
    parser.add_argument('--grade', type=int, metavar='G', help='grade window')
    parser.add_argument('--branch-p', type=_branch_list, metavar='P[,P...]',
                        help='branches of log z, e.g. 0,1')
    parser.add_argument('--branch-r', type=_branch_list, metavar='R[,R...]',
                        help='braiding branches, e.g. 0,-1')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--format', dest='output_format', choices=('json', 'text'))
    parser.add_argument('--out', dest='output_path', metavar='PATH',
                        help="report file; '-' writes to stdout")
    parser.add_argument('--cyclotomic-order', type=int, metavar='M',
                        help='order of the root of unity; a multiple of the derived minimum')
    parser.add_argument('--workers', type=int)
    parser.add_argument('--pool', choices=('process', 'thread'),
                        help='run suites in worker processes or threads')
    parser.add_argument('--log-level', default=None)
    parser.add_argument('--include-timings', action='store_true', default=None,
                        help='keep wall time in JSON reports')
    parser.add_argument('--inject-corruption', action='store_true', default=None,
                        help='add a deliberately corrupted map-roundtrip case')
    parser.add_argument('--list', action='store_true', help='list suites and exit')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace, base: Optional[RunConfig] = None) -> RunConfig:
    """Overlay parsed flags on the environment-driven defaults."""
    base = base or RunConfig()
    return base.with_overrides(
        suites=tuple(args.suites) if args.suites else None,
        momentum_denominator=args.momentum_denominator,
        grade=args.grade,
        branch_p=args.branch_p,
        branch_r=args.branch_r,
        seed=args.seed,
        output_format=args.output_format,
        output_path=args.output_path,
        cyclotomic_order=args.cyclotomic_order,
        workers=args.workers,
        pool=args.pool,
        include_timings=args.include_timings,
        inject_corruption=args.inject_corruption,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = _parse_args(argv)
    _setup_logging(args.log_level)

    if args.list:
        for info in load_suites().list_suites():
            aliases = f" (also: {', '.join(info['aliases'])})" if info['aliases'] else ''
            print(f"{info['name']:<22} {info['description']}{aliases}")
        return 0

    try:
        config = build_config(args)
        names = selected_suites(config)
    except VTensorError as e:
        logger.error("%s", e)
        return EXIT_USAGE

    reports = run_suites(config, names)
    try:
        text = emit_report(reports, config)
    except VTensorError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    if config.output_path == '-':
        sys.stdout.write(text)
    status = exit_status(reports)
    logger.info("Run finished: %d case(s), exit status %d", len(reports), status)
    return status


if __name__ == '__main__':
    raise SystemExit(main())
