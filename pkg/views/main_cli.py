"""
Command-line surface: argument parsing, dispatch and the exit-code contract
"""
import argparse
import logging
import sys

from models.errors import NBodyError, ValidationError
from utils.config import parse_config
from views.equilibria_view import run_find_eq, run_verify
from views.probe_view import run_probe
from views.simulation_view import run_simulate

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 64


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}")
    if not 0 <= value < MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='curved-nbody',
        description="Relative equilibria of the n-body problem on spheres and hyperboloids")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="log progress to stderr (-vv for debug)")
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', help="integrate a configuration, write a CSV trajectory")
    simulate.add_argument('--config', required=True)
    simulate.add_argument('--out', required=True)

    find_eq = commands.add_parser('find-eq', help="solve or sweep for equilibria, write a JSONL catalog")
    find_eq.add_argument('--config', required=True)
    find_eq.add_argument('--out', required=True)
    find_eq.add_argument('--seed', type=_seed, default=None)

    verify = commands.add_parser('verify', help="re-check one catalog record")
    verify.add_argument('--eq', required=True, help="JSONL catalog")
    verify.add_argument('--index', type=int, default=0)

    probe = commands.add_parser('probe', help="run one of the existence probes")
    probe.add_argument('--config', required=True)
    probe.add_argument('--out', required=True)
    probe.add_argument('--seed', type=_seed, default=None)
    return parser


def configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def dispatch(args) -> int:
    if args.command == 'verify':
        return run_verify(args.eq, args.index)
    config = parse_config(args.config)
    if args.command == 'simulate':
        return run_simulate(config, args.out)
    if args.command == 'find-eq':
        return run_find_eq(config, args.out, seed=args.seed)
    if args.command == 'probe':
        return run_probe(config, args.out, seed=args.seed)
    raise ValidationError(f"unknown command {args.command}")


def main(argv=None) -> int:
    """
    Run one command

    Returns:
        int: 0 on success, 1 when verify finds a failed check, 2 for invalid
        input, 3 for singular or non-finite states, 4 for non-convergence,
        5 for file errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, matching the validation code
        return exc.code if isinstance(exc.code, int) else 2
    configure_logging(args.verbose)
    try:
        return dispatch(args)
    except NBodyError as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
