"""Command-line front end.

    python -m pnorm_voting tally --ballots pairs.txt --k 2 --method pnorm --p 2
    python -m pnorm_voting sweep --ballots pairs.txt --k 2 --ps 1,2,3,4,10,100
    python -m pnorm_voting compare --ballots pairs.txt --k 2 \
        --methods minisum,pnorm@2,maxcover,greedy

Results go to stdout, warnings and errors to stderr. Exit codes: 0 on success
(ties included), 2 on bad input or usage, 3 when exact enumeration is too
large (use `--method greedy` or raise PNORM_VOTING_MAX_COMMITTEES).
"""
import argparse
import logging
import sys
from typing import List, Optional

from pnorm_voting import ballot_io, solvers
from pnorm_voting.config import MAX_COMMITTEES_ENV, Settings, load_settings
from pnorm_voting.core import BallotProfile, ElectionError, TooLarge

logger = logging.getLogger("pnorm_voting")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TOO_LARGE = 3

SEED_ORDER_NOTE = (
    "committees are listed and tie-broken in canonical order: "
    "lexicographic on roster positions ({order})"
)


def configure_logging(verbosity: int = 0) -> None:
    """Sends log records to stderr; -v shows INFO, -vv shows DEBUG."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s: %(message)s",
        force=True,
    )


def _budget(raw: str) -> Optional[int]:
    if raw.lower() == "none":
        return None
    try:
        return int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'none', got {raw!r}")


def _comma_list(raw: str) -> List[str]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pnorm_voting",
        description="Elect committees by minimizing the p-norm of ballot distances.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ballots", required=True, help="Ballot file.")
    common.add_argument("--k", type=int, required=True, help="Committee size.")
    common.add_argument(
        "--mode",
        choices=["binary", "ternary"],
        help="Ballot mode. Defaults to ternary if any ballot rejects a "
        "candidate, binary otherwise.",
    )
    common.add_argument(
        "--budget",
        type=_budget,
        default=None,
        help="Number of opinions every ballot must express, or 'none'.",
    )
    common.add_argument(
        "--input-format",
        choices=ballot_io.BALLOT_FORMATS,
        help="Ballot file format. Defaults to a guess from the extension.",
    )
    common.add_argument(
        "--format", choices=ballot_io.RESULT_FORMATS, default="table",
        help="Output format.",
    )
    common.add_argument("-v", "--verbose", action="count", default=0)

    tally = commands.add_parser(
        "tally", parents=[common], help="Run one rule.",
        epilog=f"The enumeration bound can be raised with {MAX_COMMITTEES_ENV}.",
    )
    tally.add_argument("--method", choices=solvers.METHODS, required=True)
    tally.add_argument("--p", type=float, help="Norm parameter; required for pnorm.")
    tally.add_argument(
        "--scores", action="store_true", help="Also list the score of every committee."
    )
    tally.add_argument(
        "--seed-order",
        action="store_true",
        help="Add a note on the canonical order used to list and break ties.",
    )
    tally.set_defaults(func=cmd_tally)

    sweep = commands.add_parser(
        "sweep", parents=[common], help="Score every committee for several p."
    )
    sweep.add_argument("--ps", type=_comma_list, required=True, help="e.g. 1,2,3,4,10,100")
    sweep.add_argument(
        "--power-sum",
        action="store_true",
        help="Report the norm raised to the power p (useful for p < 1).",
    )
    sweep.set_defaults(func=cmd_sweep)

    compare = commands.add_parser(
        "compare", parents=[common], help="Run several rules side by side."
    )
    compare.add_argument(
        "--methods",
        type=_comma_list,
        required=True,
        help="e.g. minisum,pnorm@2,maxcover,greedy,p0",
    )
    compare.set_defaults(func=cmd_compare)
    return parser


def _load(args: argparse.Namespace) -> BallotProfile:
    fmt = args.input_format or ballot_io.detect_format(args.ballots)
    return ballot_io.parse_ballots(args.ballots, fmt, args.mode, args.budget)


def _emit(text: str) -> None:
    sys.stdout.write(text)


def cmd_tally(args: argparse.Namespace, settings: Settings) -> int:
    profile = _load(args)
    result = solvers.elect(
        profile, args.k, args.method, args.p, scores=args.scores, settings=settings
    )
    if args.seed_order:
        order = " < ".join(profile.roster.names)
        result.notes.append(SEED_ORDER_NOTE.format(order=order))
    for warning in result.warnings:
        logger.warning(warning)
    _emit(ballot_io.write_result(result, args.format))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    profile = _load(args)
    try:
        ps = [float(p) for p in args.ps]
    except ValueError:
        raise ElectionError(f"--ps must hold numbers, got {','.join(args.ps)!r}.")
    matrix = solvers.sweep(profile, args.k, ps, args.power_sum, settings=settings)
    for warning in matrix.warnings:
        logger.warning(warning)
    _emit(ballot_io.write_result(matrix, args.format))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace, settings: Settings) -> int:
    profile = _load(args)
    comparison = solvers.compare_methods(profile, args.k, args.methods, settings)
    for result in comparison.results:
        for warning in result.warnings:
            logger.warning("%s: %s", result.method, warning)
    _emit(ballot_io.write_result(comparison, args.format))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point.

    Args:
        argv (optional): Arguments without the program name. Defaults to
            `sys.argv[1:]`.

    Returns:
        Process exit code.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.func(args, load_settings())
    except TooLarge as e:
        logger.error("%s", e)
        return EXIT_TOO_LARGE
    except ElectionError as e:
        logger.error("%s", e)
        return EXIT_INPUT
    except OSError as e:
        logger.error("cannot read ballots: %s", e)
        return EXIT_INPUT
