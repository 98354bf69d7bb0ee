import argparse
import logging
import sys
import time
from typing import List, Optional

from pydantic import ValidationError

from mopdom.cli.commands import (
    EXIT_INVALID, CliError, cmd_bound, cmd_enumerate, cmd_exact, cmd_random,
    cmd_search_tight, cmd_stats, cmd_validate,
)
from mopdom.config import load_settings

logger = logging.getLogger(__name__)


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mopdom",
        description="Disjunctive domination on maximal outerplanar graphs",
    )
    parser.add_argument('--jobs', type=_positive, default=None,
                        help="worker processes (default: MOPDOM_JOBS or 1)")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help="check every record of a MOP file")
    p.add_argument('input', help="MOP text file, or - for stdin")
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser('exact', help="exact disjunctive domination number per record (JSONL)")
    p.add_argument('input')
    p.add_argument('--cap', type=_positive, default=None, help="give up above this set size")
    p.add_argument('--force', action='store_true', help="run above the exact size limit")
    p.add_argument('--with-gamma', action='store_true', help="also compute the domination number")
    p.set_defaults(handler=cmd_exact)

    p = sub.add_parser('bound', help="construct a 2DD-set within floor(2(n+k)/9) per record (JSONL)")
    p.add_argument('input')
    p.add_argument('--trace-dir', default=None, help="write one JSONL trace per record here")
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser('enumerate', help="every triangulation of the n-gon in MOP format")
    p.add_argument('n', type=int)
    p.add_argument('--canonical', action='store_true', help="one mop per rotation/reflection class")
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser('random', help="uniform random mops in MOP format")
    p.add_argument('n', type=int)
    p.add_argument('--count', type=_positive, default=1)
    p.add_argument('--seed', type=int, default=None)
    p.set_defaults(handler=cmd_random)

    p = sub.add_parser('search-tight', help="mops whose 2DD number meets the bound")
    p.add_argument('--min-n', type=int, required=True)
    p.add_argument('--max-n', type=int, required=True)
    p.add_argument('--random', action='store_true', help="sample instead of enumerating")
    p.add_argument('--samples', type=_positive, default=100)
    p.add_argument('--seed', type=int, default=None)
    p.set_defaults(handler=cmd_search_tight)

    p = sub.add_parser('stats', help="per-n aggregates as CSV")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--n', type=int, default=None, help="enumerate all mops on n vertices")
    source.add_argument('--input', default=None, help="MOP file or exact JSONL output")
    p.set_defaults(handler=cmd_stats)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        settings = load_settings()
    except ValidationError as e:
        logging.basicConfig(level=logging.INFO)
        logger.error(f"Invalid MOPDOM_* environment: {e}")
        return EXIT_INVALID

    logging.basicConfig(
        level=settings.logging_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    args = build_parser().parse_args(argv)
    if args.jobs is not None:
        settings = settings.model_copy(update={'jobs': args.jobs})

    start_time = time.time()
    logger.info(f"Running {args.command} with {settings.jobs} job(s)")
    try:
        code = args.handler(args, settings)
    except CliError as e:
        logger.error(f"{args.command} failed: {e.message}")
        return e.exit_code

    logger.info(f"{args.command} finished in {round((time.time() - start_time) * 1000, 2)}ms")
    return code


if __name__ == '__main__':
    sys.exit(main())
