"""Command-line verbs. Every handler returns the process exit code:
0 for a solution or report, 1 for a declared FAILURE, 2 for bad input."""

import argparse
import sys
from typing import Callable, Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from app.config import settings
from app.commands.matrix_file import format_matrix, read_matrix
from app.core.decompose import decompose
from app.core.instrumentation import OpCounter
from app.core.oracle import generate, oracle_preimages
from app.core.reconstruction import minimal_valuations_per_subgrid, reconstruct, verify
from app.core.scan import chi11_of_scan, rectangular_scan
from app.errors import ConsistencyError, SizeGuardError, TomographyError
from app.schemas import GridFamily, InstanceSpec, WindowSpec

EXIT_OK, EXIT_FAILURE, EXIT_INPUT = 0, 1, 2


def _emit(text: str) -> None:
    sys.stdout.write(text)


def _window(args: argparse.Namespace) -> WindowSpec:
    return WindowSpec(p=args.p, q=args.q)


def cmd_scan(args: argparse.Namespace) -> int:
    grid = read_matrix(args.input, binary=True)
    _emit(format_matrix(rectangular_scan(grid, _window(args))))
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace) -> int:
    scan = read_matrix(args.input)
    window = _window(args)
    counter = OpCounter()
    seed = args.seed if args.seed_order else None
    outcome = reconstruct(scan, window, counter=counter, candidate_seed=seed, exact_completion=not args.merge_only)

    if outcome.succeeded and verify(scan, outcome.solution, window):
        _emit(format_matrix(outcome.solution))
        code = EXIT_OK
    else:
        if outcome.succeeded:
            logger.error("reconstruct returned a grid that does not re-scan to the input")
        _emit("FAILURE\n")
        code = EXIT_FAILURE

    if args.all_checks:
        _emit(_oracle_check_line(scan, window, outcome.succeeded, args.max_cells))
    if args.stats:
        for key, value in outcome.stats.model_dump().items():
            _emit(f"# {key}: {value}\n")
        for key, value in counter.as_dict().items():
            _emit(f"# ops.{key}: {value}\n")
    return code


def _oracle_check_line(scan, window: WindowSpec, succeeded: bool, max_cells: Optional[int]) -> str:
    try:
        preimages = oracle_preimages(scan, window, cap=1, max_cells=max_cells)
    except SizeGuardError:
        return "# oracle check: skipped (instance above the size guard)\n"
    if bool(preimages) == succeeded:
        return "# oracle check: agrees\n"
    logger.error("oracle disagrees with reconstruct")
    return "# oracle check: DISAGREES\n"


def cmd_check(args: argparse.Namespace) -> int:
    scan = read_matrix(args.input)
    window = _window(args)
    target = chi11_of_scan(scan)
    _emit(f"# preimage size: {scan.rows + window.p - 1} {scan.cols + window.q - 1}\n")
    _emit("# chi_1_1\n")
    _emit(format_matrix(target))
    if target.is_empty:
        _emit("smooth (vacuous)\n")
    elif target.is_zero():
        _emit("smooth\n")
    else:
        _emit("non-smooth\n")
        return EXIT_OK

    decompositions = decompose(scan)
    _emit(f"# decompositions: {len(decompositions)}\n")
    for dec in decompositions:
        _emit(f"# t={dec.t} rows\n")
        _emit(format_matrix(dec.row_part))
        _emit(f"# t={dec.t} columns\n")
        _emit(format_matrix(dec.col_part))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    spec = InstanceSpec(
        m=args.rows,
        n=args.cols,
        window=_window(args),
        density=args.density,
        seed=args.seed,
        family=GridFamily(args.family),
    )
    _emit(format_matrix(generate(spec)))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    scan = read_matrix(args.input)
    preimages = oracle_preimages(scan, _window(args), cap=args.cap, max_cells=args.max_cells)
    _emit(f"# preimages: {len(preimages)}\n")
    _emit("\n".join(format_matrix(grid) for grid in preimages))
    return EXIT_OK if preimages else EXIT_FAILURE


def cmd_valuations(args: argparse.Namespace) -> int:
    scan = read_matrix(args.input)
    for ref, valuations in minimal_valuations_per_subgrid(scan, _window(args)):
        _emit(f"# subgrid {ref.a} {ref.b}: {len(valuations)}\n")
        for valuation in valuations:
            _emit(format_matrix(valuation.grid))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="main.py", description=f"{settings.APP_NAME}: binary grids from rectangular scans")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, handler: Callable[[argparse.Namespace], int], help_text: str, with_input: bool = True):
        sub = verbs.add_parser(name, help=help_text)
        if with_input:
            sub.add_argument("input", help="matrix file")
        sub.add_argument("-p", type=int, required=True, help="window rows")
        sub.add_argument("-q", type=int, required=True, help="window columns")
        sub.set_defaults(handler=handler)
        return sub

    verb("scan", cmd_scan, "print the rectangular scan of a binary matrix")

    rec = verb("reconstruct", cmd_reconstruct, "find a binary matrix with the given scan")
    rec.add_argument("--stats", action="store_true", help="append search counters as comments")
    rec.add_argument("--all-checks", action="store_true", help="cross-check against the exhaustive oracle when small enough")
    rec.add_argument("--seed-order", action="store_true", help="try valuation candidates in a --seed shuffled order")
    rec.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    rec.add_argument("--max-cells", type=int, default=None, help="oracle guard override for --all-checks")
    rec.add_argument("--merge-only", action="store_true", help="answer candidates by symbolic merges alone, without the exact completion")

    verb("check", cmd_check, "print chi_1_1 of a scan, its smoothness and its decompositions")

    gen = verb("gen", cmd_gen, "generate a random binary matrix", with_input=False)
    gen.add_argument("--rows", type=int, required=True)
    gen.add_argument("--cols", type=int, required=True)
    gen.add_argument("--density", type=float, default=0.5)
    gen.add_argument("--family", choices=[f.value for f in GridFamily], default=GridFamily.GENERAL.value)
    gen.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)

    orc = verb("oracle", cmd_oracle, "list every preimage of a small scan by exhaustive search")
    orc.add_argument("--cap", type=int, default=None)
    orc.add_argument("--max-cells", type=int, default=None)

    verb("valuations", cmd_valuations, "list the minimal valuations of every residue class")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.handler(args)
    except ConsistencyError:
        raise
    except (TomographyError, ValidationError) as e:
        logger.warning(f"{args.verb}: {e}")
        sys.stderr.write(f"error: {str(e).splitlines()[0]}\n")
        return EXIT_INPUT
