"""
Command-line interface

    eulerboundary triangle --rows 6
    eulerboundary boundary --theta lower:2 --rows 6 --check all
    eulerboundary decompose --input column.txt --mode exact
    eulerboundary sample bucket --kappa 1 --n 3 --trials 1000000 --seed 7
    eulerboundary chain run --start 2,0 --seed 1

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on usage or input errors.
"""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from eulerboundary import __version__
from eulerboundary.arrangements.bucket import INCREASING, ORDERS
from eulerboundary.arrangements.descents import parse_permutation
from eulerboundary.boundary.extreme import check_solution
from eulerboundary.boundary.martin import KappaSchedule
from eulerboundary.chain.backward import left_edge_probabilities
from eulerboundary.chain.bijection import LabeledPath
from eulerboundary.core.arrays import LeftColumn, as_fraction
from eulerboundary.core.config import Settings
from eulerboundary.core.errors import EulerBoundaryError, InputFormatError, ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.rng import RNG_ALGORITHM
from eulerboundary.core.triangle import TriangleIndex
from eulerboundary.core.workbench import EXPLICIT, RECURSION, SOLUTION_CHECKS, Workbench
from eulerboundary.reconstruct.decompose import EXACT, LIMIT
from eulerboundary.utils.serialization import OutputRecord, format_array_file, read_array_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2

GLOBAL_KEYS = ("format", "out", "record", "strict", "verbose", "handler", "randomized", "command", "group")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text, name="argument")
    except InputFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _theta(text: str) -> BoundaryParam:
    try:
        return BoundaryParam.parse(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _vertex(text: str) -> TriangleIndex:
    try:
        return TriangleIndex.parse(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _schedule(text: str) -> KappaSchedule:
    try:
        return KappaSchedule.parse(text)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _support(text: str) -> List[BoundaryParam]:
    return [_theta(part) for part in text.split(",") if part.strip()]


def _weights(text: str) -> Dict[BoundaryParam, Fraction]:
    """Parse "upper:1=3/4,half=1/4" """
    weights = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, value = part.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected theta=weight, got {part!r}")
        weights[_theta(name)] = _rational(value)
    if not weights:
        raise argparse.ArgumentTypeError("no weights given")
    return weights


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonnegative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def _array_table(array) -> List[Dict]:
    return [{"n": n, "k": k, "value": v} for n, row in array.rows() for k, v in enumerate(row)]


# command handlers: (bench, args) -> OutputRecord pieces


def cmd_triangle(bench: Workbench, args) -> dict:
    rows = bench.triangle_rows(args.rows, args.formula)
    payload = {"formula": args.formula, "rows": [list(r) for r in rows]}
    ok = True
    if args.verify:
        checks = bench.verify_triangle(args.rows, args.kappa)
        payload["checks"] = checks
        ok = all(checks.values())
    table = [{"n": n, "values": " ".join(map(str, r))} for n, r in enumerate(rows, start=1)]
    return {"payload": payload, "table": table, "ok": ok}


def cmd_boundary(bench: Workbench, args) -> dict:
    theta = args.theta
    array = bench.extreme(theta, args.rows)
    payload = {"theta": theta, "theta_value": theta.theta(), "rows": array}
    if args.tilde:
        payload["tilde"] = bench.tilde(array)
    ok = True
    if args.check:
        names = SOLUTION_CHECKS if "all" in args.check else args.check
        checks = bench.check_extreme(theta, args.rows, names)
        payload["checks"] = checks
        ok = all(checks.values())
    return {"payload": payload, "table": _array_table(array), "ok": ok}


def cmd_truncated(bench: Workbench, args) -> dict:
    array = bench.truncated(args.N, args.kappa, args.first_row)
    payload = {"N": args.N, "kappa": args.kappa, "rows": array}
    ok = True
    if args.first_row == 1:
        check = check_solution(array, bench.table)
        payload["check"] = check
        ok = check.ok
    return {"payload": payload, "table": _array_table(array), "ok": ok}


def cmd_martin(bench: Workbench, args) -> dict:
    report = bench.martin(args.schedule, args.rows, args.tolerance, args.cap)
    table = [{"N": n, "deviation": d} for n, d in report.deviations]
    return {"payload": report, "table": table, "ok": report.converged}


def cmd_concentration(bench: Workbench, args) -> dict:
    report = bench.concentration(args.kappa, args.nmax, args.epsilon)
    table = [{"N": n, "value": v} for n, v in report.values]
    return {"payload": report, "table": table, "ok": report.ok}


def cmd_decompose(bench: Workbench, args) -> dict:
    data = read_array_file(args.input)
    array, verdict = bench.reconstruct(data)
    payload = {
        "input": "left-column" if isinstance(data, LeftColumn) else "array",
        "rows": array.max_row,
        "nabla": array,
        "verdict": verdict,
        "weights": None,
    }
    ok = verdict.member
    if verdict.member:
        weights = bench.decompose(
            array, args.mode, args.support, args.cut, args.row_budget, args.threshold
        )
        payload["weights"] = weights
        ok = weights.ok
    table = None
    if payload["weights"] is not None:
        table = [{"theta": t, "weight": w, "decimal": float(w)} for t, w in payload["weights"].items()]
    # verdicts and reports are informative unless --strict asks for a failing exit
    return {"payload": payload, "table": table, "ok": ok or not args.strict}


def cmd_synthesize(bench: Workbench, args) -> str:
    array = bench.synthesize(args.weights, args.rows)
    return format_array_file(array.left_column() if args.left_column else array)


def cmd_sample_bucket(bench: Workbench, args) -> dict:
    theta = BoundaryParam.upper(args.kappa) if args.order == INCREASING else BoundaryParam.lower(args.kappa)
    report = bench.empirical(theta, args.n, args.trials, args.seed, args.replicas)
    table = [
        {"perm": "".join(map(str, r.perm)), "descents": r.descent_count, "count": r.count,
         "frequency": r.count / report.trials, "exact": r.exact, "z": r.z}
        for r in report.rows
    ]
    return {"payload": report, "table": table, "ok": report.ok}


def cmd_sample_exchangeable(bench: Workbench, args) -> dict:
    report = bench.empirical(BoundaryParam.half(), args.n, args.trials, args.seed, args.replicas)
    table = [
        {"perm": "".join(map(str, r.perm)), "descents": r.descent_count, "count": r.count,
         "frequency": r.count / report.trials, "exact": r.exact, "z": r.z}
        for r in report.rows
    ]
    return {"payload": report, "table": table, "ok": report.ok}


def cmd_sample_moments(bench: Workbench, args) -> dict:
    report = bench.moments(args.n, args.trials, args.seed, args.replicas)
    return {"payload": report, "ok": report.ok}


def cmd_sample_lln(bench: Workbench, args) -> dict:
    report = bench.law_of_large_numbers(args.kappa, args.nmax, args.trials, args.seed, args.replicas)
    table = [{"n": m, "fraction": h / report.trials, "exact": e} for m, h, e in report.trajectory]
    return {"payload": report, "table": table, "ok": report.within_band}


def cmd_sample_uniform_sum(bench: Workbench, args) -> dict:
    report = bench.uniform_sum(args.n, args.trials, args.seed, args.replicas)
    table = [
        {"k": int(b.label), "count": b.count, "frequency": b.frequency(report.trials), "exact": b.exact, "z": b.z}
        for b in report.bins
    ]
    return {"payload": report, "table": table, "ok": report.within_band}


def cmd_chain_run(bench: Workbench, args) -> dict:
    path = bench.run_chain(args.start, args.seed)
    return {"payload": {"start": args.start, "path": path}, "table": [{"n": v.n, "k": v.k} for v in path]}


def cmd_chain_propagate(bench: Workbench, args) -> dict:
    marginals = bench.propagate(args.start, args.down_to)
    payload = {"start": args.start, "rows": {str(n): list(row) for n, row in marginals.items()}}
    table = [{"n": n, "k": k, "probability": p} for n, row in marginals.items() for k, p in enumerate(row)]
    return {"payload": payload, "table": table}


def cmd_chain_couple(bench: Workbench, args) -> dict:
    summary = bench.couple(args.N, args.kappa_a, args.kappa_b, args.runs, args.seed)
    return {"payload": summary, "ok": summary.ok}


def cmd_chain_path(bench: Workbench, args) -> dict:
    if (args.perm is None) == (args.ks is None):
        raise ParameterError("give either --perm or --ks with --labels")
    if args.perm is not None:
        path = bench.path_of(args.perm)
        perm = args.perm
    else:
        path = LabeledPath.from_ks(args.ks, args.labels or [])
        perm = bench.perm_of(path)
    roundtrip = bench.perm_of(path) == tuple(perm) and bench.path_of(perm) == path
    payload = {
        "perm": "".join(map(str, perm)),
        "vertices": list(path.vertices),
        "labels": list(path.labels),
        "roundtrip": roundtrip,
    }
    return {"payload": payload, "ok": roundtrip}


def cmd_chain_monotonicity(bench: Workbench, args) -> dict:
    monotone = bench.monotonicity(args.N)
    columns = left_edge_probabilities(args.N, bench.table)
    payload = {"N": args.N, "monotone": monotone, "left_edge": {str(k): list(c) for k, c in columns.items()}}
    return {"payload": payload, "ok": monotone}


def _add_sampling(parser: argparse.ArgumentParser, trials: int) -> None:
    parser.add_argument("--trials", type=_positive, default=trials, help="number of Monte Carlo draws")
    parser.add_argument("--seed", type=int, default=None, help="seed of the random stream")
    parser.add_argument("--replicas", type=_positive, default=1, help="independent child streams")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerboundary",
        description="Exact and Monte Carlo tools for the boundary of the Eulerian triangle",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    parser.add_argument("--out", default=None, help="write output to this file (relative to $EULERBOUNDARY_OUTPUT_DIR)")
    parser.add_argument("--record", default=None, metavar="DB", help="archive the output record in this SQLite file")
    parser.add_argument("--strict", action="store_true", help="require --seed for random commands; fail on non-members")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    p = commands.add_parser("triangle", help="Eulerian numbers")
    p.add_argument("--rows", type=_positive, required=True)
    p.add_argument("--formula", choices=(RECURSION, EXPLICIT), default=RECURSION)
    p.add_argument("--verify", action="store_true", help="cross-check recursion, explicit formula, row sums, symmetry, Worpitzky")
    p.add_argument("--kappa", type=_nonnegative, default=10, help="largest kappa for the Worpitzky check")
    p.set_defaults(handler=cmd_triangle)

    p = commands.add_parser("boundary", help="extreme solutions W(theta)")
    p.add_argument("--theta", type=_theta, required=True, help="upper:K, half or lower:K")
    p.add_argument("--rows", type=_positive, required=True)
    p.add_argument("--check", nargs="+", choices=SOLUTION_CHECKS + ("all",), default=None)
    p.add_argument("--tilde", action="store_true", help="include the tilde transform")
    p.set_defaults(handler=cmd_boundary)

    p = commands.add_parser("truncated", help="truncated solution V^{N kappa}")
    p.add_argument("--N", type=_positive, required=True)
    p.add_argument("--kappa", type=_nonnegative, required=True)
    p.add_argument("--first-row", type=_positive, default=1)
    p.set_defaults(handler=cmd_truncated)

    p = commands.add_parser("martin", help="convergence of V^{N, kappa(N)} to its limit")
    p.add_argument("--schedule", type=_schedule, required=True, help="constant:K, mirrored:K or central")
    p.add_argument("--rows", type=_positive, default=4)
    p.add_argument("--tolerance", type=_rational, default=None)
    p.add_argument("--cap", type=_positive, default=None, help="largest N tried")
    p.set_defaults(handler=cmd_martin)

    p = commands.add_parser("concentration", help="<N,kappa>/(kappa+1)^N approaching 1")
    p.add_argument("--kappa", type=_nonnegative, required=True)
    p.add_argument("--nmax", type=_positive, required=True)
    p.add_argument("--epsilon", type=_rational, default=None)
    p.set_defaults(handler=cmd_concentration)

    p = commands.add_parser("decompose", help="membership and mixture weights of an array file")
    p.add_argument("--input", required=True, help="array file: 'rows=N' then one row per line")
    p.add_argument("--mode", choices=(EXACT, LIMIT), default=EXACT)
    p.add_argument("--support", type=_support, default=None, help="comma-separated parameters (exact mode)")
    p.add_argument("--cut", type=_nonnegative, default=None, help="largest kappa per wing")
    p.add_argument("--row-budget", type=_positive, default=None)
    p.add_argument("--threshold", type=_rational, default=None)
    p.set_defaults(handler=cmd_decompose)

    p = commands.add_parser("synthesize", help="write a mixture as an array file")
    p.add_argument("--weights", type=_weights, required=True, help="e.g. upper:1=3/4,half=1/4")
    p.add_argument("--rows", type=_positive, required=True)
    p.add_argument("--left-column", action="store_true", help="write only the left column")
    p.set_defaults(handler=cmd_synthesize)

    sample = commands.add_parser("sample", help="Monte Carlo witnesses").add_subparsers(dest="group", metavar="KIND")
    sample.required = True

    p = sample.add_parser("bucket", help="bucket-sort frequencies against W(theta)")
    p.add_argument("--kappa", type=_nonnegative, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--order", choices=ORDERS, default=INCREASING)
    _add_sampling(p, 100_000)
    p.set_defaults(handler=cmd_sample_bucket, randomized=True)

    p = sample.add_parser("exchangeable", help="exchangeable-arrangement frequencies against 1/n!")
    p.add_argument("--n", type=_positive, required=True)
    _add_sampling(p, 100_000)
    p.set_defaults(handler=cmd_sample_exchangeable, randomized=True)

    p = sample.add_parser("moments", help="mean and variance of the descent count")
    p.add_argument("--n", type=_positive, required=True)
    _add_sampling(p, 100_000)
    p.set_defaults(handler=cmd_sample_moments, randomized=True)

    p = sample.add_parser("lln", help="fraction of bucket sorts with exactly kappa descents")
    p.add_argument("--kappa", type=_nonnegative, required=True)
    p.add_argument("--nmax", type=_positive, required=True)
    _add_sampling(p, 10_000)
    p.set_defaults(handler=cmd_sample_lln, randomized=True)

    p = sample.add_parser("uniform-sum", help="integer parts of sums of uniforms against <n,k>/n!")
    p.add_argument("--n", type=_positive, required=True)
    _add_sampling(p, 100_000)
    p.set_defaults(handler=cmd_sample_uniform_sum, randomized=True)

    chain = commands.add_parser("chain", help="backward chain and path bijection").add_subparsers(dest="group", metavar="KIND")
    chain.required = True

    p = chain.add_parser("run", help="one trajectory down to the root")
    p.add_argument("--start", type=_vertex, required=True, help="n,k")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_chain_run, randomized=True)

    p = chain.add_parser("propagate", help="exact level marginals")
    p.add_argument("--start", type=_vertex, required=True, help="n,k")
    p.add_argument("--down-to", type=_positive, default=1)
    p.set_defaults(handler=cmd_chain_propagate)

    p = chain.add_parser("couple", help="coupled runs from (N,kappa_a) and (N,kappa_b)")
    p.add_argument("--N", type=_positive, required=True)
    p.add_argument("--kappa-a", type=_nonnegative, required=True)
    p.add_argument("--kappa-b", type=_nonnegative, required=True)
    p.add_argument("--runs", type=_positive, default=10_000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_chain_couple, randomized=True)

    p = chain.add_parser("path", help="permutation <-> labeled path")
    p.add_argument("--perm", type=parse_permutation, default=None, help="e.g. 312 or 3,1,2")
    p.add_argument("--ks", type=_int_list, default=None, help="descent coordinates, level 1 first")
    p.add_argument("--labels", type=_int_list, default=None, help="edge labels")
    p.set_defaults(handler=cmd_chain_path)

    p = chain.add_parser("monotonicity", help="exact left-edge monotonicity in kappa")
    p.add_argument("--N", type=_positive, required=True)
    p.set_defaults(handler=cmd_chain_monotonicity)

    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def _command_name(args) -> str:
    group = getattr(args, "group", None)
    return f"{args.command} {group}" if group else args.command


def _parameters(args) -> dict:
    return {key: value for key, value in vars(args).items() if key not in GLOBAL_KEYS}


def _write(text: str, out: Optional[str], settings: Settings) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if not path.is_absolute() and settings.output_dir:
        path = Path(settings.output_dir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("wrote %s", path)


def run(args, settings: Optional[Settings] = None) -> int:
    """Execute parsed arguments; returns the exit status"""
    settings = settings if settings is not None else Settings.from_env()
    randomized = getattr(args, "randomized", False)
    if randomized and args.seed is None:
        if args.strict:
            raise ParameterError(f"{_command_name(args)} is random; --strict requires --seed")
        args.seed = int(np.random.SeedSequence().entropy % 2**63)
        logger.info("no seed given; using %d", args.seed)

    with Workbench(settings, args.record) as bench:
        result = args.handler(bench, args)
        if isinstance(result, str):
            _write(result, args.out, settings)
            return EXIT_OK
        record = OutputRecord(
            command=_command_name(args),
            version=__version__,
            parameters=_parameters(args),
            payload=result["payload"],
            seed=args.seed if randomized else None,
            table=result.get("table"),
            rng={"algorithm": RNG_ALGORITHM, "numpy": np.__version__} if randomized else None,
            ok=result.get("ok", True),
            digits=settings.decimal_digits,
        )
        _write(record.render(args.format), args.out, settings)
        record_id = bench.record(record.as_dict())
        if record_id is not None:
            logger.info("archived record %d in %s", record_id, args.record)
    return EXIT_OK if record.ok else EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return run(args)
    except EulerBoundaryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
