"""Command-line front end: ``otlab <command> [options]``.

Exit codes: 0 success, 1 domain-invalid input, 2 budget or resource errors.
Reports go to ``--output`` (default ``-``, stdout).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import admissible, fourier, modlinalg, numtheory, oddtown, solver
from .errors import BudgetExceededError, DomainError
from .figure import figure_region_scan, region_csv
from .report import dumps, to_jsonable

log = logging.getLogger("otlab")

DEFAULT_SEED = 20240601


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def _as_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(to_jsonable(report)):
        w.writerow([k, v if not isinstance(v, float) else repr(v)])
    return buf.getvalue()


def _render(report, fmt: str) -> str:
    return dumps(report) if fmt == "json" else _as_csv(report)


def _random_matrix(args) -> modlinalg.ModMatrix:
    from .generators import random_distinct_column_matrix

    rng = np.random.default_rng(args.seed)
    return random_distinct_column_matrix(rng, args.p, args.d, args.c)


def _load_matrix(args) -> modlinalg.ModMatrix:
    if args.matrix:
        return modlinalg.read_matrix_csv(args.matrix)
    if args.p is None or args.d is None or args.c is None:
        raise DomainError("give --matrix or all of --p --d --c")
    return _random_matrix(args)


# ---------------------------------------------------------------------------
# subcommands: each returns (report_text, exit_code)


def cmd_verify(args):
    F = oddtown.read_family(args.family)
    verdict = oddtown.verify_family(F, args.ell)
    report = {"ell": args.ell, "n": F.n, "size": len(F), "verdict": verdict}
    return _render(report, args.format), 0 if verdict.valid else 1


def cmd_certify(args):
    F = oddtown.read_family(args.family)
    return _render(oddtown.certify(F, args.ell, threads=args.threads), args.format), 0


def cmd_split(args):
    F = oddtown.read_family(args.family)
    fac = numtheory.factorize(args.ell)
    if args.prime is not None:
        if args.prime not in fac.primes:
            raise DomainError(f"{args.prime} does not divide {args.ell}")
        index = fac.primes.index(args.prime)
    else:
        index = args.index
    A_i, A_ip = oddtown.split(F, args.ell, index)
    p, a = fac.factors[index]
    report = {"ell": args.ell, "prime": p, "alpha": a, "A_i": A_i, "A_i_prime": A_ip}
    return _render(report, args.format), 0


def cmd_bounds(args):
    return _render(numtheory.bound_table(args.ell, args.n), args.format), 0


def cmd_solve(args):
    res = solver.max_oddtown(args.n, args.ell, budget=args.node_budget, threads=args.threads)
    return _render(res, args.format), 0


def cmd_fourier_check(args):
    L = _load_matrix(args)
    prop = fourier.prop43_check(L)
    lem = fourier.lemma41_probability(L)
    report = {
        "p": L.modulus,
        "d": L.rows,
        "c": L.cols,
        "matrix": L,
        "prop43": {
            "max_violation": prop.max_violation,
            "argmax": list(prop.argmax),
            "holds": prop.holds,
        },
        "lemma41": lem,
    }
    if args.samples:
        est, se = fourier.lemma41_monte_carlo(L, args.samples, args.seed)
        report["monte_carlo"] = {
            "samples": args.samples,
            "seed": args.seed,
            "estimate": est,
            "stderr": se,
            "z": (est - float(lem.prob)) / se if se else 0.0,
        }
    return _render(report, args.format), 0


def cmd_admissible(args):
    L = _load_matrix(args)
    sigma = Fraction(args.sigma)
    res = admissible.greedy_admissible_submatrix(L, sigma)
    report = {"p": L.modulus, "d": L.rows, "c": L.cols, "result": res}
    return _render(report, args.format), 0


def cmd_construct(args):
    if args.kind == "singletons":
        F = oddtown.singleton_family(args.n)
        if args.format == "csv":
            return modlinalg.format_matrix_csv(oddtown.incidence_matrix(F, args.modulus)), 0
        return _render(F, "json"), 0
    if args.kind == "block":
        M = modlinalg.block_construction(args.a, args.b, modulus=args.modulus, verify_primes=())
    else:
        M = modlinalg.all_columns_matrix(args.n, modulus=args.modulus)
    if args.format == "csv":
        return modlinalg.format_matrix_csv(M), 0
    return _render(M, "json"), 0


def cmd_figure_data(args):
    pts = figure_region_scan(
        args.max_r, args.max_c, args.p,
        sampled=args.sampled, samples=args.samples, seed=args.seed, max_block=args.max_block,
    )
    if args.format == "csv":
        return region_csv(pts), 0
    return _render([{"kind": q.kind, "r": q.r, "c": q.c, "d": q.d, "x": q.x, "y": q.y} for q in pts], "json"), 0


def cmd_reduce(args):
    F = oddtown.read_family(args.family)
    return _render(oddtown.support_reduce(F, args.ell), args.format), 0


COMMANDS = {
    "verify": cmd_verify,
    "certify": cmd_certify,
    "split": cmd_split,
    "bounds": cmd_bounds,
    "solve": cmd_solve,
    "fourier-check": cmd_fourier_check,
    "admissible": cmd_admissible,
    "construct": cmd_construct,
    "figure-data": cmd_figure_data,
    "reduce": cmd_reduce,
}


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default="-", help="report path, '-' for stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="json (default) or csv; figure-data defaults to csv")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="otlab", description="Exact experiments on l-Oddtown families.")
    sub = parser.add_subparsers(dest="command", required=True)

    def family_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--family", required=True, help="family JSON file")
        p.add_argument("--ell", type=int, required=True)
        return p

    family_cmd("verify", "check the Oddtown conditions")
    family_cmd("certify", "check every per-prime inequality and bound")
    sp = family_cmd("split", "split by divisibility by one prime power")
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--index", type=int, default=0, help="0-based prime index")
    grp.add_argument("--prime", type=int)
    family_cmd("reduce", "delete l-blocks of identically placed elements")

    p = sub.add_parser("bounds", parents=[common], help="evaluate the closed-form bounds")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("solve", parents=[common], help="exact f_l(n) by maximum clique")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--node-budget", type=_positive, default=None)

    for name, help_ in (("fourier-check", "Fourier bound and exact probability"), ("admissible", "greedy admissible submatrix")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--matrix", help="matrix CSV file (modulus must be prime)")
        p.add_argument("--p", type=int, help="prime for a random matrix")
        p.add_argument("--d", type=int, help="rows of a random matrix")
        p.add_argument("--c", type=int, help="columns of a random matrix")
        if name == "fourier-check":
            p.add_argument("--samples", type=int, default=0, help="Monte Carlo samples (0 = skip)")
        else:
            p.add_argument("--sigma", required=True, help="threshold, e.g. 1/2")

    p = sub.add_parser("construct", parents=[common], help="emit a construction")
    p.add_argument("kind", choices=("singletons", "block", "all-columns"))
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--modulus", type=int, default=2)

    p = sub.add_parser("figure-data", parents=[common], help="(log r/d, log c/d) points as CSV")
    p.add_argument("--max-r", type=int, default=4)
    p.add_argument("--max-c", type=int, default=4)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--sampled", action="store_true")
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--max-block", type=int, default=3)
    return parser


def _check_args(args):
    if args.command == "construct":
        need = {"singletons": ("n",), "block": ("a", "b"), "all-columns": ("n",)}[args.kind]
        missing = [f"--{k}" for k in need if getattr(args, k) is None]
        if missing:
            raise DomainError(f"construct {args.kind} needs {' '.join(missing)}")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.format is None:
        args.format = "csv" if args.command == "figure-data" else "json"
    try:
        _check_args(args)
        text, code = COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"otlab: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except MemoryError:
        print("otlab: out of memory", file=sys.stderr)
        return 2
    except (DomainError, FileNotFoundError) as exc:
        print(f"otlab: invalid input: {exc}", file=sys.stderr)
        return 1
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
