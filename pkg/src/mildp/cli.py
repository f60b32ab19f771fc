"""Command line front end.  Every command prints one JSON VerdictReport
(``search`` prints one per line); ``--pretty`` renders the same data for humans.

Exit codes: 0 success, 2 invalid input, 3 resource cap, 4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Any, Iterator, Optional, Sequence

from . import __version__, galois, mildness, series
from .arith import LinkingMatrix, linking_matrix, tame_primes
from .errors import FormulaInconsistencyError, InvalidInputError, ResourceLimitError
from .report import VerdictReport, dump_relator_file, parse_relator_file

log = logging.getLogger("mildp")

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE, EXIT_INCONSISTENT = 0, 2, 3, 4
SERIES_MAX_N = 64
SEARCH_MAX_QMAX = 100_000
SEARCH_MAX_SUBSETS = 5_000_000


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from None


def _relators_from(args: argparse.Namespace) -> tuple[list[mildness.Relator2], dict[str, Any]]:
    """Relators from --file, or from the Koch presentation of --p/--primes reduced mod pi."""
    if args.file:
        doc = _load_json(args.file)
        return parse_relator_file(doc), doc
    if args.p is None or not args.primes:
        raise InvalidInputError("give either --file or both --p and --primes")
    make = galois.koch_presentation_wild if args.wild else galois.koch_presentation
    P = make(args.p, args.primes, args.roots)
    rels = galois.reduce_mod_pi(P)
    return rels, dump_relator_file(rels)


# -- commands ------------------------------------------------------------------


def cmd_linking(args: argparse.Namespace) -> VerdictReport:
    L = linking_matrix(args.p, args.primes, args.roots)
    inputs = {"p": args.p, "primes": args.primes, "roots": args.roots}
    result = {"matrix": L.to_rows(), "primes": list(L.primes), "roots": list(L.roots)}
    return VerdictReport.build("linking", inputs, inputs, None, result)


def _matrix_from(args: argparse.Namespace) -> tuple[LinkingMatrix, dict[str, Any]]:
    if args.matrix_file:
        doc = _load_json(args.matrix_file)
        if not isinstance(doc, dict) or "p" not in doc or "matrix" not in doc:
            raise InvalidInputError("matrix file needs keys 'p' and 'matrix'")
        return LinkingMatrix.from_rows(doc["p"], doc["matrix"]), doc
    if args.p is None or not args.primes:
        raise InvalidInputError("give either --matrix-file or both --p and --primes")
    inputs = {"p": args.p, "primes": args.primes, "roots": args.roots}
    return linking_matrix(args.p, args.primes, args.roots), inputs


def cmd_theorem1(args: argparse.Namespace) -> VerdictReport:
    inputs_args = {"search_labeling": args.search_labeling}
    if args.search_labeling:
        if args.p is None or not args.primes:
            raise InvalidInputError("--search-labeling needs --p and --primes")
        inputs = {"p": args.p, "primes": args.primes, "roots": args.roots}
        lab = galois.find_labeling(args.p, args.primes, args.roots)
        if lab is None:
            verdict = mildness.Verdict(
                mildness.Status.UNKNOWN,
                "theorem1-labeling",
                mildness.Certificate(details={"labeling": None}),
            )
            result: dict[str, Any] = {"labeling": None}
        else:
            verdict = mildness.Verdict(lab.verdict.status, "theorem1-labeling", lab.verdict.certificate)
            result = {
                "labeling": list(lab.order),
                "indices": [i + 1 for i in lab.indices],
                "matrix": lab.matrix.to_rows(),
                "circuit_value": lab.verdict.certificate.details["circuit_value"],
            }
        return VerdictReport.build("theorem1", {**inputs, **inputs_args}, inputs, verdict, result)
    L, inputs = _matrix_from(args)
    verdict = mildness.check_theorem1(L)
    result = {"matrix": L.to_rows(), "primes": list(L.primes)}
    return VerdictReport.build("theorem1", {**inputs, **inputs_args}, inputs, verdict, result)


def cmd_partition(args: argparse.Namespace) -> VerdictReport:
    rels, doc = _relators_from(args)
    if args.A:
        part = mildness.Partition.of(rels[0].m, args.A)
        verdict = mildness.check_corollary7(rels, part)
    else:
        verdict = mildness.check_partition_search(rels)
    part = verdict.certificate.partition
    result = {"M_L": mildness.build_ML(rels, part).tolist() if part else None}
    return VerdictReport.build("partition", {"A": args.A}, doc, verdict, result)


def cmd_koch(args: argparse.Namespace) -> VerdictReport:
    rels, doc = _relators_from(args)
    verdict = mildness.check_koch(rels, method=args.method, seed=args.seed)
    K = mildness.koch_matrix(rels)
    p = rels[0].p
    result = {
        "matrix": [[mildness.format_linear_form(K[k, j], p) for j in range(K.shape[1])] for k in range(K.shape[0])]
    }
    args_echo = {"method": args.method, "seed": args.seed}
    return VerdictReport.build("koch", args_echo, {"doc": doc, **args_echo}, verdict, result)


def cmd_anick(args: argparse.Namespace) -> VerdictReport:
    if args.file:
        doc = _load_json(args.file)
        if not isinstance(doc, dict) or "p" not in doc or "weights" not in doc:
            raise InvalidInputError("weight file needs keys 'p' and 'weights'")
        p, weights = doc["p"], doc["weights"]
    else:
        if args.p is None or args.weights is None:
            raise InvalidInputError("give either --file or both --p and --weights")
        p = args.p
        weights = [_int_list(row) for row in args.weights.split(";")]
        doc = {"p": p, "weights": weights}
    verdict = mildness.check_anick(weights, p)
    diagram = galois.linking_diagram(weights, p)
    result = {
        "connected_mod_p": verdict.certificate.details["connected_mod_p"],
        "edges": [[i + 1, j + 1, w] for (i, j), w in sorted(diagram.edges.items())],
    }
    return VerdictReport.build("anick", {}, doc, verdict, result)


def cmd_oracle(args: argparse.Namespace) -> VerdictReport:
    rels, doc = _relators_from(args)
    verdict = mildness.strong_freeness_oracle(rels, args.maxdeg)
    result = {
        "quotient_dims": verdict.certificate.details["quotient_dims"],
        "expected_dims": verdict.certificate.details["expected_dims"],
    }
    return VerdictReport.build("oracle", {"maxdeg": args.maxdeg}, {"doc": doc, "maxdeg": args.maxdeg}, verdict, result)


def _check_n(N: int) -> None:
    if not 0 <= N <= SERIES_MAX_N:
        raise InvalidInputError(f"N must lie in [0, {SERIES_MAX_N}]")


def cmd_series(args: argparse.Namespace) -> VerdictReport:
    _check_n(args.N)
    s = series.expand_rational(args.m, args.degrees, args.N)
    inputs = {"m": args.m, "degrees": args.degrees, "N": args.N}
    return VerdictReport.build("series", inputs, inputs, None, {"coefficients": list(s)})


def cmd_gn(args: argparse.Namespace) -> VerdictReport:
    _check_n(args.N)
    extracted = series.extract_exponents(series.expand_rational(args.m, [args.e], args.N))
    closed = [series.gn_closed_form(args.m, args.e, n) for n in range(1, args.N + 1)]
    if closed != extracted:
        bad = next(n for n, (a, b) in enumerate(zip(closed, extracted), start=1) if a != b)
        raise FormulaInconsistencyError(
            f"closed form g_{bad} = {closed[bad - 1]} but series extraction gives {extracted[bad - 1]}"
        )
    inputs = {"m": args.m, "e": args.e, "N": args.N}
    return VerdictReport.build("gn", inputs, inputs, None, {"exponents": closed})


def _search_one(job: tuple[int, tuple[int, ...]]) -> Optional[dict[str, Any]]:
    p, subset = job
    lab = galois.find_labeling(p, list(subset))
    if lab is None:
        return None
    return {
        "subset": list(subset),
        "labeling": list(lab.order),
        "verdict": lab.verdict,
        "circuit_value": lab.verdict.certificate.details["circuit_value"],
    }


def search_reports(p: int, m: int, qmax: int, jobs: int = 1) -> Iterator[VerdictReport]:
    """Reports for every m-subset of primes = 1 mod p up to qmax with a passing labeling."""
    if m < 4 or m % 2:
        raise InvalidInputError(f"search needs an even m >= 4, got {m}")
    if m > galois.LABELING_CAP:
        raise ResourceLimitError(f"m = {m} exceeds the labeling cap {galois.LABELING_CAP}")
    if qmax > SEARCH_MAX_QMAX:
        raise ResourceLimitError(f"qmax {qmax} exceeds the cap {SEARCH_MAX_QMAX}")
    primes = tame_primes(p, qmax)
    total = comb(len(primes), m)
    if total > SEARCH_MAX_SUBSETS:
        raise ResourceLimitError(f"{total} subsets exceed the cap {SEARCH_MAX_SUBSETS}")
    work = ((p, s) for s in combinations(primes, m))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            # map preserves submission order, so output order is independent of scheduling
            hits = list(pool.map(_search_one, work, chunksize=64))
    else:
        hits = map(_search_one, work)
    for hit in hits:
        if hit is None:
            continue
        inputs = {"p": p, "primes": hit["subset"]}
        result = {"subset": hit["subset"], "labeling": hit["labeling"], "circuit_value": hit["circuit_value"]}
        yield VerdictReport.build("search", {"p": p, "m": m, "qmax": qmax}, inputs, hit["verdict"], result)


# -- rendering -----------------------------------------------------------------


def render_pretty(rep: VerdictReport) -> str:
    name = rep.command["name"]
    res = rep.result
    lines = [f"{name}  ({rep.input_digest[:19]}…, v{rep.version})"]
    if name == "series":
        lines.append(",".join(map(str, res["coefficients"])))
    elif name == "gn":
        lines.append(",".join(map(str, res["exponents"])))
    elif "matrix" in res and name in ("linking", "theorem1"):
        for row in res["matrix"] or []:
            lines.append("  " + " ".join("." if v is None else str(v) for v in row))
    elif name == "koch":
        for row in res["matrix"]:
            lines.append("  [" + ", ".join(row) + "]")
    if rep.verdict:
        v = rep.verdict
        cert = v["certificate"]
        lines.append(f"status: {v['status']}  criterion: {v['criterion']}")
        for key in ("partition", "determinant", "rank", "refuted_at", "consistent_up_to"):
            if cert[key] is not None:
                lines.append(f"  {key}: {cert[key]}")
    for key in ("labeling", "subset", "quotient_dims", "expected_dims", "connected_mod_p"):
        if key in res:
            lines.append(f"{key}: {res[key]}")
    if rep.timing is not None:
        lines.append(f"time: {rep.timing * 1000:.1f} ms")
    return "\n".join(lines)


# -- parser --------------------------------------------------------------------


def _prime_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=int, help="odd prime p")
    sp.add_argument("--primes", type=_int_list, help="comma-separated primes q_i = 1 mod p")
    sp.add_argument("--roots", type=_int_list, default=None, help="primitive roots g_i (default: smallest)")


def _relator_args(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--file", help="RelatorFile JSON")
    _prime_args(sp)
    sp.add_argument("--wild", action="store_true", help="adjoin p to S (one extra generator)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mildp", description="Strong-freeness and mildness checks; each command prints a JSON VerdictReport."
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--no-timing", action="store_true", help="omit wall-clock timing for byte-stable output")
    common.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("linking", parents=[common], help="linking matrix of a prime set")
    _prime_args(sp)
    sp.set_defaults(func=cmd_linking)

    sp = sub.add_parser("theorem1", parents=[common], help="even circuit criterion")
    _prime_args(sp)
    sp.add_argument("--matrix-file", help='JSON {"p": .., "matrix": [[null, ..], ..]}')
    sp.add_argument("--search-labeling", action="store_true", help="search orderings of the primes")
    sp.set_defaults(func=cmd_theorem1)

    sp = sub.add_parser("partition", parents=[common], help="partition criterion (searched unless --A)")
    _relator_args(sp)
    sp.add_argument("--A", type=_int_list, default=None, help="fix block A instead of searching")
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("koch", parents=[common], help="Koch's rank criterion")
    _relator_args(sp)
    sp.add_argument("--method", choices=("auto", "minors", "random"), default="auto")
    sp.add_argument("--seed", type=int, default=0, help="seed for the randomized rank path")
    sp.set_defaults(func=cmd_koch)

    sp = sub.add_parser("anick", parents=[common], help="linking diagram connected mod p")
    sp.add_argument("--file", help='JSON {"p": .., "weights": [[..], ..]}')
    sp.add_argument("--p", type=int)
    sp.add_argument("--weights", help="rows separated by ';', entries by ','")
    sp.set_defaults(func=cmd_anick)

    sp = sub.add_parser("oracle", parents=[common], help="Lie algebra dimension oracle")
    _relator_args(sp)
    sp.add_argument("--maxdeg", type=int, default=5)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("series", parents=[common], help="coefficients of 1/(1 - m t + sum t^e)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--degrees", type=_int_list, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("gn", parents=[common], help="graded ranks g_1..g_N for one relator of degree e")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--e", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.set_defaults(func=cmd_gn)

    sp = sub.add_parser("search", parents=[common], help="prime sets with a passing circuit labeling")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--qmax", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=None)
    return parser


def _emit(rep: VerdictReport, args: argparse.Namespace, out) -> None:
    if args.no_timing:
        rep.timing = None
    print(render_pretty(rep) if args.pretty else rep.dumps(), file=out, flush=True)


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "search":
            start = time.perf_counter()
            for rep in search_reports(args.p, args.m, args.qmax, args.jobs):
                rep.timing = time.perf_counter() - start
                _emit(rep, args, out)
            return EXIT_OK
        start = time.perf_counter()
        rep = args.func(args)
        rep.timing = time.perf_counter() - start
        _emit(rep, args, out)
        return EXIT_OK
    except (InvalidInputError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FormulaInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`); stop quietly
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
