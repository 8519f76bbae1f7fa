"""Command-line front end: ``bbday <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 size cap exceeded.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import functools
import io
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import exactcomb, quantum, samplers, statistics
from .exactcomb import DomainError, SizeError
from .rng import DEFAULT_SEED, RngStream

SCHEMA_VERSION = 1
DEFAULT_SAMPLES = 100_000

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_SIZE = 0, 2, 3, 4

# parameter caps, echoed in --help
MAX_N_EXACT = 10**9
MAX_SAMPLES = 10**8
MAX_WORKERS = 64


class UsageError(ValueError):
    pass


def jsonable(x):
    if dataclasses.is_dataclass(x) and not isinstance(x, type):
        if hasattr(x, "to_dict"):
            return jsonable(x.to_dict())
        d = {f.name: jsonable(getattr(x, f.name)) for f in dataclasses.fields(x)}
        if hasattr(x, "verdict"):
            d["verdict"] = x.verdict
        return d
    if isinstance(x, Fraction):
        return exactcomb.format_rational(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    return x


def _write_csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- subcommands
# each returns (report dict, csv header, csv rows)


def cmd_exact(args):
    n, k, j, l = args.n, args.k, args.j, args.l
    distinct = exactcomb.prob_all_distinct_bosons(n, k)
    distinct_b = exactcomb.prob_all_distinct_boltzmannons(n, k)
    first = exactcomb.prob_first_l_days_at_least_j(n, k, j, l)
    moment = exactcomb.binomial_moment_at_least(n, k, j, l)
    result = {
        "multiset_coefficient": str(exactcomb.multiset_coefficient(n, k)),
        "prob_all_distinct_bosons": distinct,
        "prob_all_distinct_bosons_decimal": float(distinct),
        "prob_all_distinct_boltzmannons": distinct_b,
        "prob_all_distinct_boltzmannons_decimal": float(distinct_b),
        "prob_first_l_days_at_least_j": first,
        "prob_first_l_days_at_least_j_decimal": float(first),
        "binomial_moment_at_least": moment,
        "binomial_moment_at_least_decimal": float(moment),
    }
    rows = [(key, jsonable(v) if isinstance(v, Fraction) else v) for key, v in result.items()]
    return result, ("quantity", "value"), rows


def cmd_threshold(args):
    k_star = exactcomb.threshold_k(args.n, args.model)
    approx = exactcomb.asymptotic_threshold(args.n, args.model)
    result = {
        "threshold_k": k_star,
        "asymptotic": approx,
        "ratio": k_star / approx,
        "prob_all_distinct_at_threshold": exactcomb.prob_all_distinct(args.n, k_star, args.model),
        "prob_all_distinct_below_threshold": exactcomb.prob_all_distinct(args.n, k_star - 1, args.model),
    }
    rows = [(key, jsonable(v)) for key, v in result.items()]
    return result, ("quantity", "value"), rows


def cmd_sample(args):
    fn = samplers.get_sampler(args.model)
    tables = fn(args.n, args.k, args.samples, RngStream(args.seed))
    buf = io.StringIO()
    samplers.write_dump(buf, tables, args.n, args.k, args.model, args.seed)
    return buf.getvalue()


def cmd_poisson(args):
    rep = statistics.poisson_limit_experiment(
        args.n, args.j, args.c, args.model, args.samples, RngStream(args.seed), workers=args.workers
    )
    rows = [(i, obs, rep.samples * p) for i, (obs, p) in enumerate(zip(rep.histogram, rep.poisson_pmf))]
    return rep, ("outcome", "observed", "expected"), rows


def cmd_equivalence(args):
    rep = statistics.equivalence_experiment(
        args.a, args.b, args.n, args.k, args.samples, RngStream(args.seed),
        projection=args.projection, workers=args.workers,
    )
    rows = list(zip(rep.outcomes, rep.observed_a, rep.observed_b, rep.expected))
    return rep, ("outcome", "observed_a", "observed_b", "expected"), rows


def cmd_quantum(args):
    n, k = args.n, args.k
    basis = quantum.symmetric_basis(n, k, cap=quantum.LIFT_CAP)
    d = basis.dim
    uni = quantum.uniform_state(d)
    checks = ["uniform", "invariance", "average"] if args.check == "all" else [args.check]
    stream = RngStream(args.seed)
    result: dict = {"dimension": d, "labels": [list(x) for x in basis.labels]}
    rows = []
    passed = True
    if "uniform" in checks:
        dist = quantum.birthday_measurement_distribution(uni, n, k)
        dev = max(abs(p - 1 / d) for p in dist.values())
        ok = dev <= 1e-12
        result["uniform"] = {
            "distribution": {",".join(map(str, lab)): p for lab, p in dist.items()},
            "expected": exactcomb.format_rational(Fraction(1, d)),
            "max_deviation": dev,
            "passed": ok,
        }
        rows += [(",".join(map(str, lab)), p, 1 / d) for lab, p in dist.items()]
        passed &= ok
    if "invariance" in checks:
        good = quantum.verify_invariance(uni, n, k, args.trials, 1e-8, stream.child(0).generator())
        first = np.zeros((d, d), dtype=complex)
        first[0, 0] = 1
        bad = quantum.verify_invariance(first, n, k, args.trials, 1e-8, stream.child(1).generator())
        ok = good.passed and (not bad.passed or d == 1)
        result["invariance"] = {"uniform": good, "first_label": bad, "passed": ok}
        passed &= ok
    if "average" in checks:
        starts = {}
        if k <= n:
            starts["distinct_modes"] = tuple([1] * k + [0] * (n - k))
        starts["same_mode"] = tuple([k] + [0] * (n - 1))
        avg = {}
        ok = True
        for idx, (name, label) in enumerate(starts.items()):
            sigma = quantum.pure_density(quantum.basis_state(n, label))
            rho = quantum.haar_average_state(sigma, n, k, args.m, stream.child(2 + idx).generator())
            td = quantum.trace_distance(rho, uni)
            avg[name] = {"initial_label": list(label), "trace_distance": td, "tolerance": args.tol,
                         "passed": td < args.tol}
            ok &= td < args.tol
        result["average"] = {"M": args.m, **avg, "passed": ok}
        passed &= ok
    result["passed"] = passed
    result["verdict"] = "PASS" if passed else "FAIL"
    return result, ("outcome", "observed", "expected"), rows


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    caps = (f"Caps: n <= {MAX_N_EXACT}, samples <= {MAX_SAMPLES}, workers <= {MAX_WORKERS}, "
            f"symmetric-power dimension <= {quantum.LIFT_CAP} for quantum. Default seed {DEFAULT_SEED}.")
    p = _Parser(
        prog="bbday",
        description="Exact and Monte Carlo birthday statistics for bosons, boltzmannons and fermions.",
        epilog=caps,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")
    common.add_argument("--workers", type=_positive_int, default=1,
                        help="threads for Monte Carlo blocks; results do not depend on it")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    add = functools.partial(sub.add_parser, parents=[common], epilog=caps)

    s = add("exact", help="exact multiset counts and collision probabilities")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--k", type=_nonneg_int, required=True)
    s.add_argument("--j", type=_positive_int, default=2)
    s.add_argument("--l", type=_nonneg_int, default=1)
    s.set_defaults(func=cmd_exact)

    s = add("threshold", help="smallest k with a repeated birthday w.p. >= 1/2")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--model", choices=exactcomb.MODELS, default="boson")
    s.set_defaults(func=cmd_threshold)

    s = add("sample", help="dump sampled occupancy tables")
    s.add_argument("--model", choices=sorted(samplers.SAMPLERS), default="boson")
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--k", type=_nonneg_int, required=True)
    s.add_argument("--samples", type=_nonneg_int, default=DEFAULT_SAMPLES)
    s.set_defaults(func=cmd_sample)

    s = add("poisson", help="Poisson limit of j-fold birthday counts")
    s.add_argument("--n", type=_positive_int, default=10_000)
    s.add_argument("--j", type=int, default=2)
    s.add_argument("--c", type=float, default=1.0)
    s.add_argument("--model", choices=("boson", "boltzmannon"), default="boson")
    s.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    s.set_defaults(func=cmd_poisson)

    s = add("equivalence", help="compare two samplers' table laws")
    s.add_argument("--a", choices=sorted(samplers.SAMPLERS), default="boson")
    s.add_argument("--b", choices=sorted(samplers.SAMPLERS), default="dirichlet")
    s.add_argument("--n", type=_positive_int, default=5)
    s.add_argument("--k", type=_nonneg_int, default=3)
    s.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    s.add_argument("--projection", choices=("table", "profile"), default="table")
    s.set_defaults(func=cmd_equivalence)

    s = add("quantum", help="symmetric-power oracle checks")
    s.add_argument("--n", type=_positive_int, default=3)
    s.add_argument("--k", type=_nonneg_int, default=2)
    s.add_argument("--check", choices=("uniform", "invariance", "average", "all"), default="all")
    s.add_argument("--m", type=_positive_int, default=2000, help="Haar draws for --check average")
    s.add_argument("--trials", type=_positive_int, default=50, help="Haar draws for --check invariance")
    s.add_argument("--tol", type=float, default=0.05, help="trace-distance tolerance for --check average")
    s.set_defaults(func=cmd_quantum)
    return p


def _validate(args):
    if getattr(args, "n", 0) > MAX_N_EXACT:
        raise UsageError(f"n exceeds cap {MAX_N_EXACT}")
    if getattr(args, "samples", 0) > MAX_SAMPLES:
        raise UsageError(f"samples exceeds cap {MAX_SAMPLES}")
    if args.workers > MAX_WORKERS:
        raise UsageError(f"workers exceeds cap {MAX_WORKERS}")
    if args.command == "poisson":
        if args.j < 2:
            raise UsageError("--j must be >= 2")
        if args.c < 0 or not math.isfinite(args.c):
            raise UsageError("--c must be a finite non-negative number")


def config_echo(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
    except UsageError as e:
        print(f"bbday: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        out = args.func(args)
    except SizeError as e:
        print(f"bbday: size cap: {e}", file=sys.stderr)
        return EXIT_SIZE
    except DomainError as e:
        print(f"bbday: domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    if isinstance(out, str):
        text = out
    else:
        result, header, rows = out
        if args.format == "csv":
            text = _write_csv(rows, header)
        else:
            doc = {
                "schema": SCHEMA_VERSION,
                "command": args.command,
                "config": config_echo(args),
                "seed": args.seed,
                "result": jsonable(result),
                "wall_clock": time.perf_counter() - t0,
            }
            text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
