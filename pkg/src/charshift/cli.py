"""Batch experiment runner and inspection tool.

Solve commands run independent trials against one hidden instance and emit
JSON Lines (one record per trial plus a final summary record) or CSV.  Equal
seeds give byte-identical output; per-trial generators are seeded with
seed XOR trial-index, and trials may run across a worker pool without
changing the output.  Timing and retry diagnostics go to stderr, controlled
by the CHARSHIFT_LOG environment variable.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import algorithms as alg
from . import finite_field as ff
from . import oracles as orc
from .errors import CharshiftError, ConfigError
from .number_theory import (
    GaussSumSpec,
    factor_trial,
    gauss_sum_bruteforce,
    gauss_sum_closed_form,
    is_prime,
)

log = logging.getLogger("charshift")

_DUMP_LIMIT = 10**5
_VERIFY_TOL = 1e-9


def _setup_logging():
    level_name = os.environ.get("CHARSHIFT_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charshift",
        description="Exact desk-scale experiments on shifted quadratic characters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p):
        p.add_argument("--shift", default="random",
                       help='hidden shift; an explicit value or "random" (default)')
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--seed", type=int, default=0, help="64-bit experiment seed")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("slsp", help="recover the shift of a Legendre-symbol oracle")
    p.add_argument("--p", type=int, required=True)
    add_run_flags(p)

    p = sub.add_parser("sjsp", help="recover the shift of a Jacobi-symbol oracle")
    p.add_argument("--n", type=int, required=True)
    add_run_flags(p)

    p = sub.add_parser("sjsp-unknown", help="recover shift and hidden modulus over Z_M")
    p.add_argument("--n", type=int, required=True, help="secret modulus (builds the oracle)")
    p.add_argument("--M", type=int, required=True, help="public domain size, n^2 < M")
    add_run_flags(p)

    p = sub.add_parser("sqcp", help="recover the shift of a quadratic-character oracle")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--modulus", default=None,
                   help='field polynomial, low-degree-first, e.g. "1,0,1"')
    add_run_flags(p)

    p = sub.add_parser("gauss", help="print a quadratic Gauss sum, exact and numeric")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--zp", type=int, metavar="P")
    group.add_argument("--zn", type=int, metavar="N")
    group.add_argument("--fq", type=int, nargs=2, metavar=("P", "R"))

    p = sub.add_parser("verify", help="run an exact identity check")
    p.add_argument("suite", choices=("lemma3", "tft", "rfcf"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--shift", type=int, default=0)

    p = sub.add_parser("oracle-dump", help="write the full x,f(x) table as CSV")
    p.add_argument("--variant", required=True,
                   choices=("legendre", "jacobi", "jacobi-unknown", "field"))
    p.add_argument("--p", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--modulus", default=None)
    p.add_argument("--shift", default=None, help="defaults to zero shift")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    return parser


# ---------------------------------------------------------------------------
# solve commands


def _resolve_shift(command, args):
    """Turn --shift into a concrete value, drawing from the seeded rng for
    "random" so whole experiments replay exactly."""
    rng = np.random.default_rng(np.uint64(args.seed))
    if command == "sqcp":
        fld = _build_field(args)
        if args.shift == "random":
            return ff.element_from_index(fld, int(rng.integers(fld.q)))
        return ff.parse_element(fld, args.shift)
    size = {"slsp": lambda: args.p, "sjsp": lambda: args.n,
            "sjsp-unknown": lambda: args.n}[command]()
    if args.shift == "random":
        return int(rng.integers(size))
    try:
        value = int(args.shift)
    except ValueError:
        raise ConfigError(f"--shift must be an integer or 'random', got {args.shift!r}")
    if not 0 <= value < size:
        raise ConfigError(f"--shift {value} outside [0, {size})")
    return value


def _build_field(args) -> ff.FieldSpec:
    modulus = ff.parse_poly(args.modulus) if args.modulus else None
    return ff.make_field(args.p, args.r, modulus)


def _run_trial(command, params, shift, seed, trial) -> dict:
    """One independent solve; module-level so worker processes can run it."""
    rng = np.random.default_rng(np.uint64(seed ^ trial))
    if command == "slsp":
        oracle = orc.legendre_oracle(params["p"], shift=shift)
        rep = alg.solve_slsp(params["p"], oracle, rng)
        correct = rep.recovered_shift == shift
    elif command == "sjsp":
        oracle = orc.jacobi_oracle(params["n"], shift=shift)
        rep = alg.solve_sjsp(factor_trial(params["n"]), oracle, rng)
        correct = rep.recovered_shift == shift
    elif command == "sjsp-unknown":
        oracle = orc.jacobi_unknown_oracle(params["n"], params["M"], shift=shift)
        rep = alg.solve_sjsp_unknown_n(params["M"], oracle, rng)
        correct = rep.recovered_shift == shift and rep.recovered_modulus == params["n"]
    elif command == "sqcp":
        fld = ff.make_field(params["p"], params["r"], ff.parse_poly(params["modulus"]))
        oracle = orc.field_oracle(fld, shift=shift)
        rep = alg.solve_sqcp(fld, oracle, rng)
        correct = rep.recovered_shift == shift
    else:
        raise AssertionError(command)

    record = {"trial": trial}
    if command == "sqcp":
        record["recovered_shift"] = list(rep.recovered_shift)
    else:
        record["recovered_shift"] = rep.recovered_shift
    if command == "sjsp-unknown":
        record["recovered_modulus"] = rep.recovered_modulus
        record["first_candidate"] = rep.candidate_moduli[0]
    record["attempts"] = rep.attempts
    record["coherent_queries"] = rep.coherent_queries
    record["classical_queries"] = rep.classical_queries
    record["correct"] = bool(correct)
    record["exact_attempt_probability"] = rep.exact_success_probability
    return record


def _solve_command(command, args) -> int:
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    if args.seed < 0:
        raise ConfigError("--seed must be nonnegative")
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")

    if command == "slsp":
        if args.p < 3 or args.p % 2 == 0 or not is_prime(args.p):
            raise ConfigError(f"--p {args.p} is not an odd prime")
        params = {"p": args.p}
    elif command == "sjsp":
        _checked(factor_trial, args.n)
        params = {"n": args.n}
    elif command == "sjsp-unknown":
        _checked(factor_trial, args.n)
        if args.n * args.n >= args.M:
            raise ConfigError(f"need n^2 < M but {args.n}^2 >= {args.M}")
        params = {"n": args.n, "M": args.M}
    else:  # sqcp
        fld = _checked(_build_field, args)
        if fld.p == 2:
            raise ConfigError("character experiments need odd characteristic")
        params = {"p": fld.p, "r": fld.r, "modulus": ff.format_poly(fld.modulus)}

    shift = _checked(_resolve_shift, command, args)

    trial_args = [(command, params, shift, args.seed, t) for t in range(args.trials)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_run_trial_star, trial_args))
    else:
        records = [_run_trial(*a) for a in trial_args]
    records.sort(key=lambda r: r["trial"])

    exact = next(
        (r["exact_attempt_probability"] for r in records
         if r["exact_attempt_probability"] is not None),
        None,
    )
    summary = {
        "command": command,
        "params": params,
        "trials": args.trials,
        "success_rate": sum(r["correct"] for r in records) / args.trials,
        "mean_attempts": sum(r["attempts"] for r in records) / args.trials,
        "coherent_queries_total": sum(r["coherent_queries"] for r in records),
    }
    if exact is not None:
        summary["exact_attempt_probability"] = exact
    for r in records:
        del r["exact_attempt_probability"]

    _emit_records(records, summary, args)
    return 0


def _run_trial_star(packed):
    return _run_trial(*packed)


def _checked(fn, *fn_args):
    """Run a constructor, converting package errors into ConfigError."""
    try:
        return fn(*fn_args)
    except ConfigError:
        raise
    except (CharshiftError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _emit_records(records, summary, args):
    if args.format == "json":
        lines = [json.dumps(r, separators=(",", ":")) for r in records]
        lines.append(json.dumps({"summary": summary}, separators=(",", ":")))
        payload = "\n".join(lines) + "\n"
    else:
        buf = io.StringIO()
        fields = list(records[0].keys())
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        buf.write("# summary " + json.dumps(summary, separators=(",", ":")) + "\n")
        payload = buf.getvalue()
    _write_out(payload, args.out)


def _write_out(payload: str, out_path):
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)


# ---------------------------------------------------------------------------
# inspection commands


def _gauss_command(args) -> int:
    if args.zp is not None:
        spec = _checked(GaussSumSpec.for_prime, args.zp)
    elif args.zn is not None:
        spec = GaussSumSpec.for_ring(_checked(factor_trial, args.zn))
    else:
        p, r = args.fq
        spec = GaussSumSpec.for_field(_checked(ff.make_field, p, r))
    closed = gauss_sum_closed_form(spec)
    brute = gauss_sum_bruteforce(spec)
    delta = abs(closed.value - brute)
    _write_out(
        f"exact: {closed.exact_str}\n"
        f"numeric: {closed.value!r}\n"
        f"brute-force delta: {delta:.3e}\n",
        None,
    )
    return 0


def _verify_command(args) -> int:
    if args.suite == "lemma3":
        if args.n is None:
            raise ConfigError("verify lemma3 requires --n")
        moduli = _checked(factor_trial, args.n)
        if not 0 <= args.shift < args.n:
            raise ConfigError(f"--shift {args.shift} outside [0, {args.n})")
        deviation = alg.verify_jacobi_qft_lemma(moduli, args.shift)
        _write_out(f"max deviation: {deviation:.3e} (tolerance {_VERIFY_TOL:g})\n", None)
        return 0 if deviation < _VERIFY_TOL else 1
    if args.suite == "tft":
        if args.p is None or args.r is None:
            raise ConfigError("verify tft requires --p and --r")
        fld = _checked(_build_field, argparse.Namespace(p=args.p, r=args.r, modulus=None))
        matrix_dev, unitary_dev = alg.tft_matrix_deviation(fld)
        _write_out(
            f"matrix deviation: {matrix_dev:.3e} (tolerance {_VERIFY_TOL:g})\n"
            f"unitarity deviation: {unitary_dev:.3e} (tolerance {_VERIFY_TOL:g})\n",
            None,
        )
        return 0 if matrix_dev < _VERIFY_TOL and unitary_dev < _VERIFY_TOL else 1
    # rfcf
    if args.n is None or args.M is None:
        raise ConfigError("verify rfcf requires --n and --M")
    moduli = _checked(factor_trial, args.n)
    if not 0 <= args.shift < args.n:
        raise ConfigError(f"--shift {args.shift} outside [0, {args.n})")
    comparison = _checked(alg.repeated_sampling_comparison, moduli, args.shift, args.M)
    _write_out(
        f"l1 distance: {comparison.l1_distance!r}\n"
        f"bound n/sqrt(M): {comparison.bound!r}\n",
        None,
    )
    return 0 if comparison.l1_distance <= comparison.bound + 1e-12 else 1


def _parse_dump_shift(args):
    # None -> zero shift; "random" -> drawn inside the oracle from the seed.
    if args.shift is None:
        return 0
    if args.shift == "random":
        return None
    try:
        return int(args.shift)
    except ValueError:
        raise ConfigError(f"--shift must be an integer or 'random', got {args.shift!r}")


def _dump_command(args) -> int:
    rng = np.random.default_rng(np.uint64(args.seed))
    if args.variant == "legendre":
        if args.p is None:
            raise ConfigError("legendre dump requires --p")
        oracle = _checked(orc.legendre_oracle, args.p, _parse_dump_shift(args), rng)
    elif args.variant == "jacobi":
        if args.n is None:
            raise ConfigError("jacobi dump requires --n")
        oracle = _checked(orc.jacobi_oracle, args.n, _parse_dump_shift(args), rng)
    elif args.variant == "jacobi-unknown":
        if args.n is None or args.M is None:
            raise ConfigError("jacobi-unknown dump requires --n and --M")
        oracle = _checked(
            orc.jacobi_unknown_oracle, args.n, args.M, _parse_dump_shift(args), rng
        )
    else:
        if args.p is None or args.r is None:
            raise ConfigError("field dump requires --p and --r")
        fld = _checked(_build_field, args)
        if args.shift is None:
            shift = ff.zero(fld)
        elif args.shift == "random":
            shift = None
        else:
            shift = _checked(ff.parse_element, fld, args.shift)
        oracle = _checked(orc.field_oracle, fld, shift, rng)

    if oracle.domain_size > _DUMP_LIMIT:
        raise ConfigError(f"domain of size {oracle.domain_size} exceeds {_DUMP_LIMIT}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "f(x)"])
    for x in range(oracle.domain_size):
        if oracle.variant == orc.VARIANT_FIELD:
            label = ff.format_poly(ff.element_from_index(oracle.field_spec, x))
        else:
            label = x
        writer.writerow([label, oracle.query(x)])
    _write_out(buf.getvalue(), args.out)
    return 0


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.command in ("slsp", "sjsp", "sjsp-unknown", "sqcp"):
            code = _solve_command(args.command, args)
        elif args.command == "gauss":
            code = _gauss_command(args)
        elif args.command == "verify":
            code = _verify_command(args)
        else:
            code = _dump_command(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CharshiftError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3
    log.info("%s finished in %.1f ms", args.command, (time.perf_counter() - start) * 1e3)
    return code


if __name__ == "__main__":
    sys.exit(main())
