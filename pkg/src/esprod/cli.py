"""esprod command line: eval, construct, certify-lower, dissociate, scan-interval, spectra.

Exit codes: 0 success, 2 invalid input, 3 resource or convergence failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bounds import dense_lower_cert
from .constructions import best_of, interval_set
from .dissociated import is_dissociated, max_dissociated_greedy
from .errors import (AllocationCap, CapOverflow, DegreeCap, EmptySample, GapNotReached,
                     InvalidInput, SetNotInRange, SumCap)
from .product import certified_sup, read_set_file, sup_norm, write_set_file
from .records import TOOL_VERSION, ExperimentRecord, utc_now, write_records
from .spectra import mobius_inverted_coeff

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3

_RESOURCE_ERRORS = (GapNotReached, DegreeCap, SumCap, AllocationCap, CapOverflow, EmptySample)


def fmt(x: float) -> str:
    return f"{x:.12g}"


def fmt_q(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class _Run:
    """Collects the record of one command invocation."""

    def __init__(self, args, command: str, params: dict):
        self.args = args
        self.command = command
        self.params = params
        self.started = utc_now()
        self.records: list[ExperimentRecord] = []

    def record(self, outputs: dict, command: Optional[str] = None, seed: Optional[int] = None):
        r = ExperimentRecord(command=command or self.command, params=self.params,
                             seed=self.args.seed if seed is None else seed,
                             started_at=self.started, finished_at=utc_now(), outputs=outputs)
        self.records.append(r)
        return r

    def flush(self):
        if getattr(self.args, "log", None):
            write_records(self.args.log, self.records)


def _threads(args) -> Optional[int]:
    return args.threads


# -- commands ---------------------------------------------------------------

def cmd_eval(args) -> int:
    S = read_set_file(args.set_file)
    params = {"set_file": str(args.set_file), "n": S.n, "grid_size": args.grid_size,
              "refine_iters": args.refine_iters, "certified": args.certified, "gap": args.gap}
    run = _Run(args, "eval", params)
    est = sup_norm(S, grid=args.grid_size, refine_iters=args.refine_iters, threads=_threads(args))
    out = {"M": est.value, "log_M": est.log_max_found, "argmax_theta": est.argmax_theta,
           "grid_size": est.grid_size}
    if args.certified:
        try:
            cert = certified_sup(S, target_gap=args.gap, refine_iters=args.refine_iters)
        except GapNotReached as exc:
            if exc.estimate is not None:
                e = exc.estimate
                print(f"gap not reached: bracket [{fmt(e.value)}, {fmt(e.upper)}]", file=sys.stderr)
            raise
        out.update({"M_lower": cert.value, "M_upper": cert.upper,
                    "log_M_lower": cert.log_max_found, "log_M_upper": cert.certified_log_upper,
                    "certified_grid_size": cert.grid_size})
        if cert.log_max_found > est.log_max_found:
            out.update({"M": cert.value, "log_M": cert.log_max_found,
                        "argmax_theta": cert.argmax_theta})
    rec = run.record(out)
    if args.json:
        print(rec.to_json())
    else:
        print(f"M = {fmt(out['M'])}")
        print(f"log M = {fmt(out['log_M'])}")
        print(f"argmax theta = {fmt(out['argmax_theta'])}")
        if args.certified:
            print(f"certified M in [{fmt(out['M_lower'])}, {fmt(out['M_upper'])}]")
    run.flush()
    return EXIT_OK


def cmd_construct(args) -> int:
    if args.n < 2:
        raise InvalidInput("construct needs --n >= 2")
    if args.trials < 1:
        raise InvalidInput("construct needs --trials >= 1")
    params = {"n": args.n, "trials": args.trials, "objective": args.objective,
              "out": str(args.out) if args.out else None}
    run = _Run(args, "construct", params)
    res = best_of(args.n, args.trials, args.seed, eval_opts={"threads": _threads(args)},
                  objective=args.objective)
    for t in res.per_trial:
        rec = run.record({"seed": t.seed, "size": t.size, "log_M": t.log_M,
                          "argmax_theta": t.argmax_theta, "grid_size": t.grid_size},
                         command="construct.trial", seed=t.seed)
        print(rec.to_json())
    full = None
    if args.compare_interval:
        full = sup_norm(interval_set(args.n), threads=_threads(args)).log_max_found
    summary = {"best_seed": res.best.seed, "best_size": res.best.size,
               "best_log_M": res.best_log_M, "trials": res.trials}
    if full is not None:
        summary.update({"interval_log_M": full, "ratio_to_interval": res.best_log_M / full})
    n = args.n
    if n >= 16:
        # report only: log M / (sqrt n sqrt(log n) log log n)
        summary["normalised"] = res.best_log_M / (math.sqrt(n) * math.sqrt(math.log(n))
                                                  * math.log(math.log(n)))
    print(run.record(summary).to_json())
    if args.out:
        write_set_file(args.out, res.best.chosen,
                       header=f"construct n={n} seed={res.best.seed} log_M={fmt(res.best_log_M)}")
    run.flush()
    return EXIT_OK


def _parse_fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"not a rational number: {s!r}") from None


def cmd_certify_lower(args) -> int:
    S = read_set_file(args.set_file)
    theta0 = _parse_fraction(args.theta0) if args.theta0 is not None else None
    R = _parse_fraction(args.R)
    R = int(R) if R.denominator == 1 else float(R)
    try:
        cert = dense_lower_cert(S, args.n, R, theta0=theta0, scan=args.scan)
    except SetNotInRange as exc:
        raise InvalidInput(str(exc)) from None
    run = _Run(args, "certify-lower", {"set_file": str(args.set_file), "n": args.n, "R": args.R,
                                       "theta0": args.theta0, "scan": args.scan})
    out = {"value": cert.value, "theta0": cert.theta0, "term_first": cert.term_first,
           "term_second": cert.term_second, "term_third": cert.term_third,
           "k_max_used": cert.k_max_used}
    rec = run.record(out)
    if args.json:
        print(rec.to_json())
    else:
        print(f"certificate = {fmt(cert.value)}")
        print(f"theta0 = {fmt(cert.theta0)}")
        print(f"first term = {fmt(cert.term_first)}")
        print(f"second term = {fmt(cert.term_second)}")
        print(f"third term = {fmt(cert.term_third)}")
    run.flush()
    return EXIT_OK


def cmd_dissociate(args) -> int:
    S = read_set_file(args.set_file)
    w = is_dissociated(S)
    greedy = max_dissociated_greedy(S, args.order)
    run = _Run(args, "dissociate", {"set_file": str(args.set_file), "order": args.order})
    out = {"verdict": w.verdict, "method": w.method, "greedy_size": greedy.n,
           "greedy_subset": list(greedy.elements)}
    if w.epsilons is not None:
        out["relation"] = w.relation_string()
    rec = run.record(out)
    if args.json:
        print(rec.to_json())
    else:
        line = w.verdict
        if w.verdict == "relation" and args.witness:
            line += " " + w.relation_string()
        print(line)
        print(f"greedy {args.order} dissociated subset size = {greedy.n}")
    run.flush()
    return EXIT_OK


def cmd_scan_interval(args) -> int:
    if args.n_from < 1 or args.n_to < args.n_from:
        raise InvalidInput("need 1 <= --n-from <= --n-to")
    run = _Run(args, "scan-interval", {"n_from": args.n_from, "n_to": args.n_to})
    if not args.json:
        print("n,M,M_root,log_M")
    for n in range(args.n_from, args.n_to + 1):
        est = sup_norm(interval_set(n), threads=_threads(args))
        root = math.exp(est.log_max_found / n)
        if args.json:
            print(run.record({"n": n, "M": est.value, "M_root": root,
                              "log_M": est.log_max_found}).to_json())
        else:
            run.record({"n": n, "M": est.value, "M_root": root, "log_M": est.log_max_found})
            print(f"{n},{fmt(est.value)},{fmt(root)},{fmt(est.log_max_found)}")
    run.flush()
    return EXIT_OK


def cmd_spectra(args) -> int:
    if args.t < 1:
        raise InvalidInput("--t must be >= 1 (the coefficient at 0 is identically 0)")
    if args.r < 1:
        raise InvalidInput("--r must be >= 1")
    S = read_set_file(args.set_file)
    c = mobius_inverted_coeff(S, args.t, args.r)
    run = _Run(args, "spectra", {"set_file": str(args.set_file), "t": args.t, "r": args.r})
    vals = {"H_hat": c.H_hat, "f_hat": c.f_hat, "G_hat": c.G_hat, "G_hat_bound": c.G_hat_bound}
    rec = run.record({k: fmt_q(v) for k, v in vals.items()})
    if args.json:
        print(rec.to_json())
    else:
        for k, v in vals.items():
            print(f"{k} = {fmt_q(v)} ({fmt(float(v))})")
    run.flush()
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--threads", type=int, default=d if suppress else None,
                   help="worker threads for grid scans (default: all cores)")
    p.add_argument("--seed", type=int, default=d if suppress else 0,
                   help="seed recorded with every run; construct draws from it")
    p.add_argument("--log", type=Path, default=d if suppress else None,
                   help="append ExperimentRecords to this JSONL file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esprod", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=TOOL_VERSION)
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        _common(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "estimate M(S) for a set file")
    p.add_argument("set_file", type=Path)
    p.add_argument("--grid-size", type=int, default=None)
    p.add_argument("--refine-iters", type=int, default=64)
    p.add_argument("--certified", action="store_true")
    p.add_argument("--gap", type=float, default=1e-6)
    p.add_argument("--json", action="store_true")

    p = add("construct", cmd_construct, "best-of-K random selector sets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--objective", choices=("logM", "logM_per_sqrt"), default="logM")
    p.add_argument("--compare-interval", action="store_true",
                   help="also measure log M({1..n}) and report the ratio")

    p = add("certify-lower", cmd_certify_lower, "Fejer-convolution lower certificate")
    p.add_argument("set_file", type=Path)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", default="8")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--theta0", default=None, help="rational angle p/q")
    g.add_argument("--scan", action="store_true")
    p.add_argument("--json", action="store_true")

    p = add("dissociate", cmd_dissociate, "dissociation test and greedy subset")
    p.add_argument("set_file", type=Path)
    p.add_argument("--order", choices=("ascending", "descending"), default="ascending")
    p.add_argument("--witness", action="store_true")
    p.add_argument("--json", action="store_true")

    p = add("scan-interval", cmd_scan_interval, "M(1..n) and M(1..n)^(1/n) over a range")
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--json", action="store_true")

    p = add("spectra", cmd_spectra, "exact Mobius-inverted Fourier coefficients")
    p.add_argument("set_file", type=Path)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--json", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help/--version, 2 on usage errors
        return int(exc.code or 0)
    if args.threads is not None and args.threads < 1:
        print("esprod: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except _RESOURCE_ERRORS as exc:
        print(f"esprod: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidInput, SetNotInRange, ValueError) as exc:
        print(f"esprod: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
