"""
Command-line front end.

    turnstile-lab gen {ind,bind,stream,graph} --seed S [--n N --k K --m M] [--out DIR]
    turnstile-lab verify CAMPAIGN --seed S [--n N --k K --C C --trials T] [--csv FILE]
    turnstile-lab protocol {matching,vc} --seed S ... [--csv FILE]
    turnstile-lab matching-protocol --n --k --C --runs --alg --trials --seed --csv
    turnstile-lab vc-protocol --n --epsilon --runs --alg --trials --seed --csv
    turnstile-lab space-curve --alg A --ns 64 128 ... --seed S [--param epsilon=0.5]

Exit codes: 0 all checks pass, 1 a bound is violated, 2 configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys

from .algorithms import make_algorithm, parse_params
from .graphs import CapacityError
from .harness import (
    RATE_TOLERANCE,
    VERIFIERS,
    all_pass,
    generate_fixtures,
    run_protocol,
    space_curve,
    write_rows,
)
from .matching_reduction import asymptotic_parameters

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--csv", help="write result rows here")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=RATE_TOLERANCE, help="absolute slack on rates")
    return p


def _protocol_args(p):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--C", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--runs", type=int)
    p.add_argument("--alg", default=None)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--min-success", type=float, default=0.9)
    p.add_argument("--summary-csv", help="one aggregate row per run of the command")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="turnstile-lab", description=__doc__.split("\n")[1])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write deterministic fixtures")
    g.add_argument("kind", choices=["ind", "bind", "stream", "graph"])
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--k", type=int, default=4)
    g.add_argument("--m", type=int, default=25)
    g.add_argument("--out", default=".")

    v = sub.add_parser("verify", parents=[common], help="run a verification campaign")
    v.add_argument("campaign", choices=sorted(VERIFIERS))
    v.add_argument("--n", type=int, default=64)
    v.add_argument("--k", type=int, default=48)
    v.add_argument("--C", type=float, default=1.0)
    v.add_argument("--trials", type=int, default=200)

    pr = sub.add_parser("protocol", parents=[common], help="end-to-end protocol trials")
    pr.add_argument("kind", choices=["matching", "vc"])
    _protocol_args(pr)
    for name, kind in (("matching-protocol", "matching"), ("vc-protocol", "vc")):
        alias = sub.add_parser(name, parents=[common], help=f"same as 'protocol {kind}'")
        _protocol_args(alias)
        alias.set_defaults(kind=kind)

    sc = sub.add_parser("space-curve", parents=[common], help="snapshot bits versus n")
    sc.add_argument("--alg", default="group-contraction")
    sc.add_argument("--ns", type=int, nargs="+", default=[64, 128, 256, 512])
    sc.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    return ap


def _resolve_protocol(args):
    """Fill k, C, runs and the algorithm factory from whatever was given."""
    params = parse_params(args.param)
    n = args.n
    if args.epsilon is not None:
        C, k_default = asymptotic_parameters(n, args.epsilon)
        C = args.C if args.C is not None else C
    else:
        C, k_default = (args.C if args.C is not None else 1.0), None
    k = args.k if args.k is not None else k_default
    if k is None:
        raise ValueError("give --k or --epsilon")
    name = args.alg or ("storeall" if args.kind == "matching" else "group-contraction")
    if name == "group-contraction":
        if args.epsilon is None and "epsilon" not in params:
            raise ValueError("group-contraction needs --epsilon or --param epsilon=...")
        params.setdefault("epsilon", args.epsilon)
    alg = make_algorithm(name, **params)
    return n, k, C, alg, name, params


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            for path in generate_fixtures(args.kind, args.out, args.seed, n=args.n, k=args.k, m=args.m):
                print(path)
            return EXIT_OK

        if args.command == "verify":
            kw = dict(n=args.n, k=args.k, C=args.C, trials=args.trials, seed=args.seed, tolerance=args.tolerance)
            if args.campaign == "cover-rate":
                kw["epsilon"] = math.log(args.C, args.n) if args.C > 1 else 1.0
            rows = VERIFIERS[args.campaign](**kw)

        elif args.command == "space-curve":
            points, rows = space_curve(args.alg, args.ns, args.seed, **parse_params(args.param))
            for n, bits in points:
                print(f"{n},{bits}")
            if args.csv:
                write_rows([{"n": n, "bits": b} for n, b in points], args.csv)

        else:
            n, k, C, alg, name, params = _resolve_protocol(args)
            trial_rows = []
            rows, stats = run_protocol(
                args.kind, n, k, args.trials, args.seed, alg, C=C, runs=args.runs,
                min_success=args.min_success, workers=args.threads, trial_rows=trial_rows,
            )
            if args.csv:
                write_rows(trial_rows, args.csv)
            if args.summary_csv:
                write_rows([{
                    "protocol_id": args.kind, "n": n, "k": k,
                    "params": ";".join(f"{a}={b}" for a, b in sorted({"alg": name, "C": C, **params}.items())),
                    "trials": stats.trials, "successes": stats.successes,
                    "mean_bits": stats.mean_bits, "max_bits": stats.max_bits, "seed": args.seed,
                }], args.summary_csv)
    except (ValueError, CapacityError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for r in rows:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag} {r.experiment} {r.metric} observed={r.observed:g} bound={r.bound:g} margin={r.margin:g} [{r.params}]")
    if args.command == "verify" and args.csv:
        write_rows(rows, args.csv)
    return EXIT_OK if all_pass(rows) else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
