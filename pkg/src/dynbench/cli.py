"""``bench`` command line: run, gen, verify.

Exit codes: 0 ok, 1 correctness failure, 2 usage error, 3 algorithm abort.
"""
from __future__ import annotations

import argparse
import sys

from .bench import RunConfig, emit_csv, load_instance, run_group, verify
from .generators import KINDS, GeneratorConfig
from .graph import InvalidUpdate, write_sequence
from .registry import ALGORITHMS, resolve

EXIT_OK, EXIT_INCORRECT, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _algos(values: list[str]) -> list[str]:
    out = []
    for v in values:
        for name in filter(None, v.split(",")):
            if name.lower() == "all":
                out.extend(ALGORITHMS)
                continue
            try:
                out.append(resolve(name))
            except KeyError as exc:
                raise UsageError(exc.args[0]) from None
    return out


def _load(src: str):
    try:
        return load_instance(src)
    except (OSError, ValueError, InvalidUpdate) as exc:
        raise UsageError(f"cannot load instance {src!r}: {exc}") from None


def cmd_run(args) -> int:
    algos = _algos(args.algo)
    if args.parallel and args.timing:
        raise UsageError("--parallel requires --no-timing")
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    configs = []
    for inst in args.instance:
        inst_id, seq = _load(inst)
        for a in algos:
            configs.append(RunConfig(a, seq, repetitions=args.reps, seed=args.seed,
                                     check_every=args.check_every,
                                     include_init=args.include_init, timing=args.timing,
                                     warmup=args.warmup, instance_id=inst_id))
    reports = run_group(configs, parallel=args.parallel)
    text = emit_csv(reports)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for r in reports:
        if r.failed:
            print(f"{r.algorithm} on {r.instance}: {r.reason}", file=sys.stderr)
        elif args.verbose:
            print(f"{r.algorithm} on {r.instance}: {r.counters}", file=sys.stderr)
    if any(r.incorrect for r in reports):
        return EXIT_INCORRECT
    if any(r.failed for r in reports):
        return EXIT_ABORT
    return EXIT_OK


def cmd_gen(args) -> int:
    fields = {k: getattr(args, k) for k in (
        "n", "m", "rho", "phi", "eta", "delta", "count", "updates", "target",
        "target_seed", "gamma", "avg_deg", "path", "seed")}
    fields = {k: v for k, v in fields.items() if v is not None}
    kind = {k.lower(): k for k in KINDS}.get(args.kind.lower())
    if kind is None:
        raise UsageError(f"unknown generator kind {args.kind!r}; known: {', '.join(KINDS)}")
    if args.target is not None:
        try:
            fields["target"] = resolve(args.target)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    try:
        cfg = GeneratorConfig(kind, graph=args.graph, fill=args.fill, **fields)
        seq = cfg.build()
    except (ValueError, OSError, InvalidUpdate) as exc:
        raise UsageError(str(exc)) from None
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8") as fh:
            write_sequence(seq, fh)
    else:
        write_sequence(seq, sys.stdout)
    if seq.meta.get("truncated"):
        print("warning: generator stopped early (graph saturated)", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    algos = _algos(args.algo)
    _, seq = _load(args.instance)
    results = []
    for a in algos:
        res = verify(a, seq, seed=args.seed, full_every=args.full_every, lfmm=args.lfmm)
        print(f"{a}: {'ok' if res.ok else 'FAIL'} after {res.steps} updates "
              f"({res.checks} checks): {res.message}")
        results.append(res)
    if any(not r.ok and not r.aborted for r in results):
        return EXIT_INCORRECT
    if any(r.aborted for r in results):
        return EXIT_ABORT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bench", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="time algorithms on instances, print CSV")
    r.add_argument("--algo", action="append", required=True,
                   help="algorithm id (repeatable, comma lists and 'all' accepted)")
    r.add_argument("--instance", action="append", required=True,
                   help="sequence file, 'temporal:<file>' or gen-spec like "
                        "'random:n=1024,m=65536,rho=0.25,seed=1'")
    r.add_argument("--reps", type=int, default=5)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--check-every", type=int, default=0, metavar="C",
                   help="run oracle checks every C updates (outside timed batches)")
    r.add_argument("--include-init", action="store_true", default=None,
                   help="also time construction and the set-up prefix")
    r.add_argument("--exclude-init", dest="include_init", action="store_false")
    r.add_argument("--no-timing", dest="timing", action="store_false")
    r.add_argument("--no-warmup", dest="warmup", action="store_false")
    r.add_argument("--parallel", action="store_true",
                   help="run configs on threads (only with --no-timing)")
    r.add_argument("--csv", help="write the CSV here instead of stdout")
    r.add_argument("-v", "--verbose", action="store_true")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("gen", help="generate an instance in the text format")
    g.add_argument("--kind", required=True, help=", ".join(KINDS))
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--rho", type=float)
    g.add_argument("--phi", type=int)
    g.add_argument("--eta", type=float)
    g.add_argument("--delta", type=int)
    g.add_argument("--count", type=int)
    g.add_argument("--updates", type=int)
    g.add_argument("--target")
    g.add_argument("--target-seed", type=int)
    g.add_argument("--gamma", type=float)
    g.add_argument("--avg-deg", type=float)
    g.add_argument("--graph", default="ER", choices=["ER", "RHG"])
    g.add_argument("--fill", type=float, default=0.99)
    g.add_argument("--path", help="temporal edge file (kind File)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="oracle-check every update")
    v.add_argument("--algo", action="append", required=True)
    v.add_argument("--instance", required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--full-every", type=int, default=1000)
    v.add_argument("--lfmm", action="store_true",
                   help="also compare rank-based matchings with the greedy LFMM")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
