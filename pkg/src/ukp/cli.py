"""``ukp`` command line: solve, analyze, generate, bench and colgen.

Exit codes: 0 success, 1 usage error, 2 input error, 3 timeout, 4 internal error.
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from pathlib import Path

from . import __version__
from .bench import SOLVERS, format_summary, run_matrix, summarize, write_report
from .colgen import ColGenConfig, column_generation, parse_bpp_instance, write_trace
from .core import InstanceError, checksum, parse_ukp_instance, render_ukp_instance
from .dominance import periodicity_bound, remove_dominated
from .dp import solve_oso, solve_tso
from .gen import DISTRIBUTIONS, PRESETS, GenSpec

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_TIMEOUT, EXIT_INTERNAL = range(5)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror or exc}") from None


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _report(args, result: dict, text: str | None = None) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    doc = {"version": __version__, "config": config}
    if text is not None:
        doc["checksum"] = checksum(text)
    doc.update(result)
    return doc


def cmd_solve(args) -> int:
    text = _read_text(args.file)
    inst = parse_ukp_instance(text)
    if args.no_tiebreak:
        if args.alg not in ("oso", "tso"):
            raise UsageError("--no-tiebreak applies to oso and tso only")
        solver = solve_oso if args.alg == "oso" else solve_tso
        out = solver(inst, args.timeout, tiebreak=False)
    else:
        out = SOLVERS[args.alg](inst, args.timeout)
    result = out.to_json()
    if not args.stats:
        result.pop("stats")
    _emit(_report(args, result, text), args.out)
    return EXIT_OK if out.finished else EXIT_TIMEOUT


def cmd_analyze(args) -> int:
    text = _read_text(args.file)
    inst = parse_ukp_instance(text)
    result: dict = {}
    if args.dominance:
        rep = remove_dominated(inst, args.dominance)
        result.update(removed_count=len(rep.removed), survivor_count=len(rep.survivors),
                      removed=rep.removed, dominance_s=round(rep.elapsed, 6))
    if args.periodicity:
        pb = periodicity_bound(inst)
        result.update(y_dprime=pb.y_dprime, reduced_capacity=pb.reduced_capacity,
                      best_item_index=pb.best_item_index, fill_copies=pb.fill_copies)
    if not result:
        raise UsageError("analyze needs --dominance and/or --periodicity")
    _emit(_report(args, result, text), args.out)
    return EXIT_OK


_GEN_PARAMS = ("w_min", "w_max", "c_min", "c_max", "alpha", "max_value")


def cmd_generate(args) -> int:
    if args.preset:
        spec = GenSpec.from_preset(args.preset, args.n, args.seed)
        if args.dist and args.dist != spec.distribution:
            raise UsageError(f"preset {args.preset} uses --dist {spec.distribution}")
    else:
        if not args.dist or args.n is None:
            raise UsageError("generate needs --dist and --n, or --preset")
        spec = GenSpec(args.dist, args.n, args.seed)
    for name in _GEN_PARAMS:
        value = getattr(args, name)
        if value is not None:
            spec.params[name] = value
    if args.c_range:
        spec.params["c_range"] = tuple(args.c_range)
    try:
        inst = spec.generate()
    except KeyError as exc:
        raise UsageError(f"--{exc.args[0].replace('_', '-')} is required for {spec.distribution}")
    except TypeError as exc:
        raise UsageError(f"parameter not accepted by {spec.distribution}: {exc}")
    text = render_ukp_instance(inst)
    Path(args.output).write_text(text, encoding="utf-8")
    doc = _report(args, {"output": args.output, "n": inst.n, "capacity": inst.capacity,
                         "spec": {"distribution": spec.distribution, "n": spec.n,
                                  "seed": spec.seed, "params": spec.params}}, text)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    files = sorted({f for pattern in args.instances for f in glob.glob(pattern)})
    if not files:
        raise InstanceError("no instance files match " + " ".join(args.instances))
    algs = [a.strip() for a in args.algs.split(",") if a.strip()]
    unknown = [a for a in algs if a not in SOLVERS]
    if unknown:
        raise UsageError(f"unknown algorithm(s): {', '.join(unknown)}")
    rows = run_matrix(files, algs, args.timeout, args.reps, args.parallel)
    config = {k: v for k, v in vars(args).items() if k != "func"}
    config["files"] = {f: checksum(Path(f).read_bytes()) for f in files}
    summary = summarize(rows)
    if args.out:
        write_report(rows, args.out, config)
    if args.format == "json":
        doc = {"version": __version__, "config": config,
               "summary": [{"dataset": d, "algorithm": a, **s}
                           for (d, a), s in sorted(summary.items())]}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(format_summary(summary) + "\n")
    return EXIT_OK


def cmd_colgen(args) -> int:
    text = _read_text(args.file)
    inst = parse_bpp_instance(text)
    try:
        config = ColGenConfig(args.pricer, args.sort, args.profit, timeout=args.timeout)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    state = column_generation(inst, config)
    if args.trace:
        write_trace(state, args.trace)
    _emit(_report(args, state.to_json(), text), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--timeout", type=float, default=None, help="seconds per solve")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = _Parser(prog="ukp", description="Unbounded knapsack solvers and experiments.")
    parser.add_argument("--version", action="version", version=f"ukp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="solve one instance file")
    p.add_argument("file")
    p.add_argument("--alg", choices=sorted(SOLVERS), default="tso")
    p.add_argument("--stats", action="store_true", help="include work counters")
    p.add_argument("--no-tiebreak", action="store_true",
                   help="disable the equal-profit tiebreak (oso/tso)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", parents=[common], help="dominance and periodicity report")
    p.add_argument("file")
    p.add_argument("--dominance", choices=("simple", "multiple", "collective"))
    p.add_argument("--periodicity", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", parents=[common], help="write a seeded instance file")
    p.add_argument("--dist", choices=DISTRIBUTIONS)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--w-min", type=int)
    p.add_argument("--w-max", type=int)
    p.add_argument("--c-min", type=int)
    p.add_argument("--c-max", type=int)
    p.add_argument("--c-range", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--alpha", type=int)
    p.add_argument("--max-value", type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", parents=[common], help="run a solver x instance matrix")
    p.add_argument("--instances", nargs="+", required=True, help="glob(s) of instance files")
    p.add_argument("--algs", default="oso,tso,gfdp,mtu1,mtu2")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--parallel", type=int, default=None,
                   help="worker processes (default: serial)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("colgen", parents=[common], help="LP bound for a BPP/CSP file")
    p.add_argument("file")
    p.add_argument("--pricer", choices=("oso", "mtu1"), default="oso")
    p.add_argument("--sort", choices=("efficiency", "weight"), default="efficiency")
    p.add_argument("--profit", choices=("native", "scaled"), default="scaled")
    p.add_argument("--trace", default=None, help="per-iteration CSV")
    p.set_defaults(func=cmd_colgen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"ukp: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceError as exc:
        print(f"ukp: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TimeoutError as exc:
        print(f"ukp: timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except Exception as exc:
        print(f"ukp: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
