"""Command-line front end.

Subcommands: gen (workload file), build (offline schedule CSV), sim (online
run, trace JSONL), grid (experiment sweep with figure CSVs and PNGs), and
validate (trace replay check). Exit codes: 0 success, 1 usage/config error,
2 infeasible schedule or invalid trace.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .errors import MyoschedError
from .experiments import emit_figure_data, load_grid_config, run_grid, write_results_json
from .heuristics import parse_heuristic
from .offline import UNBOUNDED, BuildConfig, OnInfeasible, build, save_schedule
from .sim import OverheadModel, SimConfig, load_trace, save_trace, simulate, validate_outcome
from .workload import WorkloadParams, generate, load_workload, save_workload

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2  # infeasible build / invalid trace


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; keep 2 reserved for negative outcomes
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _span(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from None


def _window(text: str):
    if text.lower() == "unbounded":
        return UNBOUNDED
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"window size must be an integer or 'unbounded', got {text!r}"
        ) from None


def _heuristic(text: str):
    try:
        return parse_heuristic(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _build_cli() -> _Parser:
    parser = _Parser(prog="myosched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[], help="generate a random workload file")
    p.add_argument("-n", type=int, required=True, help="number of tasks")
    p.add_argument("--proc", type=_span, required=True, metavar="LO..HI",
                   help="inclusive processing-time range")
    p.add_argument("--laxity", type=int, required=True, help="constant slack added to deadlines")
    p.add_argument("--arrival", type=_span, default=(0, 3), metavar="LO..HI",
                   help="inter-arrival gap range (default 0..3)")
    p.add_argument("--resources", type=int, default=3, help="distinct resources (default 3)")
    p.add_argument("--request-prob", type=float, default=0.2,
                   help="per-resource request probability (default 0.2)")
    p.add_argument("--share-prob", type=float, default=0.5,
                   help="probability a request is shared (default 0.5)")
    p.add_argument("--seed", type=int, default=0, help="generation seed (default 0)")
    p.add_argument("-o", "--out", required=True, help="output workload file")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("build", help="build a complete offline schedule")
    p.add_argument("workload", help="input workload file")
    p.add_argument("--k", type=_window, default=UNBOUNDED,
                   help="window size or 'unbounded' (default unbounded)")
    p.add_argument("--heuristic", type=_heuristic, default=parse_heuristic("d+w*est:0.5"),
                   help="selection heuristic (default d+w*est:0.5)")
    p.add_argument("--max-backtracks", type=int, default=None,
                   help="backtrack budget (default 10*n)")
    p.add_argument("--abort", action="store_true",
                   help="abort instead of backtracking on infeasibility")
    p.add_argument("-o", "--out", required=True, help="output schedule CSV")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("sim", help="simulate online dispatch with overhead")
    p.add_argument("workload", help="input workload file")
    p.add_argument("--k", type=int, required=True, help="window size (>= 1)")
    p.add_argument("--heuristic", type=_heuristic, default=parse_heuristic("d+w*est:0.5"),
                   help="selection heuristic (default d+w*est:0.5)")
    p.add_argument("--c0", type=int, default=1, help="fixed overhead per decision (default 1)")
    p.add_argument("--c1", type=int, default=1, help="overhead per considered task (default 1)")
    p.add_argument("--horizon", type=int, default=None, help="optional simulation end time")
    p.add_argument("--trace", default=None, help="write the event trace (JSON lines)")
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("grid", help="run an experiment grid from a JSON config")
    p.add_argument("--config", required=True, help="grid config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override base_seed")
    p.add_argument("--independent-seeds", action="store_true",
                   help="re-randomize workloads per (k, w) cell instead of pairing")
    p.add_argument("--no-plots", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("validate", help="replay-check a trace against its workload")
    p.add_argument("--workload", required=True)
    p.add_argument("--trace", required=True)
    p.set_defaults(func=_cmd_validate)

    return parser


def _cmd_gen(args) -> int:
    params = WorkloadParams(
        n=args.n,
        proc_range=args.proc,
        laxity=args.laxity,
        arrival_span=args.arrival,
        n_resources=args.resources,
        request_prob=args.request_prob,
        share_prob=args.share_prob,
    )
    ts = generate(params, args.seed)
    save_workload(ts, args.out)
    print(f"tasks={len(ts)} seed={args.seed} out={args.out}")
    return EXIT_OK


def _cmd_build(args) -> int:
    ts = load_workload(args.workload)
    cfg = BuildConfig(
        spec=args.heuristic,
        k=args.k,
        max_backtracks=0 if args.abort else args.max_backtracks,
        on_infeasible=OnInfeasible.ABORT if args.abort else OnInfeasible.BACKTRACK,
    )
    result = build(ts, cfg)
    save_schedule(result, ts, args.out)
    outcome = "feasible" if result.feasible else "infeasible"
    k_text = "unbounded" if args.k is UNBOUNDED else str(args.k)
    print(
        f"outcome={outcome} k={k_text} scheduled={result.partial_len} "
        f"h_evals={result.h_evals} feas_checks={result.feas_checks} "
        f"backtracks={result.backtracks_used}"
    )
    return EXIT_OK if result.feasible else EXIT_NEGATIVE


def _cmd_sim(args) -> int:
    ts = load_workload(args.workload)
    cfg = SimConfig(
        spec=args.heuristic,
        k=args.k,
        overhead=OverheadModel(args.c0, args.c1),
        horizon=args.horizon,
    )
    outcome = simulate(ts, cfg)
    if args.trace:
        save_trace(outcome, args.trace)
    print(
        f"completed={outcome.completed} discarded={outcome.discarded} "
        f"makespan={outcome.makespan} overhead_total={outcome.overhead_total} "
        f"cut={'true' if outcome.cut else 'false'}"
    )
    return EXIT_OK


def _cmd_grid(args) -> int:
    grid = load_grid_config(args.config)
    if args.seed is not None:
        grid = dataclasses.replace(grid, base_seed=args.seed)
    if args.independent_seeds:
        grid = dataclasses.replace(grid, independent_seeds=True)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    results = run_grid(grid)
    write_results_json(grid, results, outdir / "results.json")
    csvs = emit_figure_data(results, outdir)
    pngs = []
    if not args.no_plots:
        from .figures import render_figures

        pngs = render_figures(results, outdir)
    failed = sum(1 for r in results if r.error is not None)
    print(
        f"conditions={len(results)} failed={failed} csv={len(csvs)} png={len(pngs)} "
        f"out={outdir}"
    )
    return EXIT_OK


def _cmd_validate(args) -> int:
    ts = load_workload(args.workload)
    outcome = load_trace(args.trace)
    violation = validate_outcome(ts, outcome)
    if violation is None:
        print("valid=true")
        return EXIT_OK
    print("valid=false")
    print(f"violation: {violation}", file=sys.stderr)
    return EXIT_NEGATIVE


def main(argv=None) -> int:
    parser = _build_cli()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MyoschedError as exc:
        print(f"myosched: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"myosched: io error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
