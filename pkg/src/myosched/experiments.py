"""Experiment grid: seeded replications over (load, processing time, K, W).

Replication seeds are derived from (base_seed, n, proc_range, rep) only, so
every (k, w) cell of a row sees the identical task set and window/weight
effects are measured paired. The --independent-seeds switch folds (k, w)
into the seed instead, restoring unpaired randomness.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ConfigurationError, WorkloadFormatError
from .heuristics import HeuristicKind, HeuristicSpec, format_heuristic, format_weight
from .sim import OverheadModel, SimConfig, simulate
from .workload import PRNG_ALGORITHM, WorkloadParams, generate

FIGURE_HEADER = "# myosched-figure v1"
RESULTS_FORMAT = "myosched-results v1"


@dataclass(frozen=True)
class ExperimentGrid:
    loads: tuple[int, ...]
    proc_ranges: tuple[tuple[int, int], ...]
    laxity: int
    ks: tuple[int, ...]
    ws: tuple[Fraction, ...]
    spec_kind: HeuristicKind = HeuristicKind.DEADLINE_PLUS_WEIGHTED_EST
    replications: int = 5
    base_seed: int = 0
    overhead: OverheadModel = field(default_factory=OverheadModel)
    independent_seeds: bool = False
    allow_k1: bool = False  # window size 1 degenerates to plain EDF; off by default

    def __post_init__(self):
        if not self.loads or not self.proc_ranges or not self.ks or not self.ws:
            raise ConfigurationError("grid axes must be non-empty")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        floor = 1 if self.allow_k1 else 2
        for k in self.ks:
            if k < floor:
                raise ConfigurationError(
                    f"window size {k} below {floor} (set allow_k1 to include 1)"
                )
        object.__setattr__(self, "ws", tuple(Fraction(w) for w in self.ws))


@dataclass(frozen=True)
class RepOutcome:
    seed: int
    completed: int
    discarded: int
    makespan: int
    overhead_total: int


@dataclass(frozen=True)
class ConditionResult:
    n: int
    proc_range: tuple[int, int]
    k: int
    w: Fraction
    per_rep: tuple[RepOutcome, ...]
    mean_completed: float
    min_completed: int
    max_completed: int
    error: str | None = None


def condition_seed(
    base_seed: int,
    n: int,
    proc_range: tuple[int, int],
    rep: int,
    k: int | None = None,
    w: Fraction | None = None,
) -> int:
    """Stable across runs and platforms (sha256, not the salted builtin hash)."""
    parts = [str(base_seed), str(n), f"{proc_range[0]}..{proc_range[1]}", str(rep)]
    if k is not None:
        parts.append(f"k={k}")
    if w is not None:
        parts.append(f"w={Fraction(w)}")
    digest = hashlib.sha256("|".join(parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _workload_params(grid: ExperimentGrid, n: int, proc_range: tuple[int, int]) -> WorkloadParams:
    # resource requests off: the window/weight experiments do not vary them
    return WorkloadParams(n=n, proc_range=proc_range, laxity=grid.laxity, request_prob=0.0)


def run_grid(grid: ExperimentGrid) -> list[ConditionResult]:
    """All (n, proc_range, k, w) conditions, each with `replications` runs.

    Deterministic; a condition that raises is recorded with its error and
    the sweep continues.
    """
    results = []
    for n in grid.loads:
        for proc_range in grid.proc_ranges:
            tasksets = None
            if not grid.independent_seeds:
                params = _workload_params(grid, n, proc_range)
                tasksets = [
                    generate(params, condition_seed(grid.base_seed, n, proc_range, rep))
                    for rep in range(grid.replications)
                ]
            for k in grid.ks:
                for w in grid.ws:
                    results.append(_run_condition(grid, n, proc_range, k, w, tasksets))
    return results


def _run_condition(grid, n, proc_range, k, w, tasksets) -> ConditionResult:
    cfg = SimConfig(spec=HeuristicSpec(grid.spec_kind, w), k=k, overhead=grid.overhead)
    per_rep = []
    try:
        for rep in range(grid.replications):
            if tasksets is not None:
                ts = tasksets[rep]
            else:
                seed = condition_seed(grid.base_seed, n, proc_range, rep, k=k, w=w)
                ts = generate(_workload_params(grid, n, proc_range), seed)
            outcome = simulate(ts, cfg)
            per_rep.append(
                RepOutcome(ts.seed, outcome.completed, outcome.discarded,
                           outcome.makespan, outcome.overhead_total)
            )
    except Exception as exc:  # record, do not abort the sweep
        return ConditionResult(n, proc_range, k, w, tuple(per_rep), 0.0, 0, 0, error=str(exc))
    completed = [r.completed for r in per_rep]
    return ConditionResult(
        n, proc_range, k, w,
        tuple(per_rep),
        mean_completed=sum(completed) / len(completed),
        min_completed=min(completed),
        max_completed=max(completed),
    )


def group_conditions(results) -> list[tuple[tuple[int, tuple[int, int], Fraction], list[ConditionResult]]]:
    """Figure groups: one per (n, proc_range, w), rows sorted by k."""
    groups: dict = {}
    for res in results:
        groups.setdefault((res.n, res.proc_range, res.w), []).append(res)
    out = []
    for key in sorted(groups, key=lambda g: (g[0], g[1], g[2])):
        out.append((key, sorted(groups[key], key=lambda r: r.k)))
    return out


def figure_basename(n: int, proc_range: tuple[int, int], w: Fraction) -> str:
    w_text = format_weight(w).replace("/", "-")
    return f"completed_n{n}_proc{proc_range[0]}-{proc_range[1]}_w{w_text}"


def emit_figure_data(results, outdir) -> list[Path]:
    """One CSV per (n, proc_range, w) group: rows k, rep_1..rep_R, mean."""
    if not results:
        raise ConfigurationError("no condition results to emit")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for (n, proc_range, w), rows in group_conditions(results):
        rows = [r for r in rows if r.error is None]
        if not rows:
            continue
        reps = len(rows[0].per_rep)
        path = outdir / f"{figure_basename(n, proc_range, w)}.csv"
        lines = [
            FIGURE_HEADER,
            f"# n={n} proc={proc_range[0]}..{proc_range[1]} w={format_weight(w)} prng={PRNG_ALGORITHM}",
            ",".join(["k"] + [f"rep_{i + 1}" for i in range(reps)] + ["mean"]),
        ]
        for res in rows:
            cells = [str(res.k)] + [str(r.completed) for r in res.per_rep]
            cells.append(repr(res.mean_completed))
            lines.append(",".join(cells))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


# --- grid config and results files ------------------------------------------


def load_grid_config(path) -> ExperimentGrid:
    """JSON config with field names matching ExperimentGrid."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise WorkloadFormatError(f"bad grid config: {exc}") from None
    try:
        overhead = raw.get("overhead", {})
        grid = ExperimentGrid(
            loads=tuple(int(x) for x in raw["loads"]),
            proc_ranges=tuple((int(lo), int(hi)) for lo, hi in raw["proc_ranges"]),
            laxity=int(raw["laxity"]),
            ks=tuple(int(x) for x in raw["ks"]),
            ws=tuple(Fraction(str(x)) for x in raw["ws"]),
            spec_kind=HeuristicKind(raw.get("spec_kind", "d+w*est")),
            replications=int(raw.get("replications", 5)),
            base_seed=int(raw.get("base_seed", 0)),
            overhead=OverheadModel(int(overhead.get("c0", 1)), int(overhead.get("c1", 1))),
            independent_seeds=bool(raw.get("independent_seeds", False)),
            allow_k1=bool(raw.get("allow_k1", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WorkloadFormatError(f"bad grid config: {exc!r}") from None
    return grid


def write_results_json(grid: ExperimentGrid, results, path) -> None:
    payload = {
        "format": RESULTS_FORMAT,
        "prng": PRNG_ALGORITHM,
        "grid": {
            "loads": list(grid.loads),
            "proc_ranges": [list(pr) for pr in grid.proc_ranges],
            "laxity": grid.laxity,
            "ks": list(grid.ks),
            "ws": [format_weight(w) for w in grid.ws],
            "spec_kind": grid.spec_kind.value,
            "replications": grid.replications,
            "base_seed": grid.base_seed,
            "overhead": {"c0": grid.overhead.c0, "c1": grid.overhead.c1},
            "independent_seeds": grid.independent_seeds,
        },
        "conditions": [
            {
                "n": r.n,
                "proc_range": list(r.proc_range),
                "k": r.k,
                "w": format_weight(r.w),
                "heuristic": format_heuristic(HeuristicSpec(grid.spec_kind, r.w)),
                "per_rep": [
                    {
                        "seed": rep.seed,
                        "completed": rep.completed,
                        "discarded": rep.discarded,
                        "makespan": rep.makespan,
                        "overhead_total": rep.overhead_total,
                    }
                    for rep in r.per_rep
                ],
                "mean_completed": r.mean_completed,
                "min_completed": r.min_completed,
                "max_completed": r.max_completed,
                "error": r.error,
            }
            for r in results
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
