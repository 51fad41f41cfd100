"""Full-schedule construction with window-limited lookahead and backtracking.

The builder adds one task per step. Each step scores the first N_K tasks
of the deadline-sorted remaining list (N_K = min(k, remaining); an
unbounded k scores them all), places the best-scoring one at its earliest
start, and keeps it only if every task still visible in the window could
meet its deadline afterwards. A rejected choice is forbidden at that step
and the next-best window candidate is tried; when a step runs out of
candidates the most recent commit is undone and its choice forbidden one
level up (chronological backtracking, bounded by a total budget).
"""

from __future__ import annotations

import enum
from bisect import insort
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .heuristics import HeuristicSpec, eval_h
from .resources import AvailabilityTable, commit, earliest_start
from .workload import Task, TaskSet

SCHEDULE_HEADER = "# myosched-schedule v1"

#: Window-size sentinel naming the full-lookahead (original) algorithm.
UNBOUNDED = None


class OnInfeasible(enum.Enum):
    ABORT = "abort"
    BACKTRACK = "backtrack"


@dataclass(frozen=True)
class ScheduledEntry:
    task_id: int
    start: int
    finish: int


@dataclass(frozen=True)
class BuildConfig:
    spec: HeuristicSpec
    k: int | None = UNBOUNDED
    max_backtracks: int | None = None  # None resolves to 10 * n at build time
    on_infeasible: OnInfeasible = OnInfeasible.BACKTRACK

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ConfigurationError(f"window size must be >= 1 or UNBOUNDED, got {self.k}")
        if self.max_backtracks is not None and self.max_backtracks < 0:
            raise ConfigurationError("max_backtracks must be >= 0")
        if self.on_infeasible is OnInfeasible.ABORT and self.max_backtracks not in (None, 0):
            raise ConfigurationError("max_backtracks must be 0 when aborting on infeasibility")


@dataclass
class SchedulerState:
    tasks: tuple[Task, ...]  # indexable by id (ids are dense)
    k: int | None
    partial: list[ScheduledEntry] = field(default_factory=list)
    remaining: list[int] = field(default_factory=list)  # ids, ascending (t_deadline, id)
    avail: AvailabilityTable = field(default_factory=AvailabilityTable)
    h_evals: int = 0
    feas_checks: int = 0
    backtracks_used: int = 0


@dataclass(frozen=True)
class BuildResult:
    feasible: bool
    schedule: tuple[ScheduledEntry, ...]  # complete when feasible, else empty
    partial_len: int
    h_evals: int
    feas_checks: int
    backtracks_used: int


def initial_state(ts: TaskSet, k: int | None) -> SchedulerState:
    tasks = tuple(sorted(ts.tasks, key=lambda t: t.id))
    remaining = sorted((t.id for t in tasks), key=lambda i: (tasks[i].t_deadline, i))
    return SchedulerState(
        tasks=tasks, k=k, remaining=remaining, avail=AvailabilityTable.for_tasks(ts)
    )


def window(state: SchedulerState) -> list[int]:
    """First min(k, remaining) ids of the deadline-sorted remaining list."""
    if not state.remaining:
        raise ValueError("window of an empty remaining set")
    if state.k is UNBOUNDED:
        return list(state.remaining)
    return state.remaining[: state.k]


def strongly_feasible(
    state: SchedulerState, after: tuple[int, int] | None = None
) -> bool:
    """Could every window task still meet its deadline?

    With ``after=(task_id, start)`` the check runs against the state as it
    would look once that task is committed. Each window task is tested
    independently against the (speculative) availability; partial/remaining
    are never mutated, only the feas_checks counter advances.
    """
    avail = state.avail
    remaining = state.remaining
    if after is not None:
        task_id, start = after
        avail = commit(state.tasks[task_id], start, avail)
        remaining = [i for i in remaining if i != task_id]
    if not remaining:
        return True
    n_k = len(remaining) if state.k is UNBOUNDED else min(state.k, len(remaining))
    for tid in remaining[:n_k]:
        state.feas_checks += 1
        task = state.tasks[tid]
        if earliest_start(task, avail) + task.t_proc > task.t_deadline:
            return False
    return True


def build(ts: TaskSet, cfg: BuildConfig) -> BuildResult:
    """Construct a complete schedule, or report how far construction got.

    Deterministic for a given (ts, cfg): candidate order is fixed by exact
    heuristic values with (deadline, id) tie-breaks, and the backtracking
    walk is a depth-first traversal with per-step forbidden sets.
    """
    state = initial_state(ts, cfg.k)
    max_backtracks = cfg.max_backtracks
    if max_backtracks is None:
        max_backtracks = 0 if cfg.on_infeasible is OnInfeasible.ABORT else 10 * len(ts)

    forbidden: list[set[int]] = [set()]  # per depth, choices ruled out at that step
    avail_stack: list[AvailabilityTable] = [state.avail]

    def result(feasible: bool) -> BuildResult:
        return BuildResult(
            feasible=feasible,
            schedule=tuple(state.partial) if feasible else (),
            partial_len=len(state.partial),
            h_evals=state.h_evals,
            feas_checks=state.feas_checks,
            backtracks_used=state.backtracks_used,
        )

    while state.remaining:
        depth = len(state.partial)
        candidates = [tid for tid in window(state) if tid not in forbidden[depth]]
        failed_choice = None
        if candidates:
            scored = []
            for tid in candidates:
                task = state.tasks[tid]
                est = earliest_start(task, state.avail)
                state.h_evals += 1
                scored.append((eval_h(task, est, cfg.spec).h, task.t_deadline, tid, est))
            _, _, best, est_best = min(scored)
            task = state.tasks[best]
            # the chosen task must itself fit; the window test only covers
            # the tasks still remaining after it
            fits = est_best + task.t_proc <= task.t_deadline
            if fits and strongly_feasible(state, after=(best, est_best)):
                state.avail = commit(task, est_best, state.avail)
                state.partial.append(ScheduledEntry(best, est_best, est_best + task.t_proc))
                state.remaining.remove(best)
                forbidden.append(set())
                avail_stack.append(state.avail)
                continue
            failed_choice = best

        if cfg.on_infeasible is OnInfeasible.ABORT:
            return result(False)
        if state.backtracks_used >= max_backtracks:
            return result(False)
        state.backtracks_used += 1
        if failed_choice is not None:
            # retry this step with the next-best unforbidden window candidate
            forbidden[depth].add(failed_choice)
            continue
        # window exhausted here: undo the most recent commit and change it
        if not state.partial:
            return result(False)
        undone = state.partial.pop()
        forbidden.pop()  # this depth's forbidden set is stale once the prefix changes
        avail_stack.pop()
        state.avail = avail_stack[-1]
        insort(
            state.remaining,
            undone.task_id,
            key=lambda i: (state.tasks[i].t_deadline, i),
        )
        forbidden[-1].add(undone.task_id)

    return result(True)


def dumps_schedule(result: BuildResult, ts: TaskSet) -> str:
    """CSV rows task_id,start,finish,t_deadline plus a counter trailer."""
    tasks = {t.id: t for t in ts.tasks}
    lines = [SCHEDULE_HEADER]
    entries = result.schedule if result.feasible else ()
    for entry in entries:
        lines.append(
            f"{entry.task_id},{entry.start},{entry.finish},{tasks[entry.task_id].t_deadline}"
        )
    outcome = "feasible" if result.feasible else "infeasible"
    lines.append(
        f"# h_evals={result.h_evals},feas_checks={result.feas_checks},"
        f"backtracks={result.backtracks_used},outcome={outcome}"
    )
    return "\n".join(lines) + "\n"


def save_schedule(result: BuildResult, ts: TaskSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_schedule(result, ts))
