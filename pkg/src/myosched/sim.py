"""Online non-preemptive execution on a discrete clock with overhead charging.

Simulation rules (the contract the trace validator re-checks):

* Tasks join the pending set when the clock reaches their generation time;
  pending is kept sorted by (t_deadline, id).
* A scheduling decision runs whenever the CPU is free and pending is
  non-empty. At the decision clock t it first discards every pending task
  with max(t, earliest_start) + t_proc > t_deadline, then charges
  c0 + c1 * N_K time units (N_K = min(k, pending size after that sweep)),
  advancing both the clock and the CPU availability (the scheduler itself
  occupies the CPU). Arrivals during the charge join pending.
* At the post-overhead clock the discard sweep repeats; the survivors'
  first N_K (the N_K fixed when the charge was computed) are scored and
  the smallest-H task is dispatched at its earliest start, which at that
  point equals the clock. It runs to completion; nothing preempts it.
* When pending is empty the clock jumps to the next arrival. A configured
  horizon stops the loop at the first decision or jump past it; the
  outcome is then flagged as cut and unresolved tasks stay uncounted.

Dispatched tasks always meet their deadlines (the discard sweep runs at the
same clock the start is taken from), so completed counts equal dispatch
counts and overhead shows up purely as extra discards.
"""

from __future__ import annotations

import json
from bisect import insort
from dataclasses import dataclass

from .errors import ConfigurationError, WorkloadFormatError
from .heuristics import HeuristicSpec, eval_h, format_heuristic, parse_heuristic
from .resources import AvailabilityTable, commit, earliest_start
from .workload import Task, TaskSet

TRACE_FORMAT = "myosched-trace v1"

ARRIVE = "arrive"
DISPATCH = "dispatch"
FINISH = "finish"
DISCARD = "discard"


@dataclass(frozen=True)
class OverheadModel:
    """Time charged per scheduling decision: c0 + c1 * N_K."""

    c0: int = 1
    c1: int = 1

    def __post_init__(self):
        if self.c0 < 0 or self.c1 < 0:
            raise ConfigurationError("overhead coefficients must be >= 0")

    def per_decision(self, n_k: int) -> int:
        return self.c0 + self.c1 * n_k


@dataclass(frozen=True)
class SimConfig:
    spec: HeuristicSpec
    k: int
    overhead: OverheadModel = OverheadModel()
    horizon: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"window size must be >= 1, got {self.k}")
        if self.horizon is not None and self.horizon < 0:
            raise ConfigurationError("horizon must be >= 0")


@dataclass(frozen=True)
class TraceEvent:
    t: int
    kind: str
    task_id: int


@dataclass(frozen=True)
class DecisionRecord:
    """Per-decision accounting, kept alongside the event trace."""

    t_start: int  # clock when the decision began (after the first sweep)
    n_pending: int  # pending size the overhead charge saw
    n_k: int  # min(k, n_pending)
    overhead: int  # c0 + c1 * n_k
    t_ready: int  # t_start + overhead: selection and dispatch clock
    n_evaluated: int  # candidates actually scored (post second sweep)
    dispatched: int | None  # task id, or None when the sweep emptied pending


@dataclass(frozen=True)
class SimOutcome:
    n_tasks: int
    completed: int
    discarded: int
    makespan: int
    overhead_total: int
    cut: bool
    trace: tuple[TraceEvent, ...]
    decisions: tuple[DecisionRecord, ...]
    config: SimConfig


def simulate(ts: TaskSet, cfg: SimConfig) -> SimOutcome:
    """Run the event loop to completion (or the horizon). Deterministic."""
    tasks = tuple(sorted(ts.tasks, key=lambda t: t.id))
    n = len(tasks)
    arrival_order = sorted(range(n), key=lambda i: (tasks[i].t_gen, i))
    avail = AvailabilityTable.for_tasks(ts)
    pending: list[int] = []  # ids sorted by (t_deadline, id)
    trace: list[TraceEvent] = []
    decisions: list[DecisionRecord] = []
    next_arrival = 0
    completed = discarded = overhead_total = makespan = 0
    cut = False
    t = 0

    def admit(up_to: int) -> None:
        nonlocal next_arrival
        while next_arrival < n and tasks[arrival_order[next_arrival]].t_gen <= up_to:
            tid = arrival_order[next_arrival]
            next_arrival += 1
            trace.append(TraceEvent(tasks[tid].t_gen, ARRIVE, tid))
            insort(pending, tid, key=lambda i: (tasks[i].t_deadline, i))

    def discard_hopeless(now: int) -> None:
        nonlocal discarded
        keep = []
        for tid in pending:
            task = tasks[tid]
            if max(now, earliest_start(task, avail)) + task.t_proc > task.t_deadline:
                trace.append(TraceEvent(now, DISCARD, tid))
                discarded += 1
            else:
                keep.append(tid)
        pending[:] = keep

    admit(t)
    while True:
        if cfg.horizon is not None and t > cfg.horizon:
            cut = True
            break
        discard_hopeless(t)
        if not pending:
            if next_arrival >= n:
                break
            jump = tasks[arrival_order[next_arrival]].t_gen
            if cfg.horizon is not None and jump > cfg.horizon:
                cut = True
                break
            t = jump
            admit(t)
            continue

        t_start = t
        n_pending = len(pending)
        n_k = min(cfg.k, n_pending)
        charge = cfg.overhead.per_decision(n_k)
        overhead_total += charge
        t += charge
        avail = avail.with_cpu_free_at(t)
        admit(t)
        discard_hopeless(t)

        best = None
        start = t
        n_evaluated = min(n_k, len(pending))
        if n_evaluated:
            scored = []
            for tid in pending[:n_evaluated]:
                task = tasks[tid]
                est = max(t, earliest_start(task, avail))
                scored.append((eval_h(task, est, cfg.spec).h, task.t_deadline, tid, est))
            _, _, best, start = min(scored)
        decisions.append(
            DecisionRecord(t_start, n_pending, n_k, charge, t, n_evaluated, best)
        )
        if best is None:
            continue

        pending.remove(best)
        task = tasks[best]
        avail = commit(task, start, avail)
        finish = start + task.t_proc
        trace.append(TraceEvent(start, DISPATCH, best))
        admit(finish)
        trace.append(TraceEvent(finish, FINISH, best))
        if finish <= task.t_deadline:
            completed += 1
        makespan = max(makespan, finish)
        t = finish

    return SimOutcome(
        n_tasks=n,
        completed=completed,
        discarded=discarded,
        makespan=makespan,
        overhead_total=overhead_total,
        cut=cut,
        trace=tuple(trace),
        decisions=tuple(decisions),
        config=cfg,
    )


# --- trace export / import -------------------------------------------------


def dumps_trace(outcome: SimOutcome) -> str:
    """JSON lines: a format header object, one object per event, and a
    terminal summary object carrying counts and the decision records."""
    cfg = outcome.config
    header = {
        "format": TRACE_FORMAT,
        "n_tasks": outcome.n_tasks,
        "k": cfg.k,
        "heuristic": format_heuristic(cfg.spec),
        "c0": cfg.overhead.c0,
        "c1": cfg.overhead.c1,
        "horizon": cfg.horizon,
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for ev in outcome.trace:
        lines.append(
            json.dumps({"t": ev.t, "kind": ev.kind, "task_id": ev.task_id}, separators=(",", ":"))
        )
    summary = {
        "summary": {
            "completed": outcome.completed,
            "discarded": outcome.discarded,
            "makespan": outcome.makespan,
            "overhead_total": outcome.overhead_total,
            "cut": outcome.cut,
            "decisions": [
                [d.t_start, d.n_pending, d.n_k, d.overhead, d.t_ready, d.n_evaluated,
                 -1 if d.dispatched is None else d.dispatched]
                for d in outcome.decisions
            ],
        }
    }
    lines.append(json.dumps(summary, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def save_trace(outcome: SimOutcome, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_trace(outcome))


def load_trace(path) -> SimOutcome:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise WorkloadFormatError("empty trace file", 1)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise WorkloadFormatError(f"bad trace header: {exc}", 1) from None
    if header.get("format") != TRACE_FORMAT:
        raise WorkloadFormatError(f"expected format {TRACE_FORMAT!r}", 1)
    cfg = SimConfig(
        spec=parse_heuristic(header["heuristic"]),
        k=header["k"],
        overhead=OverheadModel(header["c0"], header["c1"]),
        horizon=header.get("horizon"),
    )
    events = []
    summary = None
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise WorkloadFormatError(f"bad trace line: {exc}", line_no) from None
        if "summary" in obj:
            summary = obj["summary"]
        else:
            events.append(TraceEvent(obj["t"], obj["kind"], obj["task_id"]))
    if summary is None:
        raise WorkloadFormatError("trace has no terminal summary object", len(lines))
    decisions = tuple(
        DecisionRecord(d[0], d[1], d[2], d[3], d[4], d[5], None if d[6] < 0 else d[6])
        for d in summary["decisions"]
    )
    return SimOutcome(
        n_tasks=header["n_tasks"],
        completed=summary["completed"],
        discarded=summary["discarded"],
        makespan=summary["makespan"],
        overhead_total=summary["overhead_total"],
        cut=summary["cut"],
        trace=tuple(events),
        decisions=decisions,
        config=cfg,
    )


# --- replay validation -----------------------------------------------------


def validate_outcome(ts: TaskSet, outcome: SimOutcome) -> str | None:
    """Re-walk the trace against the rules above; None when everything holds,
    else a description of the first violation found."""
    tasks = {t.id: t for t in ts.tasks}
    cfg = outcome.config
    if outcome.n_tasks != len(ts):
        return f"outcome claims {outcome.n_tasks} tasks, workload has {len(ts)}"

    last_t = None
    by_kind: dict[str, dict[int, int]] = {ARRIVE: {}, DISPATCH: {}, FINISH: {}, DISCARD: {}}
    for ev in outcome.trace:
        if ev.kind not in by_kind:
            return f"unknown event kind {ev.kind!r}"
        if ev.task_id not in tasks:
            return f"event names unknown task {ev.task_id}"
        if last_t is not None and ev.t < last_t:
            return f"trace times decrease at {ev.kind} t={ev.t}"
        last_t = ev.t
        if ev.task_id in by_kind[ev.kind]:
            return f"duplicate {ev.kind} for task {ev.task_id}"
        by_kind[ev.kind][ev.task_id] = ev.t

    arrives, dispatches = by_kind[ARRIVE], by_kind[DISPATCH]
    finishes, discards = by_kind[FINISH], by_kind[DISCARD]

    for tid, t_arr in arrives.items():
        if t_arr != tasks[tid].t_gen:
            return f"task {tid} arrive at {t_arr}, generated at {tasks[tid].t_gen}"
    for tid in dispatches:
        if tid not in arrives:
            return f"task {tid} dispatched without arriving"
        if tid in discards:
            return f"task {tid} both dispatched and discarded"
    for tid, t_fin in finishes.items():
        if tid not in dispatches:
            return f"task {tid} finishes without dispatch"
        if t_fin != dispatches[tid] + tasks[tid].t_proc:
            return (
                f"task {tid} finish {t_fin} != start {dispatches[tid]} + "
                f"t_proc {tasks[tid].t_proc}"
            )
    for tid in dispatches:
        if tid not in finishes:
            return f"task {tid} dispatched but never finishes"
        if dispatches[tid] < tasks[tid].t_gen:
            return f"task {tid} dispatched at {dispatches[tid]} before generation"
    if not outcome.cut:
        for tid in tasks:
            if tid not in arrives:
                return f"task {tid} never arrives in an uncut run"
            if (tid in finishes) == (tid in discards):
                return f"task {tid} lacks exactly one terminal event"

    # single CPU, non-preemptive: runs may not overlap or nest
    runs = sorted((dispatches[tid], finishes[tid], tid) for tid in dispatches)
    for (s1, f1, a), (s2, f2, b) in zip(runs, runs[1:]):
        if s2 < f1:
            return f"task {b} dispatched at {s2} inside task {a}'s run [{s1}, {f1})"

    def pending_at(clock: int) -> int:
        count = 0
        for tid, task in tasks.items():
            if task.t_gen > clock:
                continue
            if tid in dispatches and dispatches[tid] < clock:
                continue
            if tid in discards and discards[tid] <= clock:
                continue
            count += 1
        return count

    # decision ledger: every field is recomputable from the event trace.
    # Discard sweeps run at decision clocks and at every loop re-entry after
    # a finish; pure idle-jump sweeps can never discard (laxity >= 0), so
    # finishes plus decision clocks cover every legal discard time.
    boundary_clocks = set(finishes.values())
    expected_overhead_total = 0
    prev_finish = None
    arrival_clocks = {tk.t_gen for tk in tasks.values()}
    claimed = []
    for i, d in enumerate(outcome.decisions):
        if d.n_k != min(cfg.k, d.n_pending):
            return f"decision {i}: n_k {d.n_k} != min(k, {d.n_pending})"
        if d.overhead != cfg.overhead.per_decision(d.n_k):
            return f"decision {i}: overhead {d.overhead} != c0 + c1*n_k"
        if d.t_ready != d.t_start + d.overhead:
            return f"decision {i}: t_ready {d.t_ready} != t_start + overhead"
        anchored = d.t_start == 0 or d.t_start in arrival_clocks or d.t_start == prev_finish
        if not anchored:
            return f"decision {i}: t_start {d.t_start} matches no arrival or finish"
        expected_overhead_total += d.overhead
        boundary_clocks.update((d.t_start, d.t_ready))

        if d.n_pending != pending_at(d.t_start):
            return (
                f"decision {i}: records {d.n_pending} pending at {d.t_start}, "
                f"trace implies {pending_at(d.t_start)}"
            )
        if d.n_evaluated != min(d.n_k, pending_at(d.t_ready)):
            return f"decision {i}: n_evaluated {d.n_evaluated} inconsistent with trace"
        if d.dispatched is not None:
            if d.dispatched not in dispatches or dispatches[d.dispatched] != d.t_ready:
                return f"decision {i}: dispatched task {d.dispatched} not started at t_ready"
            claimed.append(d.dispatched)
            prev_finish = finishes[d.dispatched]
        elif d.n_evaluated != 0:
            return f"decision {i}: evaluated {d.n_evaluated} candidates but dispatched none"

    if sorted(claimed) != sorted(dispatches):
        return "dispatch events do not match the decisions that claim them"

    for tid, t_disc in discards.items():
        task = tasks[tid]
        if t_disc + task.t_proc <= task.t_deadline:
            return f"task {tid} discarded at {t_disc} though it could still finish on time"
        if t_disc not in boundary_clocks:
            return f"task {tid} discarded at {t_disc}, not a decision boundary"
        for clock in boundary_clocks:
            if task.t_gen <= clock < t_disc and clock + task.t_proc > task.t_deadline:
                return f"task {tid} was already hopeless at earlier boundary {clock}"

    on_time = sum(1 for tid, t_fin in finishes.items() if t_fin <= tasks[tid].t_deadline)
    if outcome.completed != on_time:
        return f"completed {outcome.completed} != {on_time} on-time finishes"
    if outcome.discarded != len(discards):
        return f"discarded {outcome.discarded} != {len(discards)} discard events"
    if not outcome.cut and outcome.completed + outcome.discarded != len(tasks):
        return "completed + discarded != task count in an uncut run"
    expected_makespan = max(finishes.values(), default=0)
    if outcome.makespan != expected_makespan:
        return f"makespan {outcome.makespan} != last finish {expected_makespan}"
    if outcome.overhead_total != expected_overhead_total:
        return f"overhead_total {outcome.overhead_total} != sum of decision charges"
    return None


def replay_validate(ts: TaskSet, outcome: SimOutcome) -> bool:
    return validate_outcome(ts, outcome) is None
