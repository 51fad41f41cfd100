"""Task model, seeded workload generation, and the workload file format.

Every task is a one-shot, non-preemptive job with an absolute generation
time, a worst-case processing time (also used as the actual run length),
an absolute deadline, and a vector of shared/exclusive resource requests.
All times are non-negative integers on a discrete clock.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from .errors import InvariantViolation, WorkloadFormatError
from .resources import Mode, ResourceRequest

# Generation draws come from Python's random.Random (Mersenne Twister).
# Recorded in result metadata so per-seed runs are comparable.
PRNG_ALGORITHM = "python-random-mt19937"

WORKLOAD_HEADER = "# myosched-workload v1"


@dataclass(frozen=True)
class Task:
    id: int
    t_gen: int
    t_proc: int
    t_deadline: int
    requests: tuple[ResourceRequest, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "requests", tuple(self.requests))
        if self.t_gen < 0:
            raise InvariantViolation(f"task {self.id}: t_gen must be >= 0, got {self.t_gen}")
        if self.t_proc < 1:
            raise InvariantViolation(f"task {self.id}: t_proc must be >= 1, got {self.t_proc}")
        if self.t_deadline < self.t_gen + self.t_proc:
            raise InvariantViolation(
                f"task {self.id}: t_deadline {self.t_deadline} < t_gen + t_proc "
                f"({self.t_gen} + {self.t_proc}); no feasible start exists"
            )
        seen = set()
        for req in self.requests:
            if req.resource_id in seen:
                raise InvariantViolation(
                    f"task {self.id}: requests list resource {req.resource_id} twice"
                )
            seen.add(req.resource_id)

    @property
    def static_laxity(self) -> int:
        """Slack measured from generation time: t_deadline - t_gen - t_proc."""
        return self.t_deadline - self.t_gen - self.t_proc


@dataclass(frozen=True)
class TaskSet:
    tasks: tuple[Task, ...]
    seed: int = 0  # 0 when loaded from file

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        ids = sorted(t.id for t in self.tasks)
        if ids != list(range(len(self.tasks))):
            raise InvariantViolation(
                f"task ids must be unique and dense 0..{len(self.tasks) - 1}, got {ids}"
            )

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def by_id(self, task_id: int) -> Task:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)

    def digest(self) -> str:
        """sha256 of the canonical serialized form (seed-independent)."""
        return hashlib.sha256(dumps_workload(self).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class WorkloadParams:
    """Knobs for random generation.

    ``arrival_span`` bounds the uniform inter-arrival gap: it is the load
    knob (smaller gaps, heavier load). ``laxity`` is the constant slack
    added on top of t_gen + t_proc to form the deadline.
    """

    n: int
    proc_range: tuple[int, int]
    laxity: int
    arrival_span: tuple[int, int] = (0, 3)
    n_resources: int = 3
    request_prob: float = 0.2
    share_prob: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise InvariantViolation(f"n must be >= 1, got {self.n}")
        lo, hi = self.proc_range
        if lo < 1 or hi < lo:
            raise InvariantViolation(f"proc_range must satisfy 1 <= lo <= hi, got {lo}..{hi}")
        if self.laxity < 0:
            raise InvariantViolation(f"laxity must be >= 0, got {self.laxity}")
        alo, ahi = self.arrival_span
        if alo < 0 or ahi < alo:
            raise InvariantViolation(f"arrival_span must satisfy 0 <= lo <= hi, got {alo}..{ahi}")
        if self.n_resources < 0:
            raise InvariantViolation("n_resources must be >= 0")
        for name in ("request_prob", "share_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvariantViolation(f"{name} must be in [0, 1], got {p}")


def generate(params: WorkloadParams, seed: int) -> TaskSet:
    """Draw a task set; pure function of (params, seed).

    Task 0 arrives at 0; each later arrival adds a uniform gap from
    arrival_span, so t_gen is non-decreasing in id. Per task the draw
    order is fixed: gap (tasks > 0), processing time, then one request
    draw per resource plus a mode draw when the request fires. Deadlines
    are t_gen + t_proc + laxity, so static laxity is constant.
    """
    rng = random.Random(seed)
    tasks = []
    t_gen = 0
    for i in range(params.n):
        if i > 0:
            t_gen += rng.randint(*params.arrival_span)
        t_proc = rng.randint(*params.proc_range)
        requests = []
        for rid in range(params.n_resources):
            if rng.random() < params.request_prob:
                mode = Mode.SHARED if rng.random() < params.share_prob else Mode.EXCLUSIVE
                requests.append(ResourceRequest(rid, mode))
        tasks.append(
            Task(
                id=i,
                t_gen=t_gen,
                t_proc=t_proc,
                t_deadline=t_gen + t_proc + params.laxity,
                requests=tuple(requests),
            )
        )
    return TaskSet(tuple(tasks), seed=seed)


def _format_requests(task: Task) -> str:
    if not task.requests:
        return "-"
    return ";".join(f"{req.resource_id}{req.mode.value}" for req in task.requests)


def dumps_workload(ts: TaskSet) -> str:
    """Serialize in id order regardless of construction order."""
    lines = [WORKLOAD_HEADER]
    for task in sorted(ts.tasks, key=lambda t: t.id):
        lines.append(
            f"{task.id},{task.t_gen},{task.t_proc},{task.t_deadline},{_format_requests(task)}"
        )
    return "\n".join(lines) + "\n"


def save_workload(ts: TaskSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_workload(ts))


def _parse_requests(text: str, line_no: int) -> tuple[ResourceRequest, ...]:
    if text == "-":
        return ()
    requests = []
    for part in text.split(";"):
        if len(part) < 2 or part[-1] not in ("x", "s"):
            raise WorkloadFormatError(f"bad resource request {part!r}", line_no)
        try:
            rid = int(part[:-1])
        except ValueError:
            raise WorkloadFormatError(f"bad resource id in {part!r}", line_no) from None
        if rid < 0:
            raise WorkloadFormatError(f"negative resource id in {part!r}", line_no)
        requests.append(ResourceRequest(rid, Mode(part[-1])))
    return tuple(requests)


def load_workload(path) -> TaskSet:
    """Parse a workload file; every task invariant is re-validated on load.

    Raises WorkloadFormatError with the offending line number on parse
    errors and InvariantViolation naming the task id and field when a row
    is well-formed but breaks the task model.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != WORKLOAD_HEADER:
        raise WorkloadFormatError(f"missing required header {WORKLOAD_HEADER!r}", 1)
    tasks = []
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != 5:
            raise WorkloadFormatError(f"expected 5 comma-separated fields, got {len(fields)}", line_no)
        try:
            task_id, t_gen, t_proc, t_deadline = (int(f) for f in fields[:4])
        except ValueError:
            raise WorkloadFormatError(f"non-integer task field in {line!r}", line_no) from None
        tasks.append(Task(task_id, t_gen, t_proc, t_deadline, _parse_requests(fields[4], line_no)))
    tasks.sort(key=lambda t: t.id)
    return TaskSet(tuple(tasks), seed=0)
