"""Resource availability tracking and earliest-start computation.

A task may request each resource in shared or exclusive mode. Grants follow
the reader/writer convention: any number of shared grants may overlap, an
exclusive grant waits for every outstanding grant. The availability table
records, per resource, the earliest time a grant of each mode could begin,
plus the time the single CPU frees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import ConfigurationError, SchedulingLogicError

if TYPE_CHECKING:
    from .workload import Task, TaskSet


class Mode(enum.Enum):
    SHARED = "s"
    EXCLUSIVE = "x"


@dataclass(frozen=True)
class ResourceRequest:
    resource_id: int
    mode: Mode


@dataclass(frozen=True)
class AvailabilityTable:
    """Copy-on-write availability state.

    ``resources`` maps resource id to ``(free_at_exclusive, free_at_shared)``.
    Invariant: ``free_at_shared <= free_at_exclusive`` for every resource
    (a shared grant can begin no later than an exclusive one).
    """

    cpu_free_at: int = 0
    resources: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    @classmethod
    def for_resources(cls, resource_ids: Iterable[int]) -> "AvailabilityTable":
        return cls(cpu_free_at=0, resources={rid: (0, 0) for rid in resource_ids})

    @classmethod
    def for_tasks(cls, ts: "TaskSet") -> "AvailabilityTable":
        ids = {req.resource_id for task in ts.tasks for req in task.requests}
        return cls.for_resources(ids)

    def with_cpu_free_at(self, t: int) -> "AvailabilityTable":
        """New table whose CPU frees no earlier than ``t`` (monotone)."""
        return AvailabilityTable(max(self.cpu_free_at, t), self.resources)


def earliest_start(task: "Task", avail: AvailabilityTable) -> int:
    """Earliest time ``task`` could begin against the committed state.

    max of arrival time, CPU availability, and the matching-mode free time
    of every requested resource. Always >= task.t_gen.
    """
    est = max(task.t_gen, avail.cpu_free_at)
    for req in task.requests:
        try:
            free_excl, free_shared = avail.resources[req.resource_id]
        except KeyError:
            raise ConfigurationError(
                f"task {task.id} requests unknown resource {req.resource_id}"
            ) from None
        est = max(est, free_excl if req.mode is Mode.EXCLUSIVE else free_shared)
    return est


def commit(task: "Task", start: int, avail: AvailabilityTable) -> AvailabilityTable:
    """Record ``task`` running over [start, start + t_proc); returns a new table.

    Exclusive requests push both free times of the resource to the finish.
    Shared requests push only the exclusive free time (concurrent shared
    grants stay permitted). No field ever decreases.
    """
    if start < earliest_start(task, avail):
        raise SchedulingLogicError(
            f"commit of task {task.id} at {start} before its earliest start"
        )
    finish = start + task.t_proc
    resources = dict(avail.resources)
    for req in task.requests:
        free_excl, free_shared = resources[req.resource_id]
        if req.mode is Mode.EXCLUSIVE:
            resources[req.resource_id] = (finish, finish)
        else:
            resources[req.resource_id] = (max(free_excl, finish), free_shared)
    return AvailabilityTable(cpu_free_at=finish, resources=resources)
