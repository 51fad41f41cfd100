"""The six priority formulas and smallest-value selection.

Values are exact rationals (Fraction) so schedules never depend on
floating-point rounding; the weights used in practice are 0.5 and 1.0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .workload import Task


class HeuristicKind(enum.Enum):
    MIN_DEADLINE = "min_d"
    MIN_PROC = "min_p"
    MIN_EST = "min_est"
    MIN_LAXITY = "min_laxity"
    DEADLINE_PLUS_WEIGHTED_PROC = "d+w*p"
    DEADLINE_PLUS_WEIGHTED_EST = "d+w*est"


WEIGHTED_KINDS = frozenset(
    {HeuristicKind.DEADLINE_PLUS_WEIGHTED_PROC, HeuristicKind.DEADLINE_PLUS_WEIGHTED_EST}
)


@dataclass(frozen=True)
class HeuristicSpec:
    kind: HeuristicKind
    w: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "w", Fraction(self.w))
        if self.w < 0:
            raise ValueError(f"weight must be >= 0, got {self.w}")
        if self.kind not in WEIGHTED_KINDS and self.w != 0:
            raise ValueError(f"{self.kind.value} takes no weight; w must be 0")


@dataclass(frozen=True)
class HeuristicValue:
    h: Fraction
    task_id: int
    est_used: int


def eval_h(task: Task, est: int, spec: HeuristicSpec) -> HeuristicValue:
    """Score one candidate given the earliest start the evaluation assumes.

    Laxity may come out negative for a candidate that can no longer meet
    its deadline; feasibility is the scheduler's concern, not this one's.
    """
    if est < task.t_gen:
        raise ValueError(f"est {est} precedes task {task.id} generation time {task.t_gen}")
    kind = spec.kind
    if kind is HeuristicKind.MIN_DEADLINE:
        h = Fraction(task.t_deadline)
    elif kind is HeuristicKind.MIN_PROC:
        h = Fraction(task.t_proc)
    elif kind is HeuristicKind.MIN_EST:
        h = Fraction(est)
    elif kind is HeuristicKind.MIN_LAXITY:
        h = Fraction(task.t_deadline - est - task.t_proc)
    elif kind is HeuristicKind.DEADLINE_PLUS_WEIGHTED_PROC:
        h = task.t_deadline + spec.w * task.t_proc
    else:
        h = task.t_deadline + spec.w * est
    return HeuristicValue(h=h, task_id=task.id, est_used=est)


def argmin_h(candidates: Sequence[tuple[Task, int]], spec: HeuristicSpec) -> int:
    """Id of the smallest-H candidate; ties break on (t_deadline, id)."""
    if not candidates:
        raise ValueError("argmin_h over an empty candidate list")
    best = min(
        (eval_h(task, est, spec).h, task.t_deadline, task.id) for task, est in candidates
    )
    return best[2]


def parse_heuristic(text: str) -> HeuristicSpec:
    """Parse the CLI/config form: min_d | min_p | min_est | min_laxity |
    d+w*p:<w> | d+w*est:<w>, with <w> a decimal or p/q fraction."""
    text = text.strip()
    simple = {
        "min_d": HeuristicKind.MIN_DEADLINE,
        "min_p": HeuristicKind.MIN_PROC,
        "min_est": HeuristicKind.MIN_EST,
        "min_laxity": HeuristicKind.MIN_LAXITY,
    }
    if text in simple:
        return HeuristicSpec(simple[text])
    for prefix, kind in (
        ("d+w*p:", HeuristicKind.DEADLINE_PLUS_WEIGHTED_PROC),
        ("d+w*est:", HeuristicKind.DEADLINE_PLUS_WEIGHTED_EST),
    ):
        if text.startswith(prefix):
            wtext = text[len(prefix) :]
            try:
                w = Fraction(wtext)
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"bad weight {wtext!r} in heuristic {text!r}") from None
            return HeuristicSpec(kind, w)
    raise ValueError(
        f"unknown heuristic {text!r}; expected one of min_d, min_p, min_est, "
        "min_laxity, d+w*p:<w>, d+w*est:<w>"
    )


def format_weight(w: Fraction) -> str:
    """Shortest exact text: decimal when the denominator allows, else p/q."""
    den = w.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{w.numerator}/{w.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(w.numerator)
    scaled = w.numerator * 10**digits // w.denominator
    text = f"{scaled:0{digits + 1}d}"
    return f"{text[:-digits]}.{text[-digits:]}"


def format_heuristic(spec: HeuristicSpec) -> str:
    if spec.kind in WEIGHTED_KINDS:
        return f"{spec.kind.value}:{format_weight(spec.w)}"
    return spec.kind.value
