import dataclasses
import random
from fractions import Fraction

import pytest

from myosched import (
    HeuristicKind,
    HeuristicSpec,
    OverheadModel,
    SimConfig,
    Task,
    TaskSet,
    WorkloadParams,
    generate,
    load_trace,
    replay_validate,
    save_trace,
    simulate,
    validate_outcome,
)
from myosched.sim import ARRIVE, DISCARD, DISPATCH, FINISH, TraceEvent
from reference_sim import naive_simulate

WEST_HALF = HeuristicSpec(HeuristicKind.DEADLINE_PLUS_WEIGHTED_EST, Fraction(1, 2))


def _cfg(k=4, c0=0, c1=0, horizon=None, spec=WEST_HALF):
    return SimConfig(spec=spec, k=k, overhead=OverheadModel(c0, c1), horizon=horizon)


def _random_ts(rng, n=None, with_resources=True):
    n = n or rng.randint(1, 20)
    lo = rng.randint(1, 6)
    return generate(
        WorkloadParams(
            n=n,
            proc_range=(lo, lo + rng.randint(0, 5)),
            laxity=rng.randint(0, 30),
            arrival_span=(0, rng.randint(0, 12)),
            request_prob=0.3 if with_resources else 0.0,
        ),
        seed=rng.randrange(2**32),
    )


def test_single_task_no_overhead():
    ts = TaskSet((Task(0, 0, 5, 100),))
    out = simulate(ts, _cfg())
    assert (out.completed, out.discarded, out.makespan) == (1, 0, 5)
    assert out.overhead_total == 0


def test_overhead_forces_discard_of_zero_laxity_task():
    ts = TaskSet((Task(0, 0, 5, 5),))
    out = simulate(ts, _cfg(c0=1, c1=1))
    # charge is 1 + 1*1 = 2; at clock 2 the task can no longer finish by 5
    assert (out.completed, out.discarded) == (0, 1)
    assert out.overhead_total == 2
    assert any(ev.kind == DISCARD and ev.t == 2 for ev in out.trace)


def test_every_dispatched_task_meets_its_deadline():
    rng = random.Random(1)
    for _ in range(200):
        ts = _random_ts(rng)
        out = simulate(ts, _cfg(k=rng.randint(1, 8), c0=rng.randint(0, 3), c1=rng.randint(0, 2)))
        finishes = {e.task_id: e.t for e in out.trace if e.kind == FINISH}
        for tid, t_fin in finishes.items():
            assert t_fin <= ts.by_id(tid).t_deadline
        assert out.completed == len(finishes)
        assert out.completed + out.discarded == len(ts)


def test_zero_overhead_charges_nothing():
    rng = random.Random(2)
    for _ in range(50):
        ts = _random_ts(rng)
        out = simulate(ts, _cfg(k=3))
        assert out.overhead_total == 0
        assert all(d.overhead == 0 for d in out.decisions)


def test_overhead_accounting_matches_decision_records():
    rng = random.Random(3)
    for _ in range(100):
        ts = _random_ts(rng)
        c0, c1 = rng.randint(0, 4), rng.randint(0, 3)
        k = rng.randint(1, 6)
        out = simulate(ts, _cfg(k=k, c0=c0, c1=c1))
        assert out.overhead_total == sum(d.overhead for d in out.decisions)
        for d in out.decisions:
            assert d.n_k == min(k, d.n_pending)
            assert d.overhead == c0 + c1 * d.n_k


def test_non_preemption_no_nested_runs():
    rng = random.Random(4)
    for _ in range(100):
        ts = _random_ts(rng)
        out = simulate(ts, _cfg(k=2, c0=1, c1=1))
        runs = sorted(
            (
                next(e.t for e in out.trace if e.kind == DISPATCH and e.task_id == tid),
                next(e.t for e in out.trace if e.kind == FINISH and e.task_id == tid),
            )
            for tid in {e.task_id for e in out.trace if e.kind == DISPATCH}
        )
        for (s1, f1), (s2, f2) in zip(runs, runs[1:]):
            assert s2 >= f1


def test_k_cap_respected_at_every_decision():
    rng = random.Random(5)
    for _ in range(100):
        ts = _random_ts(rng)
        k = rng.randint(1, 5)
        out = simulate(ts, _cfg(k=k, c0=rng.randint(0, 2), c1=1))
        for d in out.decisions:
            assert d.n_evaluated <= min(k, d.n_pending)
            assert d.n_k == min(k, d.n_pending)


def test_trace_times_non_decreasing():
    rng = random.Random(6)
    for _ in range(100):
        ts = _random_ts(rng)
        out = simulate(ts, _cfg(k=3, c0=2, c1=1))
        times = [e.t for e in out.trace]
        assert times == sorted(times)


def test_horizon_cut_flags_partial_outcome():
    ts = generate(WorkloadParams(n=30, proc_range=(5, 6), laxity=50, arrival_span=(2, 4)), seed=8)
    full = simulate(ts, _cfg(k=2, c0=1, c1=1))
    cut = simulate(ts, _cfg(k=2, c0=1, c1=1, horizon=full.makespan // 3))
    assert cut.cut
    assert cut.completed + cut.discarded < len(ts)
    assert not full.cut


def test_simulation_is_deterministic():
    rng = random.Random(7)
    for _ in range(30):
        ts = _random_ts(rng)
        cfg = _cfg(k=3, c0=1, c1=2)
        assert simulate(ts, cfg) == simulate(ts, cfg)


# --- dual-implementation oracle --------------------------------------------


def test_matches_reference_interpreter():
    rng = random.Random(1234)
    for trial in range(400):
        ts = _random_ts(rng, with_resources=trial % 3 == 0)
        k = rng.randint(1, 8)
        spec_text, kind, w = rng.choice(
            [
                ("d+w*est", "d+w*est", Fraction(1, 2)),
                ("d+w*est", "d+w*est", Fraction(1)),
                ("d+w*p", "d+w*p", Fraction(1, 2)),
                ("min_d", "min_d", Fraction(0)),
                ("min_laxity", "min_laxity", Fraction(0)),
            ]
        )
        spec = HeuristicSpec(HeuristicKind(spec_text), w)
        for c0, c1 in ((0, 0), (1, 1), (5, 2)):
            out = simulate(ts, _cfg(k=k, c0=c0, c1=c1, spec=spec))
            ref = naive_simulate(ts, kind, w, k, c0, c1)
            got = (out.completed, out.discarded, out.makespan, out.overhead_total, out.cut)
            assert got == ref, f"divergence on seed {ts.seed} k={k} {kind} ({c0},{c1})"


def test_matches_reference_interpreter_with_horizon():
    rng = random.Random(77)
    for _ in range(100):
        ts = _random_ts(rng)
        horizon = rng.randint(0, 60)
        out = simulate(ts, _cfg(k=3, c0=1, c1=1, horizon=horizon))
        ref = naive_simulate(ts, "d+w*est", Fraction(1, 2), 3, 1, 1, horizon=horizon)
        assert (out.completed, out.discarded, out.makespan, out.overhead_total, out.cut) == ref


# --- replay validation -------------------------------------------------------


def test_valid_outcomes_validate():
    rng = random.Random(9)
    for _ in range(150):
        ts = _random_ts(rng)
        out = simulate(ts, _cfg(k=rng.randint(1, 6), c0=rng.randint(0, 3), c1=rng.randint(0, 2)))
        assert replay_validate(ts, out), validate_outcome(ts, out)


def test_overlapping_runs_detected():
    ts = TaskSet((Task(0, 0, 5, 100), Task(1, 0, 5, 100)))
    out = simulate(ts, _cfg(k=2))
    bad_trace = []
    for ev in out.trace:
        if ev.kind == DISPATCH and ev.task_id == 1:
            ev = TraceEvent(ev.t - 2, ev.kind, ev.task_id)
        elif ev.kind == FINISH and ev.task_id == 1:
            ev = TraceEvent(ev.t - 2, ev.kind, ev.task_id)
        bad_trace.append(ev)
    bad = dataclasses.replace(out, trace=tuple(bad_trace))
    assert not replay_validate(ts, bad)


def _corrupt(rng, outcome):
    """One random single-field corruption; returns a new outcome."""
    choice = rng.randrange(6)
    if choice == 0 and outcome.trace:
        i = rng.randrange(len(outcome.trace))
        ev = outcome.trace[i]
        ev = TraceEvent(ev.t + rng.choice([-3, -2, -1, 1, 2, 3]), ev.kind, ev.task_id)
        trace = outcome.trace[:i] + (ev,) + outcome.trace[i + 1 :]
        return dataclasses.replace(outcome, trace=trace)
    if choice == 1 and outcome.trace:
        i = rng.randrange(len(outcome.trace))
        ev = outcome.trace[i]
        kinds = [k for k in (ARRIVE, DISPATCH, FINISH, DISCARD) if k != ev.kind]
        ev = TraceEvent(ev.t, rng.choice(kinds), ev.task_id)
        trace = outcome.trace[:i] + (ev,) + outcome.trace[i + 1 :]
        return dataclasses.replace(outcome, trace=trace)
    if choice == 2:
        return dataclasses.replace(outcome, completed=outcome.completed + rng.choice([-1, 1]))
    if choice == 3:
        return dataclasses.replace(outcome, makespan=outcome.makespan + rng.choice([-2, -1, 1, 2]))
    if choice == 4:
        return dataclasses.replace(outcome, overhead_total=outcome.overhead_total + rng.choice([-1, 1]))
    if choice == 5 and outcome.decisions:
        i = rng.randrange(len(outcome.decisions))
        d = outcome.decisions[i]
        field = rng.choice(["t_start", "n_pending", "n_k", "overhead", "t_ready", "n_evaluated"])
        d = dataclasses.replace(d, **{field: getattr(d, field) + rng.choice([-1, 1, 2])})
        decisions = outcome.decisions[:i] + (d,) + outcome.decisions[i + 1 :]
        return dataclasses.replace(outcome, decisions=decisions)
    return None


def test_fuzzed_corruptions_are_all_caught():
    rng = random.Random(4321)
    caught = 0
    attempts = 0
    while caught < 100 and attempts < 2000:
        attempts += 1
        ts = _random_ts(rng, n=rng.randint(3, 15))
        out = simulate(ts, _cfg(k=rng.randint(1, 4), c0=rng.randint(0, 2), c1=rng.randint(0, 2)))
        assert replay_validate(ts, out)
        bad = _corrupt(rng, out)
        if bad is None or bad == out:
            continue
        assert not replay_validate(ts, bad), f"corruption not caught: {validate_outcome(ts, bad)}"
        caught += 1
    assert caught == 100


# --- trace file round trip ---------------------------------------------------


def test_trace_jsonl_round_trip(tmp_path):
    rng = random.Random(10)
    for i in range(20):
        ts = _random_ts(rng)
        out = simulate(ts, _cfg(k=2, c0=1, c1=1))
        path = tmp_path / f"t{i}.jsonl"
        save_trace(out, path)
        loaded = load_trace(path)
        assert loaded == out
        assert replay_validate(ts, loaded)
