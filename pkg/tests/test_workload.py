import random

import pytest

from myosched import (
    InvariantViolation,
    Task,
    TaskSet,
    WorkloadFormatError,
    WorkloadParams,
    generate,
    load_workload,
    save_workload,
)
from myosched.workload import dumps_workload


def test_case1_parameters_hold_for_every_task():
    # 200 tasks, processing 10..11, constant slack 100
    ts = generate(WorkloadParams(n=200, proc_range=(10, 11), laxity=100), seed=42)
    assert len(ts) == 200
    for task in ts:
        assert task.t_proc in (10, 11)
        assert task.t_deadline - task.t_gen - task.t_proc == 100


def test_zero_laxity_single_task():
    ts = generate(
        WorkloadParams(n=1, proc_range=(5, 5), laxity=0, arrival_span=(0, 0)), seed=9
    )
    (task,) = ts.tasks
    assert (task.t_gen, task.t_proc, task.t_deadline) == (0, 5, 5)


def test_generation_is_deterministic_bytewise():
    params = WorkloadParams(n=500, proc_range=(20, 21), laxity=100)
    a = dumps_workload(generate(params, seed=7))
    b = dumps_workload(generate(params, seed=7))
    assert a == b
    assert dumps_workload(generate(params, seed=8)) != a


def test_arrivals_are_non_decreasing_and_start_at_zero():
    ts = generate(WorkloadParams(n=50, proc_range=(1, 9), laxity=4), seed=3)
    gens = [t.t_gen for t in ts]
    assert gens[0] == 0
    assert all(a <= b for a, b in zip(gens, gens[1:]))


def test_generate_rejects_bad_params():
    with pytest.raises(InvariantViolation):
        WorkloadParams(n=0, proc_range=(1, 2), laxity=0)
    with pytest.raises(InvariantViolation):
        WorkloadParams(n=5, proc_range=(0, 2), laxity=0)
    with pytest.raises(InvariantViolation):
        WorkloadParams(n=5, proc_range=(1, 2), laxity=0, request_prob=1.5)


def test_task_invariants_enforced():
    with pytest.raises(InvariantViolation, match="task 3"):
        Task(id=3, t_gen=0, t_proc=5, t_deadline=4)
    with pytest.raises(InvariantViolation, match="t_proc"):
        Task(id=0, t_gen=0, t_proc=0, t_deadline=4)
    with pytest.raises(InvariantViolation, match="dense"):
        TaskSet((Task(0, 0, 1, 1), Task(2, 0, 1, 1)))


def test_minimal_file_roundtrip(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("# myosched-workload v1\n0,0,5,100,-\n")
    ts = load_workload(path)
    assert len(ts) == 1
    assert ts.seed == 0
    assert ts.tasks[0].requests == ()


def test_load_rejects_missing_header(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("0,0,5,100,-\n")
    with pytest.raises(WorkloadFormatError, match="header"):
        load_workload(path)


def test_load_reports_line_numbers(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("# myosched-workload v1\n0,0,5,100,-\n1,0,notanint,9,-\n")
    with pytest.raises(WorkloadFormatError, match="line 3"):
        load_workload(path)
    path.write_text("# myosched-workload v1\n0,0,5,100,0q\n")
    with pytest.raises(WorkloadFormatError, match="line 2"):
        load_workload(path)


def test_load_reports_invariant_breaks_with_task_and_field(tmp_path):
    path = tmp_path / "w.csv"
    # deadline before t_gen + t_proc
    path.write_text("# myosched-workload v1\n0,10,5,12,-\n")
    with pytest.raises(InvariantViolation, match="task 0.*t_deadline"):
        load_workload(path)


def test_requests_serialize_in_both_modes(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("# myosched-workload v1\n0,0,5,100,0x;2s\n")
    ts = load_workload(path)
    reqs = ts.tasks[0].requests
    assert [(r.resource_id, r.mode.value) for r in reqs] == [(0, "x"), (2, "s")]
    save_workload(ts, tmp_path / "back.csv")
    assert "0x;2s" in (tmp_path / "back.csv").read_text()


def test_roundtrip_over_random_parameter_draws(tmp_path):
    rng = random.Random(2024)
    for i in range(100):
        lo = rng.randint(1, 20)
        params = WorkloadParams(
            n=rng.randint(1, 40),
            proc_range=(lo, lo + rng.randint(0, 10)),
            laxity=rng.randint(0, 200),
            arrival_span=(0, rng.randint(0, 15)),
            n_resources=rng.randint(0, 5),
            request_prob=rng.random(),
            share_prob=rng.random(),
        )
        ts = generate(params, seed=i)
        path = tmp_path / f"w{i}.csv"
        save_workload(ts, path)
        loaded = load_workload(path)
        assert loaded.tasks == ts.tasks  # equal modulo the seed field
        assert loaded.seed == 0


def test_tasks_emitted_in_id_order_regardless_of_construction_order():
    tasks = (Task(1, 3, 2, 10), Task(0, 0, 2, 10), Task(2, 5, 2, 12))
    text = dumps_workload(TaskSet(tasks))
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    assert [row.split(",")[0] for row in rows] == ["0", "1", "2"]
