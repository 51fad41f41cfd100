"""myosched: window-limited heuristic scheduling for hard real-time task sets.

A library plus CLI covering random workload generation, full-lookahead and
window-limited offline schedule construction with backtracking, an online
non-preemptive simulator that charges scheduling overhead to the clock, and
an experiment grid runner that emits figure data and rendered plots.
"""

from .errors import (
    ConfigurationError,
    InvariantViolation,
    MyoschedError,
    SchedulingLogicError,
    WorkloadFormatError,
)
from .experiments import (
    ConditionResult,
    ExperimentGrid,
    RepOutcome,
    condition_seed,
    emit_figure_data,
    load_grid_config,
    run_grid,
)
from .heuristics import (
    HeuristicKind,
    HeuristicSpec,
    HeuristicValue,
    argmin_h,
    eval_h,
    format_heuristic,
    parse_heuristic,
)
from .offline import (
    UNBOUNDED,
    BuildConfig,
    BuildResult,
    OnInfeasible,
    ScheduledEntry,
    SchedulerState,
    build,
    initial_state,
    save_schedule,
    strongly_feasible,
    window,
)
from .resources import AvailabilityTable, Mode, ResourceRequest, commit, earliest_start
from .sim import (
    DecisionRecord,
    OverheadModel,
    SimConfig,
    SimOutcome,
    TraceEvent,
    load_trace,
    replay_validate,
    save_trace,
    simulate,
    validate_outcome,
)
from .workload import (
    PRNG_ALGORITHM,
    Task,
    TaskSet,
    WorkloadParams,
    generate,
    load_workload,
    save_workload,
)

__version__ = "0.1.0"
