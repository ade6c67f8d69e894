"""Peak-aware scheduling of flexible batch jobs.

Pick integer start times inside each job's flexibility window so the
worst concurrent CPU usage is as low as possible, while meeting deadlines
and dependencies.  Durations and CPU demands are only known as historical
samples, so the package offers a deterministic point-estimate model, a
scenario model with a tolerated miss fraction, a duration-only scenario
variant, and a linearized encoding of the deterministic model — plus
Monte-Carlo simulation to measure how each schedule holds up.
"""

from .domain import (
    HistoryRecord,
    JobSpec,
    Problem,
    Realization,
    Schedule,
    peak_usage,
    topological_order,
    validate_problem,
)
from .estimators import EstimatedJob, EstimatorKind, estimate, estimate_job
from .model import (
    ScheduleModel,
    StructurallyInfeasibleError,
    build_cospis,
    build_det,
    build_milp,
    build_soru_pk,
    derive_linearized,
    dump_model,
    linearized_peak,
    tolerance_budget,
)
from .cli import (
    ProblemFormatError,
    ProblemValidationError,
    RunSpec,
    load_problem,
    problem_from_dict,
    problem_to_dict,
    run,
    save_problem,
    sweep,
)
from .scenarios import ScenarioSet, sample_duration_only, sample_scenarios
from .simulate import Metrics, compute_metrics, draw_records, evaluate, execute, realize
from .solver import (
    SolveConfig,
    Solution,
    SolverStatus,
    Strategy,
    audit_solution,
    brute_force,
    fallback_manual,
    solve,
)
from .synthgen import GenConfig, generate

__version__ = "0.1.0"

__all__ = [
    "EstimatedJob",
    "EstimatorKind",
    "GenConfig",
    "HistoryRecord",
    "JobSpec",
    "Metrics",
    "Problem",
    "ProblemFormatError",
    "ProblemValidationError",
    "Realization",
    "RunSpec",
    "Schedule",
    "ScenarioSet",
    "ScheduleModel",
    "SolveConfig",
    "Solution",
    "SolverStatus",
    "Strategy",
    "StructurallyInfeasibleError",
    "audit_solution",
    "brute_force",
    "build_cospis",
    "build_det",
    "build_milp",
    "build_soru_pk",
    "compute_metrics",
    "derive_linearized",
    "draw_records",
    "dump_model",
    "estimate",
    "estimate_job",
    "evaluate",
    "execute",
    "fallback_manual",
    "generate",
    "linearized_peak",
    "load_problem",
    "peak_usage",
    "problem_from_dict",
    "problem_to_dict",
    "realize",
    "run",
    "sample_duration_only",
    "sample_scenarios",
    "save_problem",
    "solve",
    "sweep",
    "tolerance_budget",
    "topological_order",
    "validate_problem",
    "__version__",
]
