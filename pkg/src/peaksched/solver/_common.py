"""Shared solver types and the solution self-audit."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .. import _backend
from ..domain import Problem, peak_usage
from ..estimators import EstimatorKind, estimate_job
from ..model import ScheduleModel, linearized_peak


class SolverStatus(enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    TIMED_OUT_WITH_INCUMBENT = "TimedOut-with-incumbent"
    TIMED_OUT_NO_INCUMBENT = "TimedOut-no-incumbent"


class Strategy(enum.Enum):
    EXACT = "exact"
    LOCAL_SEARCH = "local-search"
    AUTO = "auto"


# Callback signature: (phase, elapsed seconds, incumbent objective or None).
ProgressFn = Callable[[str, float, "int | None"], None]


@dataclass(frozen=True)
class SolveConfig:
    time_limit_s: float = 900.0
    seed: int = 0
    strategy: Strategy = Strategy.AUTO
    auto_threshold: int = 60  # job count above which Auto switches to local search

    def __post_init__(self) -> None:
        if self.time_limit_s <= 0:
            raise ValueError(f"time limit must be positive, got {self.time_limit_s}")


@dataclass(frozen=True)
class Solution:
    """Solver output.  ``starts``/peaks/objective are only meaningful for
    Optimal, Feasible and TimedOut-with-incumbent statuses."""

    starts: Mapping[str, int]
    scenario_peaks: tuple[int, ...]
    violated: frozenset[int]
    objective: int
    status: SolverStatus
    core_hint: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", MappingProxyType(dict(self.starts)))
        object.__setattr__(self, "violated", frozenset(self.violated))


class ModelArrays(NamedTuple):
    lo: np.ndarray  # (n,) int64
    hi: np.ndarray
    deadlines: np.ndarray
    durs: np.ndarray  # (K, n) int64
    cpus: np.ndarray
    ep: np.ndarray  # (E,) parent indices
    ec: np.ndarray  # (E,) child indices


def model_arrays(m: ScheduleModel) -> ModelArrays:
    return ModelArrays(
        lo=np.array(m.start_lo, dtype=np.int64),
        hi=np.array(m.start_hi, dtype=np.int64),
        deadlines=np.array(m.deadlines, dtype=np.int64),
        durs=np.array(m.durations, dtype=np.int64).reshape(m.k, m.n),
        cpus=np.array(m.demands, dtype=np.int64).reshape(m.k, m.n),
        ep=np.array([e[0] for e in m.edges], dtype=np.int64),
        ec=np.array([e[1] for e in m.edges], dtype=np.int64),
    )


def peaks_at(m: ScheduleModel, arr: ModelArrays, starts: np.ndarray) -> np.ndarray:
    """Per-scenario peaks at fixed starts, using the model's own encoding:
    the start-event load evaluation for linearized models, the event sweep
    otherwise."""
    if m.linearized:
        return np.array(
            [linearized_peak(starts, arr.durs[k], arr.cpus[k]) for k in range(m.k)],
            dtype=np.int64,
        )
    return np.asarray(_backend.scenario_peaks(starts, arr.durs, arr.cpus), dtype=np.int64)


def select_violated(
    peaks: np.ndarray, dirty: np.ndarray, budget: int
) -> tuple[frozenset[int], int]:
    """Best violated-set at fixed starts: every constraint-violating
    scenario must be written off; any remaining budget is spent on the
    largest clean peaks (which is optimal, since exempting a scenario can
    only lower the objective).  Returns (violated, objective).

    Precondition: dirty.sum() <= budget.
    """
    k = len(peaks)
    violated = set(np.flatnonzero(dirty).tolist())
    avail = budget - len(violated)
    clean = [i for i in range(k) if not dirty[i]]
    clean.sort(key=lambda i: (-int(peaks[i]), i))
    violated.update(clean[:avail])
    rest = clean[avail:]
    objective = max((int(peaks[i]) for i in rest), default=0)
    return frozenset(violated), objective


def audit_solution(m: ScheduleModel, sol: Solution) -> None:
    """Replay every constraint over the returned solution; raise if any
    check fails.  Runs after every solve that claims an assignment, so a
    solver bug can never silently emit an invalid schedule."""
    problems: list[str] = []
    if set(sol.starts) != set(m.job_ids):
        problems.append("starts do not cover exactly the model's jobs")
    arr = model_arrays(m)
    s = np.array([sol.starts[j] for j in m.job_ids], dtype=np.int64)
    for j, job_id in enumerate(m.job_ids):
        if not (arr.lo[j] <= s[j] <= arr.hi[j]):
            problems.append(
                f"{job_id}: start {s[j]} outside [{arr.lo[j]}, {arr.hi[j]}]"
            )
    if len(sol.violated) > m.tolerance_budget:
        problems.append(
            f"{len(sol.violated)} violated scenarios exceed budget {m.tolerance_budget}"
        )
    if any(not 0 <= k < m.k for k in sol.violated):
        problems.append("violated scenario index out of range")
    peaks = peaks_at(m, arr, s)
    if tuple(int(x) for x in peaks) != tuple(sol.scenario_peaks):
        problems.append("reported scenario peaks do not match recomputation")
    clean_peaks = []
    for k in range(m.k):
        if k in sol.violated:
            continue
        for j, job_id in enumerate(m.job_ids):
            if s[j] + arr.durs[k, j] > arr.deadlines[j]:
                problems.append(f"scenario {k}: {job_id} misses its deadline")
        for e in range(len(arr.ep)):
            p_idx, c_idx = int(arr.ep[e]), int(arr.ec[e])
            if s[p_idx] + arr.durs[k, p_idx] > s[c_idx]:
                problems.append(
                    f"scenario {k}: precedence {m.job_ids[p_idx]} -> "
                    f"{m.job_ids[c_idx]} violated"
                )
        clean_peaks.append(int(peaks[k]))
    expected_obj = max(clean_peaks, default=0)
    if sol.objective != expected_obj:
        problems.append(f"objective {sol.objective} != max clean peak {expected_obj}")
    if problems:
        raise RuntimeError("solver self-audit failed: " + "; ".join(problems))


def fallback_manual(p: Problem) -> Solution:
    """The no-optimization schedule: every job starts at its requested
    time, capacity is predicted from worst-case (P100) estimates.  Always
    available — used as the baseline and whenever a solve comes back
    empty-handed."""
    est = [estimate_job(job, EstimatorKind.P100) for job in p.jobs]
    peak = peak_usage([(e.q, e.d_hat, e.r_hat) for e in est])
    return Solution(
        starts={job.id: job.q for job in p.jobs},
        scenario_peaks=(peak,),
        violated=frozenset(),
        objective=peak,
        status=SolverStatus.FEASIBLE,
    )
