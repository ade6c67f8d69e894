"""Monte-Carlo execution of schedules and the evaluation metrics.

Execution draws fresh (duration, cpu) pairs from each job's history —
deliberately from a different stream than the solver's scenario samples,
so the schedule is always judged against values it has not seen.  A job
never starts before its parents have finished: overruns ripple into
children, and lateness is measured rather than forbidden.

When two schedules are compared, each Monte-Carlo run applies the *same*
draws to both (common random numbers), so metric differences reflect the
schedules and not the noise.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .domain import HistoryRecord, Problem, Realization, Schedule, peak_usage, topological_order
from .scenarios import job_stream


@dataclass(frozen=True)
class Metrics:
    """The four evaluation metrics of one realized run.

    ``peak_reduction`` is signed: negative means the schedule observed a
    *higher* peak than the baseline.  At most one of the two estimation
    errors is nonzero.  ``deadline_violations`` maps job id to lateness
    in seconds (0 for on-time jobs).
    """

    peak_reduction: float
    under_estimation_error: float
    over_estimation_error: float
    deadline_violations: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "deadline_violations", MappingProxyType(dict(self.deadline_violations))
        )


def draw_records(p: Problem, seed: int, run: int = 0) -> dict[str, HistoryRecord]:
    """One fresh draw per job, uniform over its history, independent of
    every other job and of the solver's scenario stream."""
    draws: dict[str, HistoryRecord] = {}
    for job in p.jobs:
        if not job.history:
            raise ValueError(f"{job.id}: empty history")
        rng = job_stream(seed, job.id, f"exec:{run}")
        draws[job.id] = job.history[int(rng.integers(0, len(job.history)))]
    return draws


def realize(p: Problem, s: Schedule, draws: Mapping[str, HistoryRecord]) -> Realization:
    """Run the schedule against concrete draws.

    actual_start = max(scheduled start, latest parent finish); the
    observed peak is the sweep peak of the realized intervals.
    """
    actual_start: dict[str, int] = {}
    actual_end: dict[str, int] = {}
    for job_id in topological_order(p):
        job = p.job(job_id)
        start = s.starts[job_id]
        for dep in job.deps:
            start = max(start, actual_end[dep])
        actual_start[job_id] = start
        actual_end[job_id] = start + draws[job_id].duration
    peak = peak_usage(
        [(actual_start[j.id], draws[j.id].duration, draws[j.id].cpu) for j in p.jobs]
    )
    return Realization(
        draws=draws,
        actual_start=actual_start,
        actual_end=actual_end,
        observed_peak=peak,
    )


def execute(p: Problem, s: Schedule, seed: int) -> Realization:
    """Draw once and realize the schedule (single Monte-Carlo run)."""
    return realize(p, s, draw_records(p, seed))


def compute_metrics(
    p: Problem, r: Realization, p_est: int, baseline_peak: int
) -> Metrics:
    """The four metrics of one run.

    under-estimation = max(0, (p_real - p_est) / p_est),
    over-estimation  = max(0, (p_est - p_real) / p_est),
    deadline violation per job = max(0, actual end - deadline) seconds,
    peak reduction = (baseline peak - observed peak) / baseline peak.
    """
    if p_est <= 0:
        raise ValueError(f"p_est must be >= 1, got {p_est}")
    if baseline_peak <= 0:
        raise ValueError(f"baseline peak must be >= 1, got {baseline_peak}")
    p_real = r.observed_peak
    under = max(0.0, (p_real - p_est) / p_est)
    over = max(0.0, (p_est - p_real) / p_est)
    violations = {
        job.id: max(0, r.actual_end[job.id] - job.u) for job in p.jobs
    }
    return Metrics(
        peak_reduction=(baseline_peak - p_real) / baseline_peak,
        under_estimation_error=under,
        over_estimation_error=over,
        deadline_violations=violations,
    )


_METRIC_KEYS = (
    "observed_peak",
    "under_err",
    "over_err",
    "max_deadline_violation_s",
    "mean_deadline_violation_s",
    "peak_reduction",
)


def evaluate(
    p: Problem, s: Schedule, runs: int, seed: int, baseline: Schedule
) -> dict:
    """Monte-Carlo comparison of a schedule against the baseline.

    Each run draws one record set and executes *both* schedules against
    it; the candidate's metrics use the baseline's observed peak of the
    same run as the reference.  A baseline peak of 0 (possible only when
    every drawn demand is 0) is clamped to 1 to keep the ratio defined.

    Returns ``{"per_run": [...], "aggregates": {...}}`` with min / max /
    median / mean aggregates for every metric.
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    per_run: list[dict] = []
    for run in range(runs):
        draws = draw_records(p, seed, run)
        base_real = realize(p, baseline, draws)
        cand_real = realize(p, s, draws)
        base_peak = max(1, base_real.observed_peak)
        metrics = compute_metrics(p, cand_real, s.peak_estimate, base_peak)
        lateness = list(metrics.deadline_violations.values())
        per_run.append(
            {
                "observed_peak": cand_real.observed_peak,
                "under_err": metrics.under_estimation_error,
                "over_err": metrics.over_estimation_error,
                "max_deadline_violation_s": max(lateness, default=0),
                "mean_deadline_violation_s": (
                    sum(lateness) / len(lateness) if lateness else 0.0
                ),
                "peak_reduction": metrics.peak_reduction,
            }
        )
    aggregates = {
        key: {
            "min": min(row[key] for row in per_run),
            "max": max(row[key] for row in per_run),
            "median": statistics.median(row[key] for row in per_run),
            "mean": sum(row[key] for row in per_run) / runs,
        }
        for key in _METRIC_KEYS
    }
    return {"per_run": per_run, "aggregates": aggregates}
