"""Scenario sampling: K joint (duration, CPU) draws per job from history.

Draws are made with replacement, independently per job, from the job's
own history records.  A draw always returns a *pair* that actually
occurred, preserving the correlation between runtime and CPU usage.
Scenario index k is shared across jobs: scenario k of the problem is the
k-th draw of every job.

Each job gets its own counter-based RNG stream derived from
``sha256(namespace : seed : job_id)``, so adding or removing a job never
perturbs the draws of the others.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .domain import HistoryRecord, Problem
from .estimators import EstimatorKind, estimate


@dataclass(frozen=True)
class ScenarioSet:
    """K sampled (duration, cpu) records per job id.

    ``cpu_kind`` is None for plain pair sampling; for duration-only
    sampling it records the estimator used for the constant CPU column.
    """

    k: int
    draws: Mapping[str, tuple[HistoryRecord, ...]]
    seed: int
    cpu_kind: EstimatorKind | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "draws", MappingProxyType(dict(self.draws)))


def job_stream(seed: int, job_id: str, namespace: str) -> np.random.Generator:
    """Independent, reproducible RNG stream for one job."""
    digest = hashlib.sha256(f"{namespace}:{seed}:{job_id}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def sample_scenarios(p: Problem, k: int, seed: int) -> ScenarioSet:
    """Draw K paired scenarios per job, uniformly with replacement."""
    if k < 1:
        raise ValueError(f"scenario count must be >= 1, got {k}")
    draws: dict[str, tuple[HistoryRecord, ...]] = {}
    for job in p.jobs:
        if not job.history:
            raise ValueError(f"{job.id}: empty history")
        rng = job_stream(seed, job.id, "scen")
        idx = rng.integers(0, len(job.history), size=k)
        draws[job.id] = tuple(job.history[int(i)] for i in idx)
    return ScenarioSet(k=k, draws=draws, seed=seed)


def sample_duration_only(
    p: Problem, k: int, seed: int, cpu_kind: EstimatorKind
) -> ScenarioSet:
    """Duration-only sampling: durations vary, CPU is a constant estimate.

    Used by the baseline that handles duration uncertainty but not
    resource uncertainty.  Duration draws reuse the pair-sampling stream,
    so with the same seed the duration columns match ``sample_scenarios``.
    """
    if k < 1:
        raise ValueError(f"scenario count must be >= 1, got {k}")
    draws: dict[str, tuple[HistoryRecord, ...]] = {}
    for job in p.jobs:
        if not job.history:
            raise ValueError(f"{job.id}: empty history")
        rng = job_stream(seed, job.id, "scen")
        idx = rng.integers(0, len(job.history), size=k)
        cpu = estimate(job.cpus(), cpu_kind)
        draws[job.id] = tuple(
            HistoryRecord(job.history[int(i)].duration, cpu) for i in idx
        )
    return ScenarioSet(k=k, draws=draws, seed=seed, cpu_kind=cpu_kind)
