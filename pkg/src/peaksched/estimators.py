"""Point estimators that collapse a job's history into single values.

The deterministic model builders replace each job's stochastic duration
and CPU usage with one number per column.  Percentiles use the
nearest-rank convention (sort ascending, take the element at 1-based
index ``ceil(p * n)``) so estimates are always integers actually seen in
the history — no interpolation, no rounding policy needed.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .domain import JobSpec


class EstimatorKind(enum.Enum):
    P50 = "p50"
    P75 = "p75"
    P100 = "p100"
    MODE = "mode"


@dataclass(frozen=True)
class EstimatedJob:
    """A job with its history collapsed to point estimates d_hat / r_hat."""

    id: str
    q: int
    f: int
    u: int
    deps: tuple[str, ...]
    d_hat: int
    r_hat: int


def _nearest_rank(values: Sequence[int], num: int, den: int) -> int:
    """1-based nearest-rank percentile num/den, computed in integer math."""
    xs = sorted(values)
    n = len(xs)
    rank = (num * n + den - 1) // den  # ceil(num * n / den)
    return xs[max(rank, 1) - 1]


def estimate(values: Sequence[int], kind: EstimatorKind) -> int:
    """Apply one point estimator to a nonempty list of integers.

    Mode ties are broken by the smallest value, so results are
    reproducible regardless of input order.
    """
    if not values:
        raise ValueError("empty history")
    if kind is EstimatorKind.P100:
        return max(values)
    if kind is EstimatorKind.P50:
        return _nearest_rank(values, 1, 2)
    if kind is EstimatorKind.P75:
        return _nearest_rank(values, 3, 4)
    if kind is EstimatorKind.MODE:
        counts = Counter(values)
        return max(counts.items(), key=lambda kv: (kv[1], -kv[0]))[0]
    raise ValueError(f"unknown estimator kind: {kind!r}")


def estimate_job(job: JobSpec, kind: EstimatorKind) -> EstimatedJob:
    """Estimate duration and CPU columns independently (marginal estimation).

    The pairing of history records matters only for scenario sampling;
    point estimators look at each column on its own.
    """
    return EstimatedJob(
        id=job.id,
        q=job.q,
        f=job.f,
        u=job.u,
        deps=job.deps,
        d_hat=estimate(job.durations(), kind),
        r_hat=estimate(job.cpus(), kind),
    )
