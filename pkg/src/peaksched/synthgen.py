"""Synthetic problem generator for reproducible experiments.

Defaults: durations uniform in [10, 30] seconds, CPU uniform in [5, 10]
cores, 50 history records per job, flexibility drawn from
{20, 30, 80, 120}, horizon uniform in [500, 3000], at most 3
dependencies per job, and deadline u = q + f + max(duration history) —
so every start inside the window can absorb the worst recorded duration.

Two deliberate tightenings keep generated instances well-posed:

* q is drawn from [0, horizon - (max duration + max flexibility)], so
  every deadline fits inside the horizon;
* a job may only depend on earlier jobs whose requested start precedes
  its own by at least the global maximum duration.  Requested starts are
  then feasible under *every* possible draw, which keeps optimizing
  models satisfiable, while late parent placements chosen by an
  optimizer still make the precedence constraints bind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import HistoryRecord, JobSpec, Problem


@dataclass(frozen=True)
class GenConfig:
    n: int
    seed: int = 0
    duration_range: tuple[int, int] = (10, 30)
    cpu_range: tuple[int, int] = (5, 10)
    history_len: int = 50
    flexibility_choices: tuple[int, ...] = (20, 30, 80, 120)
    horizon_range: tuple[int, int] = (500, 3000)
    max_deps: int = 3

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"job count must be >= 1, got {self.n}")
        if self.history_len < 1:
            raise ValueError("history length must be >= 1")
        if not self.flexibility_choices:
            raise ValueError("flexibility choices must be nonempty")
        for name in ("duration_range", "cpu_range", "horizon_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty: [{lo}, {hi}]")
        if self.duration_range[0] < 1:
            raise ValueError("durations must be >= 1")


def generate(cfg: GenConfig) -> Problem:
    """Deterministic given cfg (including the seed)."""
    rng = np.random.default_rng(cfg.seed)
    dur_lo, dur_hi = cfg.duration_range
    cpu_lo, cpu_hi = cfg.cpu_range
    f_max = max(cfg.flexibility_choices)

    horizon = int(rng.integers(cfg.horizon_range[0], cfg.horizon_range[1] + 1))
    q_max = horizon - (dur_hi + f_max)
    if q_max < 0:
        raise ValueError(
            f"horizon {horizon} too small to fit any job "
            f"(needs at least {dur_hi + f_max})"
        )

    jobs: list[JobSpec] = []
    for i in range(cfg.n):
        durations = rng.integers(dur_lo, dur_hi + 1, size=cfg.history_len)
        cpus = rng.integers(cpu_lo, cpu_hi + 1, size=cfg.history_len)
        f = int(rng.choice(np.array(cfg.flexibility_choices)))
        q = int(rng.integers(0, q_max + 1))
        candidates = [j for j in jobs if j.q + dur_hi <= q]
        n_deps = int(rng.integers(0, min(cfg.max_deps, len(candidates)) + 1))
        if n_deps:
            picks = rng.choice(len(candidates), size=n_deps, replace=False)
            deps = tuple(sorted(candidates[int(c)].id for c in picks))
        else:
            deps = ()
        u = q + f + int(durations.max())
        jobs.append(
            JobSpec(
                id=f"j{i:03d}",
                q=q,
                f=f,
                u=u,
                deps=deps,
                history=tuple(
                    HistoryRecord(int(d), int(c)) for d, c in zip(durations, cpus)
                ),
            )
        )
    return Problem(jobs=tuple(jobs), horizon=horizon)
