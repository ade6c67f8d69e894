"""Solving a :class:`~peaksched.model.ScheduleModel`.

``solve`` picks between the exact branch-and-bound and the anytime local
search (directly or via the Auto job-count threshold); ``brute_force``
is the independent enumeration oracle used by the test suite;
``fallback_manual`` is the no-optimization schedule.  Every solution
that claims an assignment is replayed through ``audit_solution`` before
being returned.
"""

from __future__ import annotations

from ..model import ScheduleModel
from ._anneal import solve_anneal
from ._brute import brute_force, violation_masks
from ._common import (
    ProgressFn,
    Solution,
    SolveConfig,
    SolverStatus,
    Strategy,
    audit_solution,
    fallback_manual,
)
from ._exact import solve_exact

__all__ = [
    "ProgressFn",
    "Solution",
    "SolveConfig",
    "SolverStatus",
    "Strategy",
    "audit_solution",
    "brute_force",
    "fallback_manual",
    "solve",
    "violation_masks",
]

_AUDITED = {
    SolverStatus.OPTIMAL,
    SolverStatus.FEASIBLE,
    SolverStatus.TIMED_OUT_WITH_INCUMBENT,
}


def solve(
    m: ScheduleModel,
    cfg: SolveConfig | None = None,
    on_progress: ProgressFn | None = None,
) -> Solution:
    cfg = cfg if cfg is not None else SolveConfig()

    if m.n == 0:
        return Solution({}, tuple(0 for _ in range(m.k)), frozenset(), 0, SolverStatus.OPTIMAL)
    for j in range(m.n):
        if m.start_lo[j] > m.start_hi[j]:
            return Solution(
                {}, (), frozenset(), 0, SolverStatus.INFEASIBLE,
                core_hint=(f"empty start window: {m.job_ids[j]}",),
            )

    strategy = cfg.strategy
    if strategy is Strategy.AUTO:
        strategy = Strategy.EXACT if m.n <= cfg.auto_threshold else Strategy.LOCAL_SEARCH

    if strategy is Strategy.EXACT:
        sol = solve_exact(m, cfg, on_progress)
    else:
        sol = solve_anneal(m, cfg, on_progress)

    if sol.status in _AUDITED:
        audit_solution(m, sol)
    return sol
