"""Exhaustive test oracle: every start assignment, every violation subset.

Deliberately has no ideas in common with the branch-and-bound solver —
no propagation, no bounding, no greedy violated-set selection — so that
agreement between the two is meaningful evidence of correctness.
Guarded: refuses instances whose assignment x subset space exceeds 1e7.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .. import _backend
from ..model import ScheduleModel
from ._common import Solution, SolverStatus, model_arrays

_WORK_LIMIT = 10_000_000


def violation_masks(k: int, budget: int) -> np.ndarray:
    """All scenario-violation bitmasks with at most ``budget`` bits set,
    ordered by (popcount, value) so that enumeration order doubles as the
    smallest-violated-set tie-break."""
    masks: list[int] = []
    for size in range(budget + 1):
        group = [sum(1 << b for b in picks) for picks in combinations(range(k), size)]
        masks.extend(sorted(group))
    return np.array(masks, dtype=np.int64)


def brute_force(m: ScheduleModel) -> Solution:
    """True optimum by enumeration.  Ties: lexicographically smallest
    starts, then the smallest violated set (by cardinality, then mask)."""
    if m.k > 60:
        raise ValueError("instance too large for oracle (more than 60 scenarios)")
    assignments = 1
    for lo, hi in zip(m.start_lo, m.start_hi):
        if hi < lo:
            return Solution({}, (), frozenset(), 0, SolverStatus.INFEASIBLE)
        assignments *= hi - lo + 1
        if assignments > _WORK_LIMIT:
            raise ValueError("instance too large for oracle")
    n_masks = sum(comb(m.k, size) for size in range(m.tolerance_budget + 1))
    if assignments * n_masks > _WORK_LIMIT:
        raise ValueError("instance too large for oracle")

    arr = model_arrays(m)
    masks = violation_masks(m.k, m.tolerance_budget)
    found, objective, starts, mask = _backend.brute_search(
        arr.lo, arr.hi, arr.durs, arr.cpus, arr.deadlines, arr.ep, arr.ec, masks
    )
    if not found:
        return Solution({}, (), frozenset(), 0, SolverStatus.INFEASIBLE)
    starts = np.asarray(starts)
    violated = frozenset(b for b in range(m.k) if (int(mask) >> b) & 1)
    # report sweep-based peaks: the oracle never touches the linearized
    # encoding, even for models flagged for it (the two agree by design,
    # and the solver-vs-oracle tests are what prove that)
    peaks = np.asarray(_backend.scenario_peaks(starts, arr.durs, arr.cpus))
    return Solution(
        starts={m.job_ids[j]: int(starts[j]) for j in range(m.n)},
        scenario_peaks=tuple(int(x) for x in peaks),
        violated=violated,
        objective=int(objective),
        status=SolverStatus.OPTIMAL,
    )
