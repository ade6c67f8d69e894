"""Anytime local search: seeded multi-restart simulated annealing.

The state is (starts, violated-set); moves either shift one job's start
within its window or swap a scenario in/out of the violated set.  Cost
is the max non-violated scenario peak plus a big-M penalty per violated
hard constraint, so the search walks infeasible regions but feasible
states always score better.

Determinism: every random number the kernel consumes — move selectors,
value selectors, acceptance thresholds — is pre-drawn here with NumPy
from seeds derived via SHA-256 from (cfg.seed, restart index), and the
kernel itself does integer arithmetic only.  Identical (model, config)
therefore give bit-identical answers on both kernel backends.  The time
limit is only consulted *between* restarts, so results stay reproducible
whenever the run completes inside it.
"""

from __future__ import annotations

import hashlib
import time

import numpy as np

from .. import _backend
from .._kernels_numpy import _violation_counts
from ..model import ScheduleModel
from ._common import (
    ProgressFn,
    Solution,
    SolveConfig,
    SolverStatus,
    model_arrays,
    peaks_at,
)

_RESTARTS = 4
_T_END = 0.5


def _restart_seed(seed: int, restart: int) -> int:
    digest = hashlib.sha256(f"sa:{seed}:{restart}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _iterations(n: int, k: int) -> int:
    return 3000 + 350 * n + 30 * k


def solve_anneal(m: ScheduleModel, cfg: SolveConfig,
                 on_progress: ProgressFn | None = None) -> Solution:
    arr = model_arrays(m)
    n, k = m.n, m.k
    nv = min(m.tolerance_budget, k)
    shift_prob = 1.0 if nv == 0 or nv >= k else 0.85
    iters = _iterations(n, k)
    t0 = time.monotonic()

    best: tuple[int, np.ndarray, np.ndarray] | None = None  # (cost, starts, viol)
    timed_out = False
    for restart in range(_RESTARTS):
        if restart > 0 and time.monotonic() - t0 > cfg.time_limit_s:
            timed_out = True
            break
        rng = np.random.default_rng(_restart_seed(cfg.seed, restart))
        if restart == 0:
            starts0 = arr.lo.copy()
        else:
            starts0 = arr.lo + (rng.random(n) * (arr.hi - arr.lo + 1)).astype(np.int64)
        peaks0 = np.asarray(_backend.scenario_peaks(starts0, arr.durs, arr.cpus))
        counts0 = _violation_counts(starts0, arr.durs, arr.cpus, arr.deadlines, arr.ep, arr.ec)
        order0 = np.lexsort((np.arange(k), -peaks0, -counts0))
        viol0 = np.zeros(k, dtype=bool)
        viol0[order0[:nv]] = True

        move_u = rng.random(iters)
        job_u = rng.random(iters)
        val_u = rng.random(iters)
        vout_u = rng.random(iters)
        vin_u = rng.random(iters)
        t_start = max(2.0, 0.2 * float(max(1, int(peaks0.max(initial=0)))))
        temps = t_start * (_T_END / t_start) ** (np.arange(iters) / max(1, iters - 1))
        thr = -temps * np.log(rng.random(iters) + 1e-300)

        found, cost, b_starts, b_viol = _backend.anneal(
            arr.lo, arr.hi, arr.durs, arr.cpus, arr.deadlines, arr.ep, arr.ec,
            int(m.big_m), starts0, viol0,
            move_u, job_u, val_u, vout_u, vin_u, thr, shift_prob,
        )
        if found and (best is None or cost < best[0]):
            best = (int(cost), np.asarray(b_starts).copy(), np.asarray(b_viol).copy())
            if on_progress is not None:
                on_progress("incumbent", time.monotonic() - t0, int(cost))

    if best is None:
        return Solution({}, (), frozenset(), 0, SolverStatus.TIMED_OUT_NO_INCUMBENT)

    _, starts, viol = best
    peaks = peaks_at(m, arr, starts)
    violated = frozenset(int(i) for i in np.flatnonzero(viol))
    objective = max((int(peaks[i]) for i in range(k) if i not in violated), default=0)
    status = SolverStatus.TIMED_OUT_WITH_INCUMBENT if timed_out else SolverStatus.FEASIBLE
    return Solution(
        starts={m.job_ids[j]: int(starts[j]) for j in range(n)},
        scenario_peaks=tuple(int(x) for x in peaks),
        violated=violated,
        objective=objective,
        status=status,
    )
