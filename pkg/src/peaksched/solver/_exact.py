"""Exact depth-first branch-and-bound over start variables.

Variables are branched in topological order (so precedence propagation
is maximally effective) with values tried earliest-first.  Per scenario,
a forward earliest-start pass combined with static latest-start bounds
gives an exact can-this-scenario-still-be-clean test; scenarios that
cannot be clean must be written off against the tolerance budget, and a
node dies when that budget is exceeded.  Objective pruning uses a
timetable relaxation of each scenario's cumulative constraint: intervals
of fixed jobs plus compulsory parts of unfixed ones.

Tie-breaking is deterministic everywhere: jobs by topological order with
id tie-breaks, values ascending, the incumbent replaced only on strict
improvement.
"""

from __future__ import annotations

import time

import numpy as np

from ..domain import _topo_sort
from ..model import ScheduleModel
from ._common import (
    ModelArrays,
    ProgressFn,
    Solution,
    SolveConfig,
    SolverStatus,
    model_arrays,
    peaks_at,
    select_violated,
)

_TIME_CHECK_MASK = 127  # check the clock every 128 nodes


class _TimeUp(Exception):
    pass


def _topo_indices(m: ScheduleModel) -> list[int]:
    ids = list(m.job_ids)
    parents: dict[str, list[str]] = {i: [] for i in ids}
    for p_idx, c_idx in m.edges:
        parents[ids[c_idx]].append(ids[p_idx])
    order = _topo_sort(ids, parents)
    if order is None:
        raise ValueError("model dependency graph is cyclic")
    pos = {job_id: i for i, job_id in enumerate(ids)}
    return [pos[job_id] for job_id in order]


def _static_latest_starts(m: ScheduleModel, arr: ModelArrays, rev_topo: list[int]) -> np.ndarray:
    """sub[k, j]: latest start of j in scenario k compatible with its own
    deadline, its window, and (recursively) its children's latest starts."""
    sub = np.minimum(arr.hi[None, :], arr.deadlines[None, :] - arr.durs)
    children: list[list[int]] = [[] for _ in range(m.n)]
    for p_idx, c_idx in m.edges:
        children[p_idx].append(c_idx)
    for j in rev_topo:
        for c in children[j]:
            np.minimum(sub[:, j], sub[:, c] - arr.durs[:, j], out=sub[:, j])
    return sub


class _Search:
    def __init__(self, m: ScheduleModel, arr: ModelArrays, cfg: SolveConfig,
                 on_progress: ProgressFn | None):
        self.m = m
        self.arr = arr
        self.cfg = cfg
        self.on_progress = on_progress
        self.order = _topo_indices(m)
        self.parents: list[list[int]] = [[] for _ in range(m.n)]
        for p_idx, c_idx in m.edges:
            self.parents[c_idx].append(p_idx)
        self.sub = _static_latest_starts(m, arr, list(reversed(self.order)))
        self.fixed = np.full(m.n, -1, dtype=np.int64)
        self.incumbent: Solution | None = None
        self.nodes = 0
        self.t0 = time.monotonic()

    # -- per-node reasoning ------------------------------------------------

    def _forward(self) -> tuple[np.ndarray, np.ndarray]:
        """Earliest feasible starts per scenario given the fixed prefix,
        and the exact per-scenario cannot-be-clean flags."""
        m, arr = self.m, self.arr
        flb = np.empty((m.k, m.n), dtype=np.int64)
        dirty = np.zeros(m.k, dtype=bool)
        for j in self.order:
            req = np.full(m.k, arr.lo[j], dtype=np.int64)
            for p in self.parents[j]:
                np.maximum(req, flb[:, p] + arr.durs[:, p], out=req)
            if self.fixed[j] >= 0:
                sj = self.fixed[j]
                dirty |= (sj < req) | (sj > self.sub[:, j])
                flb[:, j] = sj
            else:
                dirty |= req > self.sub[:, j]
                flb[:, j] = req
        return flb, dirty

    def _timetable_bounds(self, flb: np.ndarray, dirty: np.ndarray) -> np.ndarray:
        """Per-scenario objective lower bounds: the peak of fixed intervals
        plus compulsory parts of unfixed jobs, and never below the largest
        single demand (every job has to run somewhere)."""
        m, arr = self.m, self.arr
        lb = np.zeros(m.k, dtype=np.int64)
        unfixed = self.fixed < 0
        for k in range(m.k):
            if dirty[k]:
                continue
            starts: list[int] = []
            durs: list[int] = []
            dems: list[int] = []
            for j in range(m.n):
                d = int(arr.durs[k, j])
                r = int(arr.cpus[k, j])
                if r == 0:
                    continue
                if unfixed[j]:
                    cp_start = int(self.sub[k, j])
                    cp_end = int(flb[k, j]) + d
                    if cp_start < cp_end:  # compulsory part exists
                        starts.append(cp_start)
                        durs.append(cp_end - cp_start)
                        dems.append(r)
                else:
                    starts.append(int(self.fixed[j]))
                    durs.append(d)
                    dems.append(r)
            peak = 0
            if starts:
                events = sorted(
                    [(s * 2 + 1, r) for s, r in zip(starts, dems)]
                    + [((s + d) * 2, -r) for s, d, r in zip(starts, durs, dems)]
                )
                run = 0
                for _, delta in events:
                    run += delta
                    if run > peak:
                        peak = run
            lb[k] = max(peak, int(arr.cpus[k].max(initial=0)))
        return lb

    def _node_bound(self, lb: np.ndarray, dirty: np.ndarray) -> int:
        """Lower bound on the objective of any completion: after spending
        the remaining tolerance on the largest clean-scenario bounds, the
        best reachable objective is the (avail+1)-th largest bound."""
        avail = self.m.tolerance_budget - int(dirty.sum())
        lbs = np.sort(lb[~dirty])
        if avail >= lbs.size:
            return 0
        return int(lbs[lbs.size - avail - 1])

    # -- search ------------------------------------------------------------

    def run(self) -> None:
        self._dfs(0)

    def _dfs(self, pos: int) -> None:
        self.nodes += 1
        if (self.nodes & _TIME_CHECK_MASK) == 0:
            if time.monotonic() - self.t0 > self.cfg.time_limit_s:
                raise _TimeUp()

        flb, dirty = self._forward()
        ndirty = int(dirty.sum())
        if ndirty > self.m.tolerance_budget:
            return
        if pos == self.m.n:
            self._record_leaf(dirty)
            return
        if self.incumbent is not None:
            lb = self._timetable_bounds(flb, dirty)
            if self._node_bound(lb, dirty) >= self.incumbent.objective:
                return

        j = self.order[pos]
        flb_j = flb[:, j]
        sub_j = self.sub[:, j]
        for v in range(int(self.arr.lo[j]), int(self.arr.hi[j]) + 1):
            value_dirty = dirty | (v < flb_j) | (v > sub_j)
            if int(value_dirty.sum()) > self.m.tolerance_budget:
                continue
            self.fixed[j] = v
            self._dfs(pos + 1)
            self.fixed[j] = -1

    def _record_leaf(self, dirty: np.ndarray) -> None:
        m = self.m
        peaks = peaks_at(m, self.arr, self.fixed)
        violated, objective = select_violated(peaks, dirty, m.tolerance_budget)
        if self.incumbent is not None and objective >= self.incumbent.objective:
            return
        self.incumbent = Solution(
            starts={m.job_ids[j]: int(self.fixed[j]) for j in range(m.n)},
            scenario_peaks=tuple(int(x) for x in peaks),
            violated=violated,
            objective=objective,
            status=SolverStatus.FEASIBLE,  # finalized by solve_exact
        )
        if self.on_progress is not None:
            self.on_progress("incumbent", time.monotonic() - self.t0, objective)


def solve_exact(m: ScheduleModel, cfg: SolveConfig,
                on_progress: ProgressFn | None = None) -> Solution:
    arr = model_arrays(m)
    search = _Search(m, arr, cfg, on_progress)

    # Root analysis: a scenario no assignment can satisfy must be written
    # off in every solution, so too many of them proves infeasibility.
    _, root_dirty = search._forward()
    if int(root_dirty.sum()) > m.tolerance_budget:
        first = int(np.flatnonzero(root_dirty)[0])
        return Solution(
            starts={},
            scenario_peaks=(),
            violated=frozenset(),
            objective=0,
            status=SolverStatus.INFEASIBLE,
            core_hint=_conflict_core(m, arr, search, first),
        )

    timed_out = False
    try:
        search.run()
    except _TimeUp:
        timed_out = True

    inc = search.incumbent
    if inc is None:
        if timed_out:
            return Solution({}, (), frozenset(), 0, SolverStatus.TIMED_OUT_NO_INCUMBENT)
        return Solution(
            {}, (), frozenset(), 0, SolverStatus.INFEASIBLE,
            core_hint=("no single-scenario conflict; the tolerance budget is "
                       "exhausted by incompatible scenario combinations",),
        )
    status = SolverStatus.TIMED_OUT_WITH_INCUMBENT if timed_out else SolverStatus.OPTIMAL
    return Solution(
        starts=inc.starts,
        scenario_peaks=inc.scenario_peaks,
        violated=inc.violated,
        objective=inc.objective,
        status=status,
        core_hint=inc.core_hint,
    )


def _conflict_core(m: ScheduleModel, arr: ModelArrays, search: _Search,
                   scenario: int) -> tuple[str, ...]:
    """Minimal conflicting constraint subset of one unsatisfiable scenario,
    found by removal probing: drop each constraint in turn and keep it
    only if the rest becomes satisfiable without it."""
    deadline_cs = [("deadline", j) for j in range(m.n)]
    prec_cs = [("prec", e) for e in range(len(arr.ep))]
    core = deadline_cs + prec_cs

    def satisfiable(active: list[tuple[str, int]]) -> bool:
        dl_on = {j for tag, j in active if tag == "deadline"}
        pr_on = {e for tag, e in active if tag == "prec"}
        sub = arr.hi.astype(np.int64).copy()
        for j in dl_on:
            sub[j] = min(sub[j], int(arr.deadlines[j] - arr.durs[scenario, j]))
        for j in reversed(search.order):
            for e in pr_on:
                if int(arr.ep[e]) == j:
                    c = int(arr.ec[e])
                    sub[j] = min(sub[j], int(sub[c] - arr.durs[scenario, j]))
        flb = arr.lo.astype(np.int64).copy()
        for j in search.order:
            for e in pr_on:
                if int(arr.ec[e]) == j:
                    p = int(arr.ep[e])
                    flb[j] = max(flb[j], int(flb[p] + arr.durs[scenario, p]))
            if flb[j] > sub[j]:
                return False
        return True

    kept: list[tuple[str, int]] = []
    rest = list(core)
    while rest:
        candidate = rest.pop(0)
        if satisfiable(kept + rest):
            kept.append(candidate)  # removing it resolves the conflict: essential
    lines = []
    for tag, x in kept:
        if tag == "deadline":
            lines.append(
                f"scenario {scenario}: start[{m.job_ids[x]}] + "
                f"{int(arr.durs[scenario, x])} <= {int(arr.deadlines[x])}"
            )
        else:
            p, c = int(arr.ep[x]), int(arr.ec[x])
            lines.append(
                f"scenario {scenario}: start[{m.job_ids[p]}] + "
                f"{int(arr.durs[scenario, p])} <= start[{m.job_ids[c]}]"
            )
    return tuple(lines)
