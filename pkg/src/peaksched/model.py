"""Solver-neutral optimization model and the builders that produce it.

A :class:`ScheduleModel` is a plain value describing one scheduling
instance: integer start variables with inclusive domains, K scenarios
of (duration, demand) columns, deadline and precedence constraints that
are either hard or relaxable per scenario, and a minimize-the-peak
objective.  Four builders translate a :class:`~.domain.Problem` into it:

* ``build_det``   — single scenario from point estimates, nothing relaxable.
* ``build_cospis`` — K sampled scenarios, up to ``floor(K * alpha)`` of
  which may be written off entirely (constraints and peak both ignored).
* ``build_soru_pk`` — same, but on duration-only scenario sets, so the
  demand column is constant per job.
* ``build_milp``  — like ``build_det`` but flagged for the linearized
  start-event peak encoding instead of the sweep evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .domain import Problem
from .estimators import EstimatorKind, estimate_job
from .scenarios import ScenarioSet


class StructurallyInfeasibleError(ValueError):
    """A job can never meet its deadline, before any search starts."""

    def __init__(self, job_id: str, reason: str):
        self.job_id = job_id
        super().__init__(f"structurally infeasible: {job_id}: {reason}")


@dataclass(frozen=True)
class ScheduleModel:
    """Immutable model IR consumed by the solver.

    ``durations[k][j]`` / ``demands[k][j]`` give scenario k's column for
    job j (index into ``job_ids``).  ``edges`` holds (parent, child)
    index pairs.  When ``relaxable`` is true each scenario k carries a
    boolean v_k; setting v_k = 1 drops *all* of scenario k's deadline and
    precedence constraints and exempts its peak from the objective, and
    at most ``tolerance_budget`` scenarios may be dropped.  The objective
    is always: minimize the maximum peak over non-violated scenarios.
    """

    job_ids: tuple[str, ...]
    start_lo: tuple[int, ...]
    start_hi: tuple[int, ...]
    deadlines: tuple[int, ...]
    durations: tuple[tuple[int, ...], ...]
    demands: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]
    k: int
    tolerance_budget: int
    relaxable: bool
    big_m: int
    horizon: int
    linearized: bool = False

    def __post_init__(self) -> None:
        n = len(self.job_ids)
        if self.k < 1:
            raise ValueError(f"scenario count must be >= 1, got {self.k}")
        if not 0 <= self.tolerance_budget <= self.k:
            raise ValueError(f"tolerance budget {self.tolerance_budget} outside [0, {self.k}]")
        if self.big_m < self.horizon:
            raise ValueError(f"big-M {self.big_m} smaller than horizon {self.horizon}")
        if not (len(self.start_lo) == len(self.start_hi) == len(self.deadlines) == n):
            raise ValueError("inconsistent per-job field lengths")
        if len(self.durations) != self.k or len(self.demands) != self.k:
            raise ValueError("scenario row count does not match k")
        for row in (*self.durations, *self.demands):
            if len(row) != n:
                raise ValueError("scenario column count does not match job count")
        for parent, child in self.edges:
            if not (0 <= parent < n and 0 <= child < n) or parent == child:
                raise ValueError(f"bad edge ({parent}, {child})")

    @property
    def n(self) -> int:
        return len(self.job_ids)

    # --- constraint-listing views (derived; handy for debugging and tests) ---

    @property
    def start_domains(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.start_lo, self.start_hi))

    @property
    def deadline_constraints(self) -> list[tuple[str, int, int, bool]]:
        """(job id, scenario, rhs deadline, relaxable-by-v_k) per constraint."""
        return [
            (self.job_ids[j], k, self.deadlines[j], self.relaxable)
            for k in range(self.k)
            for j in range(self.n)
        ]

    @property
    def precedence_constraints(self) -> list[tuple[str, str, int, int, bool]]:
        """(parent id, child id, scenario, parent duration, relaxable)."""
        return [
            (self.job_ids[p], self.job_ids[c], k, self.durations[k][p], self.relaxable)
            for k in range(self.k)
            for p, c in self.edges
        ]

    @property
    def cumulative_groups(self) -> list[list[tuple[str, int, int]]]:
        """Per scenario: (job id, duration, demand) triples bounded by p_k."""
        return [
            [(self.job_ids[j], self.durations[k][j], self.demands[k][j]) for j in range(self.n)]
            for k in range(self.k)
        ]


@dataclass
class LinearizedVars:
    """Pairwise booleans and load contributions of the linearized encoding.

    Entry [j, i] refers to the ordered pair (j, i): delta1 says job i had
    started by the time job j starts, delta2 says job i had not yet
    finished, and res is i's demand if both hold.  Diagonals are zero.
    """

    delta1: np.ndarray
    delta2: np.ndarray
    res: np.ndarray
    loads: np.ndarray
    peak: int


def _big_m(p: Problem) -> int:
    max_dur = max((h.duration for j in p.jobs for h in j.history), default=0)
    return p.horizon + max_dur + 1


def _windows(p: Problem) -> tuple[list[int], list[int]]:
    los, his = [], []
    for job in p.jobs:
        lo, hi = job.start_window
        if lo > hi:
            raise StructurallyInfeasibleError(job.id, "empty start window")
        los.append(lo)
        his.append(hi)
    return los, his


def _edges(p: Problem) -> tuple[tuple[int, int], ...]:
    idx = p.job_index
    return tuple(
        (idx[dep], idx[job.id]) for job in p.jobs for dep in job.deps
    )


def build_det(p: Problem, kind: EstimatorKind) -> ScheduleModel:
    """Deterministic model: one scenario built from point estimates."""
    lo, hi = _windows(p)
    est = [estimate_job(job, kind) for job in p.jobs]
    for job, e in zip(p.jobs, est):
        if job.q + e.d_hat > job.u:
            raise StructurallyInfeasibleError(
                job.id,
                f"estimated duration {e.d_hat} cannot meet deadline {job.u} "
                f"even at the requested start {job.q}",
            )
    return ScheduleModel(
        job_ids=tuple(j.id for j in p.jobs),
        start_lo=tuple(lo),
        start_hi=tuple(hi),
        deadlines=tuple(j.u for j in p.jobs),
        durations=(tuple(e.d_hat for e in est),),
        demands=(tuple(e.r_hat for e in est),),
        edges=_edges(p),
        k=1,
        tolerance_budget=0,
        relaxable=False,
        big_m=_big_m(p),
        horizon=p.horizon,
    )


def build_milp(p: Problem, kind: EstimatorKind) -> ScheduleModel:
    """Deterministic model using the linearized start-event peak encoding."""
    return replace(build_det(p, kind), linearized=True)


def tolerance_budget(k: int, alpha: float) -> int:
    """floor(K * alpha), nudged so binary-float alphas round as intended."""
    return min(k, int(math.floor(k * alpha + 1e-9)))


def build_cospis(p: Problem, scen: ScenarioSet, alpha: float) -> ScheduleModel:
    """Scenario model: K sampled scenarios, a fraction alpha tolerable.

    No structural feasibility pre-check happens here: a scenario that can
    never be satisfied is simply one the solver must spend tolerance
    budget on (or prove the instance infeasible).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"tolerance must be within [0, 1], got {alpha}")
    lo, hi = _windows(p)
    rows_d = []
    rows_r = []
    for k in range(scen.k):
        rows_d.append(tuple(scen.draws[job.id][k].duration for job in p.jobs))
        rows_r.append(tuple(scen.draws[job.id][k].cpu for job in p.jobs))
    return ScheduleModel(
        job_ids=tuple(j.id for j in p.jobs),
        start_lo=tuple(lo),
        start_hi=tuple(hi),
        deadlines=tuple(j.u for j in p.jobs),
        durations=tuple(rows_d),
        demands=tuple(rows_r),
        edges=_edges(p),
        k=scen.k,
        tolerance_budget=tolerance_budget(scen.k, alpha),
        relaxable=True,
        big_m=_big_m(p),
        horizon=p.horizon,
    )


def build_soru_pk(p: Problem, scen: ScenarioSet, alpha: float) -> ScheduleModel:
    """Duration-only baseline: structurally identical to ``build_cospis``.

    Requires a scenario set from :func:`~.scenarios.sample_duration_only`
    so every scenario's demand column is the same per-job constant.
    """
    if scen.cpu_kind is None:
        raise ValueError(
            "build_soru_pk needs a duration-only scenario set "
            "(see sample_duration_only)"
        )
    return build_cospis(p, scen, alpha)


def linearized_peak(
    starts: np.ndarray, durations: np.ndarray, demands: np.ndarray
) -> int:
    """Peak via the start-event encoding: max over jobs of the total
    demand of jobs running at that job's start time.

    Evaluates the same quantity as the sweep (the peak of half-open
    intervals is attained at some interval start) through a genuinely
    different computation, which is what makes the deterministic /
    linearized equivalence checks meaningful.
    """
    n = len(starts)
    if n == 0:
        return 0
    s = np.asarray(starts, dtype=np.int64)
    d = np.asarray(durations, dtype=np.int64)
    r = np.asarray(demands, dtype=np.int64)
    # cover[j, i]: job i is executing at job j's start (diagonal included:
    # a job always overlaps its own start).
    cover = (s[None, :] <= s[:, None]) & (s[:, None] < s[None, :] + d[None, :])
    loads = cover @ r
    return int(loads.max())


def derive_linearized(m: ScheduleModel, starts: Mapping[str, int]) -> LinearizedVars:
    """Compute the pairwise variables the linearized encoding would take
    at fixed starts, choosing the minimal feasible values.

    delta1[j, i] = 1 iff s_j >= s_i; delta2[j, i] = 1 iff s_i + d_i > s_j;
    res[j, i] = demand_i when both are forced, else 0.
    """
    if not m.linearized:
        raise ValueError("model is not linearized")
    s = np.array([starts[job_id] for job_id in m.job_ids], dtype=np.int64)
    d = np.array(m.durations[0], dtype=np.int64)
    r = np.array(m.demands[0], dtype=np.int64)
    n = len(s)
    delta1 = (s[:, None] >= s[None, :]).astype(np.int64)
    delta2 = (s[None, :] + d[None, :] > s[:, None]).astype(np.int64)
    np.fill_diagonal(delta1, 0)
    np.fill_diagonal(delta2, 0)
    res = np.where((delta1 == 1) & (delta2 == 1), r[None, :], 0).astype(np.int64)
    loads = r + res.sum(axis=1)
    peak = int(loads.max()) if n else 0
    return LinearizedVars(delta1=delta1, delta2=delta2, res=res, loads=loads, peak=peak)


def dump_model(m: ScheduleModel) -> str:
    """Human-readable listing, one constraint per line.  For debugging;
    the format is stable but not meant to be parsed back."""
    lines = [
        f"model: n={m.n} k={m.k} budget={m.tolerance_budget} "
        f"big_m={m.big_m} horizon={m.horizon} "
        f"encoding={'linearized' if m.linearized else 'cumulative'}",
    ]
    for j, job_id in enumerate(m.job_ids):
        lines.append(f"var start[{job_id}] in [{m.start_lo[j]}, {m.start_hi[j]}]")
    if m.relaxable:
        lines.append(f"vars v[0..{m.k - 1}] in {{0,1}}; sum(v) <= {m.tolerance_budget}")
    tag = "soft" if m.relaxable else "hard"
    for k in range(m.k):
        for j, job_id in enumerate(m.job_ids):
            lines.append(
                f"[k={k}] {tag} deadline: start[{job_id}] + {m.durations[k][j]} "
                f"<= {m.deadlines[j]}"
            )
        for parent, child in m.edges:
            lines.append(
                f"[k={k}] {tag} precedence: start[{m.job_ids[parent]}] + "
                f"{m.durations[k][parent]} <= start[{m.job_ids[child]}]"
            )
        group = ", ".join(
            f"{m.job_ids[j]}:(d={m.durations[k][j]},r={m.demands[k][j]})"
            for j in range(m.n)
        )
        lines.append(f"[k={k}] cumulative <= p[{k}]: {group}")
    lines.append("objective: minimize max(p[k] for non-violated k)")
    return "\n".join(lines)
