"""Core value types for jobs, problems, schedules and realized executions.

Time is discretized to integer seconds and all quantities are integers.
Job intervals are half-open: a job started at ``s`` with duration ``d``
occupies ``[s, s + d)``, so a job ending at ``t`` never overlaps a job
starting at ``t`` and back-to-back placements are not double counted.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._backend import scenario_peaks


@dataclass(frozen=True)
class HistoryRecord:
    """One historical execution of a job: runtime (seconds) and cores used."""

    duration: int
    cpu: int


@dataclass(frozen=True)
class JobSpec:
    """A single batch job.

    ``q`` is the requested start time, ``f`` the flexibility (how far past
    ``q`` the start may be pushed), ``u`` the completion deadline.  ``deps``
    lists the ids of parent jobs that must finish before this one starts.
    ``history`` holds past executions as paired (duration, cpu) records;
    the pairing is preserved because duration and CPU usage of a real run
    are correlated.

    Construction is lenient; :func:`validate_problem` is the enforcement
    point for all invariants.
    """

    id: str
    q: int
    f: int
    u: int
    deps: tuple[str, ...] = ()
    history: tuple[HistoryRecord, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "deps", tuple(self.deps))
        object.__setattr__(
            self,
            "history",
            tuple(
                h if isinstance(h, HistoryRecord) else HistoryRecord(int(h[0]), int(h[1]))
                for h in self.history
            ),
        )

    @property
    def start_window(self) -> tuple[int, int]:
        """Inclusive window of admissible start times: ``[q, min(q + f, u)]``."""
        return self.q, min(self.q + self.f, self.u)

    def durations(self) -> tuple[int, ...]:
        return tuple(h.duration for h in self.history)

    def cpus(self) -> tuple[int, ...]:
        return tuple(h.cpu for h in self.history)


@dataclass(frozen=True)
class Problem:
    """A set of jobs to be scheduled inside a fixed horizon of ``horizon`` seconds."""

    jobs: tuple[JobSpec, ...]
    horizon: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))

    @cached_property
    def job_index(self) -> Mapping[str, int]:
        return MappingProxyType({j.id: i for i, j in enumerate(self.jobs)})

    def job(self, job_id: str) -> JobSpec:
        return self.jobs[self.job_index[job_id]]

    @property
    def n(self) -> int:
        return len(self.jobs)


@dataclass(frozen=True)
class Schedule:
    """Start-time assignment plus the model's predicted peak (``p_est``)."""

    starts: Mapping[str, int]
    peak_estimate: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", MappingProxyType(dict(self.starts)))


@dataclass(frozen=True)
class Realization:
    """Outcome of executing a schedule once against concrete draws.

    ``actual_start`` can exceed the scheduled start when a parent overran;
    execution never violates dependencies, lateness is measured instead.
    """

    draws: Mapping[str, HistoryRecord]
    actual_start: Mapping[str, int]
    actual_end: Mapping[str, int]
    observed_peak: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "draws", MappingProxyType(dict(self.draws)))
        object.__setattr__(self, "actual_start", MappingProxyType(dict(self.actual_start)))
        object.__setattr__(self, "actual_end", MappingProxyType(dict(self.actual_end)))


def validate_problem(p: Problem) -> list[str]:
    """Check every problem invariant and return the violations found.

    An empty list means the problem is valid.  Violations are data, not
    faults: nothing is raised, and all of them are reported in one pass.
    """
    violations: list[str] = []
    seen: set[str] = set()
    for job in p.jobs:
        if job.id in seen:
            violations.append(f"duplicate job id: {job.id}")
        seen.add(job.id)

    ids = {j.id for j in p.jobs}
    for job in p.jobs:
        if job.q < 0:
            violations.append(f"{job.id}: requested start q={job.q} is negative")
        if job.f < 0:
            violations.append(f"{job.id}: flexibility f={job.f} is negative")
        if job.u <= job.q:
            violations.append(f"{job.id}: deadline u={job.u} not after requested start q={job.q}")
        if job.u > p.horizon:
            violations.append(f"{job.id}: deadline u={job.u} exceeds horizon {p.horizon}")
        if not job.history:
            violations.append(f"{job.id}: empty history")
        for i, rec in enumerate(job.history):
            if rec.duration < 1:
                violations.append(f"{job.id}: history[{i}] duration {rec.duration} < 1")
            if rec.cpu < 0:
                violations.append(f"{job.id}: history[{i}] cpu {rec.cpu} < 0")
        for dep in job.deps:
            if dep == job.id:
                violations.append(f"{job.id}: depends on itself")
            elif dep not in ids:
                violations.append(f"{job.id}: dangling dependency: {dep}")

    cycle = _find_cycle(p)
    if cycle:
        violations.append("cycle: {" + ",".join(sorted(cycle)) + "}")
    return violations


def topological_order(p: Problem) -> list[str]:
    """Job ids ordered so every job appears after all of its parents.

    Ties are broken by job id ascending, which makes the order
    deterministic across runs.  Raises ``ValueError`` naming the cycle
    members if the dependency graph is cyclic.
    """
    ids = [j.id for j in p.jobs]
    parents = {j.id: [d for d in j.deps if d in p.job_index and d != j.id] for j in p.jobs}
    order = _topo_sort(ids, parents)
    if order is None:
        cycle = _find_cycle(p)
        raise ValueError("dependency cycle: {" + ",".join(sorted(cycle)) + "}")
    return order


def _topo_sort(ids: Sequence[str], parents: Mapping[str, Sequence[str]]) -> list[str] | None:
    """Kahn's algorithm with a heap so equal-depth nodes come out id-sorted."""
    children: dict[str, list[str]] = {i: [] for i in ids}
    indeg = {i: 0 for i in ids}
    for child, ps in parents.items():
        for parent in ps:
            children[parent].append(child)
            indeg[child] += 1
    ready = [i for i in ids if indeg[i] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for c in children[node]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(ids):
        return None
    return order


def _find_cycle(p: Problem) -> list[str]:
    """Return the members of one dependency cycle, or [] if acyclic."""
    parents = {j.id: [d for d in j.deps if d in p.job_index and d != j.id] for j in p.jobs}
    order = _topo_sort([j.id for j in p.jobs], parents)
    if order is not None:
        return []
    # Nodes left with unresolved parents form the cyclic core; walk parent
    # links until a node repeats to extract one concrete cycle.
    done = set()
    remaining = {i for i in parents}
    # re-run Kahn to find which nodes resolved
    resolved = set()
    changed = True
    while changed:
        changed = False
        for i in remaining - resolved:
            if all(d in resolved for d in parents[i]):
                resolved.add(i)
                changed = True
    core = sorted(remaining - resolved)
    path: list[str] = []
    seen: dict[str, int] = {}
    node = core[0]
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = sorted(d for d in parents[node] if d not in resolved)[0]
    return path[seen[node]:]


def peak_usage(intervals: Iterable[tuple[int, int, int]]) -> int:
    """Maximum total demand over time of a set of ``(start, duration, demand)`` intervals.

    Each interval covers the half-open span ``[start, start + duration)``.
    Returns 0 for an empty collection.  Implemented as an event sweep; the
    maximum is always attained at some interval start.  Preconditions
    (not checked): durations >= 1, demands >= 0.
    """
    ivs = list(intervals)
    if not ivs:
        return 0
    starts = np.array([iv[0] for iv in ivs], dtype=np.int64)
    durs = np.array([[iv[1] for iv in ivs]], dtype=np.int64)
    dems = np.array([[iv[2] for iv in ivs]], dtype=np.int64)
    return int(scenario_peaks(starts, durs, dems)[0])
