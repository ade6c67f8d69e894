"""Command-line surface: problem files, runs, sweeps, generation, reports.

One flat command.  Typical uses::

    peaksched --generate n=30,seed=7 --out problem.json
    peaksched --problem problem.json --approach cospis --samples 25 \\
        --tolerance 0.4 --runs 50 --out report.json
    peaksched --problem problem.json --sweep --out sweep.json

Exit codes: 0 success, 2 parse/validation failure, 3 the chosen approach
fell back to the manual schedule (infeasible model or no incumbent),
4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
import traceback
from dataclasses import dataclass, replace
from pathlib import Path

from .domain import HistoryRecord, JobSpec, Problem, Schedule, validate_problem
from .estimators import EstimatorKind
from .model import (
    ScheduleModel,
    StructurallyInfeasibleError,
    build_cospis,
    build_det,
    build_milp,
    build_soru_pk,
)
from .scenarios import sample_duration_only, sample_scenarios
from .simulate import evaluate
from .solver import SolveConfig, SolverStatus, Strategy, fallback_manual, solve
from .synthgen import GenConfig, generate

log = logging.getLogger("peaksched")

APPROACHES = ("none", "det", "cospis", "soru-pk", "milp")

DEFAULT_SAMPLES_GRID = tuple(range(5, 50, 5))  # 5, 10, ..., 45
DEFAULT_TOLERANCE_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))  # 0.1 .. 0.9


class ProblemFormatError(ValueError):
    """The problem file cannot be parsed into a Problem."""


class ProblemValidationError(ValueError):
    def __init__(self, path: str, violations: list[str]):
        self.violations = violations
        super().__init__(
            f"{path}: problem validation failed:\n  " + "\n  ".join(violations)
        )


@dataclass(frozen=True)
class RunSpec:
    """Everything needed to reproduce one run, echoed into the report."""

    approach: str
    estimator: EstimatorKind = EstimatorKind.P50
    samples: int = 25
    tolerance: float = 0.4
    time_limit_s: float = 900.0
    seed: int = 0
    runs: int = 50
    strategy: Strategy = Strategy.AUTO

    def validate(self) -> None:
        if self.approach not in APPROACHES:
            raise ValueError(f"unknown approach: {self.approach}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.time_limit_s <= 0:
            raise ValueError(f"time limit must be positive, got {self.time_limit_s}")
        if self.approach in ("cospis", "soru-pk"):
            if self.samples < 1:
                raise ValueError(f"samples must be >= 1, got {self.samples}")
            if not 0.0 <= self.tolerance <= 1.0:
                raise ValueError(f"tolerance must be in [0, 1], got {self.tolerance}")

    def to_dict(self) -> dict:
        return {
            "approach": self.approach,
            "estimator": self.estimator.value,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "time_limit_s": self.time_limit_s,
            "seed": self.seed,
            "runs": self.runs,
            "strategy": self.strategy.value,
        }


# --- problem file format ----------------------------------------------------


def problem_to_dict(p: Problem) -> dict:
    """Canonical form: jobs ordered by id, history pairs as given."""
    return {
        "horizon": p.horizon,
        "jobs": [
            {
                "id": job.id,
                "q": job.q,
                "f": job.f,
                "u": job.u,
                "deps": list(job.deps),
                "history": [[h.duration, h.cpu] for h in job.history],
            }
            for job in sorted(p.jobs, key=lambda j: j.id)
        ],
    }


def problem_to_json(p: Problem) -> str:
    return json.dumps(problem_to_dict(p), indent=2, sort_keys=True) + "\n"


def _require(doc: dict, field: str, where: str):
    if field not in doc:
        raise ProblemFormatError(f"{where}: missing field {field!r}")
    return doc[field]


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProblemFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def problem_from_dict(doc) -> Problem:
    if not isinstance(doc, dict):
        raise ProblemFormatError("top level: expected an object")
    horizon = _as_int(_require(doc, "horizon", "top level"), "horizon")
    jobs_doc = _require(doc, "jobs", "top level")
    if not isinstance(jobs_doc, list):
        raise ProblemFormatError("jobs: expected an array")
    jobs = []
    for i, jd in enumerate(jobs_doc):
        where = f"jobs[{i}]"
        if not isinstance(jd, dict):
            raise ProblemFormatError(f"{where}: expected an object")
        job_id = _require(jd, "id", where)
        if not isinstance(job_id, str) or not job_id:
            raise ProblemFormatError(f"{where}: id must be a nonempty string")
        deps = jd.get("deps", [])
        if not isinstance(deps, list) or not all(isinstance(d, str) for d in deps):
            raise ProblemFormatError(f"{where}: deps must be an array of job ids")
        history_doc = _require(jd, "history", where)
        if not isinstance(history_doc, list):
            raise ProblemFormatError(f"{where}: history must be an array of pairs")
        history = []
        for h_i, pair in enumerate(history_doc):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ProblemFormatError(
                    f"{where}.history[{h_i}]: expected a [duration, cpu] pair"
                )
            history.append(
                HistoryRecord(
                    _as_int(pair[0], f"{where}.history[{h_i}].duration"),
                    _as_int(pair[1], f"{where}.history[{h_i}].cpu"),
                )
            )
        jobs.append(
            JobSpec(
                id=job_id,
                q=_as_int(_require(jd, "q", where), f"{where}.q"),
                f=_as_int(_require(jd, "f", where), f"{where}.f"),
                u=_as_int(_require(jd, "u", where), f"{where}.u"),
                deps=tuple(deps),
                history=tuple(history),
            )
        )
    jobs.sort(key=lambda j: j.id)
    return Problem(jobs=tuple(jobs), horizon=horizon)


def load_problem(path: str | Path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ProblemFormatError(f"cannot read {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    problem = problem_from_dict(doc)
    violations = validate_problem(problem)
    if violations:
        raise ProblemValidationError(str(path), violations)
    return problem


def save_problem(p: Problem, path: str | Path) -> None:
    Path(path).write_text(problem_to_json(p))


# --- running ----------------------------------------------------------------


def _build_model(spec: RunSpec, p: Problem) -> ScheduleModel:
    if spec.approach == "det":
        return build_det(p, spec.estimator)
    if spec.approach == "milp":
        return build_milp(p, spec.estimator)
    if spec.approach == "cospis":
        scen = sample_scenarios(p, spec.samples, spec.seed)
        return build_cospis(p, scen, spec.tolerance)
    if spec.approach == "soru-pk":
        scen = sample_duration_only(p, spec.samples, spec.seed, spec.estimator)
        return build_soru_pk(p, scen, spec.tolerance)
    raise ValueError(f"unknown approach: {spec.approach}")


def _log_progress(phase: str, elapsed_s: float, objective) -> None:
    log.info("%s: objective=%s elapsed=%.2fs", phase, objective, elapsed_s)


def run(spec: RunSpec, p: Problem) -> dict:
    """Build, solve (or fall back), evaluate against the manual baseline
    under common random numbers, and assemble the report."""
    t0 = time.monotonic()
    spec.validate()
    base_sol = fallback_manual(p)
    baseline = Schedule(base_sol.starts, max(1, base_sol.objective))

    fallback_used = False
    objective = None
    violated: list[int] = []
    core_hint: tuple[str, ...] = ()
    solver_wall = 0.0

    if spec.approach == "none":
        status = base_sol.status.value
        objective = base_sol.objective
        schedule = baseline
    else:
        model = None
        try:
            model = _build_model(spec, p)
        except StructurallyInfeasibleError as e:
            status = SolverStatus.INFEASIBLE.value
            core_hint = (str(e),)
        if model is not None:
            cfg = SolveConfig(
                time_limit_s=spec.time_limit_s,
                seed=spec.seed,
                strategy=spec.strategy,
            )
            t_solve = time.monotonic()
            sol = solve(model, cfg, on_progress=_log_progress)
            solver_wall = time.monotonic() - t_solve
            status = sol.status.value
            core_hint = sol.core_hint
            violated = sorted(sol.violated)
            if sol.status not in (
                SolverStatus.INFEASIBLE,
                SolverStatus.TIMED_OUT_NO_INCUMBENT,
            ):
                objective = sol.objective
        if objective is None:
            fallback_used = True
            schedule = baseline
        else:
            schedule = Schedule(dict(sol.starts), max(1, objective))

    ev = evaluate(p, schedule, spec.runs, spec.seed, baseline)
    return {
        "spec": spec.to_dict(),
        "problem": problem_to_dict(p),
        "schedule": {job_id: int(s) for job_id, s in schedule.starts.items()},
        "p_est": schedule.peak_estimate,
        "objective": objective,
        "status": status,
        "fallback_used": fallback_used,
        "violated_scenarios": violated,
        "core_hint": list(core_hint),
        "baseline_p_est": baseline.peak_estimate,
        "per_run": ev["per_run"],
        "aggregates": ev["aggregates"],
        "timing": {
            "wall_clock_s": time.monotonic() - t0,
            "solver_wall_clock_s": solver_wall,
        },
    }


def sweep(
    p: Problem,
    samples_grid=DEFAULT_SAMPLES_GRID,
    tolerance_grid=DEFAULT_TOLERANCE_GRID,
    base: RunSpec | None = None,
) -> dict:
    """Run the scenario approach over a (samples x tolerance) grid.

    Per-cell failures are recorded in the cell and the sweep continues.
    The trend summary is informational only: Monte-Carlo noise means the
    tolerance direction is a tendency, not an invariant.
    """
    if not samples_grid or not tolerance_grid:
        raise ValueError("sweep grids must be nonempty")
    base = base if base is not None else RunSpec(approach="cospis")
    t0 = time.monotonic()
    cells = []
    for k in samples_grid:
        for alpha in tolerance_grid:
            spec = replace(base, approach="cospis", samples=int(k), tolerance=float(alpha))
            try:
                rep = run(spec, p)
                cells.append(
                    {
                        "samples": int(k),
                        "tolerance": float(alpha),
                        "status": rep["status"],
                        "fallback_used": rep["fallback_used"],
                        "p_est": rep["p_est"],
                        "aggregates": rep["aggregates"],
                    }
                )
            except Exception as e:  # record and continue: one bad cell must not kill the sweep
                log.warning("sweep cell samples=%s tolerance=%s failed: %s", k, alpha, e)
                cells.append(
                    {"samples": int(k), "tolerance": float(alpha), "error": str(e)}
                )

    by_tol: dict[float, list[float]] = {}
    for cell in cells:
        if "aggregates" in cell:
            by_tol.setdefault(cell["tolerance"], []).append(
                cell["aggregates"]["peak_reduction"]["mean"]
            )
    tol_means = [
        {"tolerance": t, "mean_peak_reduction": sum(v) / len(v)}
        for t, v in sorted(by_tol.items())
    ]
    steps = [
        (tol_means[i + 1]["mean_peak_reduction"] >= tol_means[i]["mean_peak_reduction"])
        for i in range(len(tol_means) - 1)
    ]
    trend = {
        "by_tolerance": tol_means,
        "nondecreasing_fraction": (sum(steps) / len(steps)) if steps else None,
        "note": (
            "informational: mean peak reduction by tolerance, averaged over "
            "the samples grid; expected to rise with tolerance up to "
            "Monte-Carlo noise"
        ),
    }
    return {
        "spec": base.to_dict(),
        "problem": problem_to_dict(p),
        "grid": {
            "samples": [int(k) for k in samples_grid],
            "tolerance": [float(a) for a in tolerance_grid],
        },
        "cells": cells,
        "trend": trend,
        "timing": {"wall_clock_s": time.monotonic() - t0},
    }


# --- report files -----------------------------------------------------------


def _write_json(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_run_csv(report: dict, path: Path) -> None:
    fields = [
        "run",
        "observed_peak",
        "under_err",
        "over_err",
        "max_deadline_violation_s",
        "mean_deadline_violation_s",
        "peak_reduction",
    ]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for i, row in enumerate(report["per_run"]):
            writer.writerow([i] + [row[k] for k in fields[1:]])


def _write_sweep_csv(report: dict, path: Path) -> None:
    fields = [
        "samples",
        "tolerance",
        "status",
        "mean_peak_reduction",
        "mean_under_err",
        "mean_over_err",
        "mean_max_deadline_violation_s",
        "error",
    ]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for cell in report["cells"]:
            if "error" in cell:
                writer.writerow(
                    [cell["samples"], cell["tolerance"], "error", "", "", "", "", cell["error"]]
                )
                continue
            agg = cell["aggregates"]
            writer.writerow(
                [
                    cell["samples"],
                    cell["tolerance"],
                    cell["status"],
                    agg["peak_reduction"]["mean"],
                    agg["under_err"]["mean"],
                    agg["over_err"]["mean"],
                    agg["max_deadline_violation_s"]["mean"],
                    "",
                ]
            )


# --- entry point ------------------------------------------------------------


def _parse_generate_arg(text: str) -> GenConfig:
    fields: dict[str, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"--generate: expected key=value, got {part!r}")
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in ("n", "seed"):
            raise ValueError(f"--generate: unknown key {key!r} (use n=..,seed=..)")
        try:
            fields[key] = int(value)
        except ValueError:
            raise ValueError(f"--generate: {key} must be an integer, got {value!r}")
    if "n" not in fields:
        raise ValueError("--generate: n=.. is required")
    return GenConfig(n=fields["n"], seed=fields.get("seed", 0))


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peaksched",
        description=(
            "Schedule batch jobs inside their flexibility windows to "
            "minimize peak CPU usage, and measure how the schedule holds "
            "up under Monte-Carlo execution."
        ),
    )
    parser.add_argument("--problem", metavar="PATH", help="problem file (JSON)")
    parser.add_argument(
        "--approach",
        choices=APPROACHES,
        default="none",
        help="scheduling approach (default: none = manual baseline)",
    )
    parser.add_argument(
        "--estimator",
        choices=[k.value for k in EstimatorKind],
        default="p50",
        help="point estimator for det/milp and the soru-pk cpu column",
    )
    parser.add_argument("--samples", type=int, default=25, help="scenario count K")
    parser.add_argument(
        "--tolerance", type=float, default=0.4,
        help="fraction of scenarios allowed to be written off",
    )
    parser.add_argument("--time-limit-s", type=float, default=900.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--runs", type=int, default=50, help="Monte-Carlo runs")
    parser.add_argument(
        "--strategy",
        choices=[s.value for s in Strategy],
        default="auto",
    )
    parser.add_argument("--out", metavar="PATH", help="report JSON path (CSV written next to it)")
    parser.add_argument(
        "--sweep", action="store_true",
        help="run the scenario approach over the default samples x tolerance grid",
    )
    parser.add_argument(
        "--generate", metavar="n=..,seed=..",
        help="generate a synthetic problem to --out instead of running",
    )
    parser.add_argument("--verbose", action="store_true", help="log solver progress to stderr")
    return parser


def _spec_from_args(args: argparse.Namespace) -> RunSpec:
    return RunSpec(
        approach=args.approach,
        estimator=EstimatorKind(args.estimator),
        samples=args.samples,
        tolerance=args.tolerance,
        time_limit_s=args.time_limit_s,
        seed=args.seed,
        runs=args.runs,
        strategy=Strategy(args.strategy),
    )


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.generate is not None:
            if not args.out:
                print("--generate requires --out", file=sys.stderr)
                return 2
            try:
                cfg = _parse_generate_arg(args.generate)
            except ValueError as e:
                print(str(e), file=sys.stderr)
                return 2
            problem = generate(cfg)
            save_problem(problem, args.out)
            print(f"wrote problem with {problem.n} jobs to {args.out}")
            return 0

        if not args.problem:
            print("--problem is required (or use --generate)", file=sys.stderr)
            return 2
        try:
            problem = load_problem(args.problem)
        except (ProblemFormatError, ProblemValidationError) as e:
            print(str(e), file=sys.stderr)
            return 2

        try:
            spec = _spec_from_args(args)
            spec.validate()
        except ValueError as e:
            print(str(e), file=sys.stderr)
            return 2

        if args.sweep:
            report = sweep(problem, base=spec)
            if args.out:
                out = Path(args.out)
                _write_json(report, out)
                _write_sweep_csv(report, out.with_suffix(".csv"))
                print(f"wrote sweep report to {out} and {out.with_suffix('.csv')}")
            else:
                print(json.dumps(report, indent=2, sort_keys=True))
            return 0

        report = run(spec, problem)
        if args.out:
            out = Path(args.out)
            _write_json(report, out)
            _write_run_csv(report, out.with_suffix(".csv"))
            print(f"wrote report to {out} and {out.with_suffix('.csv')}")
        else:
            print(json.dumps(report, indent=2, sort_keys=True))
        if report["fallback_used"]:
            log.warning("approach %s fell back to the manual schedule", spec.approach)
            return 3
        return 0
    except Exception:
        traceback.print_exc()
        return 4


if __name__ == "__main__":
    sys.exit(main())
