"""Schroedinger time integration and benchmark sweeps.

States evolve under i d/dt psi = H(t) psi with H supplied as a black-box
action by a :class:`~qchop.hamiltonians.HamiltonianProgram`.  Integration
uses an adaptive eighth-order explicit Runge-Kutta method (DOP853) with
embedded error control, absolute and relative tolerances 1e-8 by default,
and exact stepping to the requested checkpoints.  Norm drift beyond 1e-6 at
any checkpoint is a hard failure, never silently renormalized.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .hamiltonians import (
    QCHOP_CD,
    SAA,
    VARIANTS,
    HamiltonianProgram,
    RotationPolicy,
    build_qchop,
    build_saa,
    choose_lambda,
    composite_space_for,
    normalize_problem,
    qchop_initial_state,
    saa_initial_state,
)
from .hilbert import StateVector
from .metrics import MetricsReport, StateMetrics
from .problems import ConstrainedProblem, OracleResult, brute_force_solve

NORM_TOL = 1e-6


class IntegrationError(RuntimeError):
    """The integrator failed or the state norm drifted beyond tolerance."""


@dataclass
class Schedule:
    """Total runtime, checkpoint times, and integrator tolerances."""

    total_time: float
    checkpoints: np.ndarray
    rtol: float = 1e-8
    atol: float = 1e-8

    def __post_init__(self):
        self.checkpoints = np.asarray(self.checkpoints, dtype=float)
        if self.total_time <= 0:
            raise ValueError("total time must be positive")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if len(self.checkpoints) < 2 or self.checkpoints[0] != 0.0 \
                or self.checkpoints[-1] != self.total_time:
            raise ValueError("checkpoints must run from 0 to the total time")
        if np.any(np.diff(self.checkpoints) <= 0):
            raise ValueError("checkpoints must be strictly ascending")

    @classmethod
    def uniform(cls, total_time: float, n_checkpoints: int = 101,
                rtol: float = 1e-8, atol: float = 1e-8) -> "Schedule":
        times = np.linspace(0.0, total_time, n_checkpoints)
        return cls(total_time, times, rtol, atol)


@dataclass
class Trajectory:
    """Checkpoint states of one integration plus solver statistics."""

    times: np.ndarray
    states: list[StateVector]
    n_evaluations: int
    max_norm_drift: float

    @property
    def final(self) -> StateVector:
        return self.states[-1]


def evolve(program: HamiltonianProgram, psi0: StateVector,
           schedule: Schedule | None = None) -> Trajectory:
    """Integrate from t = 0 to the program's total time.

    The initial state must be normalized and live in the program's space.
    """
    if schedule is None:
        schedule = Schedule.uniform(program.total_time)
    if not math.isclose(schedule.total_time, program.total_time, rel_tol=1e-12):
        raise ValueError("schedule and program disagree on the total time")
    if psi0.space != program.space:
        raise ValueError("initial state lives in a different space than the program")
    psi0.check_norm(NORM_TOL)

    def rhs(t, y):
        return -1j * program.apply(t, y)

    sol = solve_ivp(
        rhs, (0.0, schedule.total_time), psi0.amplitudes, method="DOP853",
        t_eval=schedule.checkpoints, rtol=schedule.rtol, atol=schedule.atol,
    )
    if not sol.success:
        raise IntegrationError(f"integration failed: {sol.message}")
    states = [StateVector(program.space, sol.y[:, i]) for i in range(sol.y.shape[1])]
    drift = max(abs(s.norm() ** 2 - 1.0) for s in states)
    if drift > NORM_TOL:
        raise IntegrationError(f"norm drifted by {drift:.3e} (> {NORM_TOL:.1e})")
    return Trajectory(times=sol.t, states=states, n_evaluations=int(sol.nfev),
                      max_norm_drift=float(drift))


def resolve_runtime(spec, n_qubits: int) -> float:
    """Translate a runtime preset ("2piN", "2piN2") or number into a time."""
    if isinstance(spec, str):
        if spec == "2piN":
            return 2.0 * math.pi * n_qubits
        if spec == "2piN2":
            return 2.0 * math.pi * n_qubits ** 2
        try:
            return float(spec)
        except ValueError:
            raise ValueError(f"unknown runtime preset {spec!r}") from None
    return float(spec)


def run_single(problem: ConstrainedProblem, variant: str, total_time,
               *, lam: float | None = None, epsilon: float | None = None,
               n_checkpoints: int = 101, rtol: float = 1e-9, atol: float = 1e-9,
               policy: RotationPolicy | None = None,
               oracle: OracleResult | None = None,
               keep_states: bool = False) -> MetricsReport:
    """Normalize, build, integrate, and measure one (instance, variant, T) run.

    The harness tolerances default to 1e-9, one decade tighter than the bare
    integrator's 1e-8: penalty-baseline runs accumulate a systematic norm
    drift that would otherwise brush the 1e-6 gate on larger instances.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    normalized, report = normalize_problem(problem)
    space = composite_space_for(normalized)
    lam = choose_lambda(space, report, lam)
    total_time = resolve_runtime(total_time, space.n_qubits)
    if variant == SAA:
        program = build_saa(normalized, lam, total_time)
        psi0 = saa_initial_state(space)
    else:
        program = build_qchop(normalized, lam, total_time, cd=(variant == QCHOP_CD),
                              policy=policy)
        psi0 = qchop_initial_state(normalized, space)
    if oracle is None:
        oracle = brute_force_solve(normalized)
    evaluator = StateMetrics(normalized, space, oracle, epsilon)
    schedule = Schedule.uniform(total_time, n_checkpoints, rtol, atol)
    trajectory = evolve(program, psi0, schedule)
    values = np.array([evaluator.evaluate(s) for s in trajectory.states])
    metadata = {
        "instance": problem.label,
        "variant": variant,
        "T": float(total_time),
        "lambda": float(lam),
        "normalization": report.norm,
        "epsilon": evaluator.epsilon,
        "policy": program.policy.value if program.policy else None,
        "n_qubits": space.n_qubits,
        "dim": space.dim,
        "seed": problem.meta.get("seed"),
    }
    return MetricsReport(
        times=trajectory.times, r=values[:, 0], p_feas=values[:, 1],
        p_opt=values[:, 2], p_eps=values[:, 3], epsilon=evaluator.epsilon,
        metadata=metadata,
        integrator={"n_evaluations": trajectory.n_evaluations,
                    "max_norm_drift": trajectory.max_norm_drift,
                    "rtol": rtol, "atol": atol},
        states=trajectory.states if keep_states else None,
    )


@dataclass
class SweepResult:
    """All per-run reports of a sweep plus aggregate statistics."""

    runs: list[MetricsReport]
    aggregates: dict = field(default_factory=dict)
    n_failures: int = 0

    def select(self, variant: str | None = None, total_time: float | None = None,
               instance: str | None = None) -> list[MetricsReport]:
        out = []
        for run in self.runs:
            meta = run.metadata
            if variant is not None and meta.get("variant") != variant:
                continue
            if total_time is not None and not math.isclose(meta.get("T", -1.0), total_time):
                continue
            if instance is not None and meta.get("instance") != instance:
                continue
            out.append(run)
        return out


def _max_workers() -> int:
    value = os.environ.get("QCHOP_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def sweep(problems, variants, total_times, *, lam: float | None = None,
          epsilon: float | None = None, n_checkpoints: int = 101,
          rtol: float = 1e-9, atol: float = 1e-9) -> SweepResult:
    """Run every (instance, variant, T) combination and aggregate final metrics.

    Individual failures are recorded on their reports rather than aborting
    the sweep.  Work items may execute on QCHOP_THREADS threads; results are
    merged in work-item order, so output is deterministic either way.
    """
    problems = list(problems)
    variants = [variants] if isinstance(variants, str) else list(variants)
    try:
        iter(total_times)
    except TypeError:
        total_times = [total_times]
    if isinstance(total_times, str):
        total_times = [total_times]
    work = [(p, v, t) for p in problems for v in variants for t in total_times]

    def job(item):
        problem, variant, total_time = item
        try:
            report = run_single(problem, variant, total_time, lam=lam, epsilon=epsilon,
                                n_checkpoints=n_checkpoints, rtol=rtol, atol=atol)
        except (IntegrationError, ValueError) as exc:
            report = MetricsReport(
                times=np.array([]), r=np.array([]), p_feas=np.array([]),
                p_opt=np.array([]), p_eps=np.array([]),
                epsilon=epsilon if epsilon is not None else problem.epsilon,
                metadata={"instance": problem.label, "variant": variant,
                          "T": resolve_runtime(total_time, problem.n_vars)},
                error=str(exc),
            )
        report.metadata["T_spec"] = str(total_time)
        return report

    workers = _max_workers()
    if workers > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(job, work))
    else:
        runs = [job(item) for item in work]

    aggregates: dict = {}
    n_failures = sum(1 for r in runs if r.error is not None)
    for variant in variants:
        for total_time in total_times:
            finals = [r.final for r in runs
                      if r.error is None and r.metadata.get("variant") == variant
                      and r.metadata.get("T_spec") == str(total_time)]
            if not finals:
                continue
            stats = {}
            for key in ("r", "p_feas", "p_opt", "p_eps"):
                vals = np.array([f[key] for f in finals])
                stats[key] = {"mean": float(vals.mean()), "min": float(vals.min()),
                              "max": float(vals.max())}
            aggregates[f"{variant}@{total_time}"] = {"n": len(finals), **stats}
    return SweepResult(runs=runs, aggregates=aggregates, n_failures=n_failures)
