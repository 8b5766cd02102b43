"""Integrator behavior: frozen dynamics, norm policing, sweeps."""

import math
from dataclasses import dataclass

import numpy as np
import pytest
from scipy.linalg import expm

from qchop.evolve import (
    IntegrationError,
    Schedule,
    evolve,
    resolve_runtime,
    run_single,
    sweep,
)
from qchop.hamiltonians import build_qchop, choose_lambda, composite_space_for, \
    normalize_problem, qchop_initial_state
from qchop.hilbert import CompositeSpace, StateVector
from qchop.problems import ConstrainedProblem, ZPolynomial, gen_knapsack_instance, \
    gen_mis_instance


@dataclass
class StubProgram:
    """Fixed-matrix action for closed-form integration checks."""

    space: CompositeSpace
    total_time: float
    matrix_fn: object

    def apply(self, t, amps):
        return self.matrix_fn(t) @ amps


class TestSchedule:
    def test_uniform(self):
        sched = Schedule.uniform(10.0, 11)
        assert len(sched.checkpoints) == 11
        assert sched.checkpoints[0] == 0.0 and sched.checkpoints[-1] == 10.0

    def test_validation(self):
        with pytest.raises(ValueError):
            Schedule(10.0, [0.0, 5.0])          # must end at T
        with pytest.raises(ValueError):
            Schedule(10.0, [1.0, 10.0])         # must start at 0
        with pytest.raises(ValueError):
            Schedule(10.0, [0.0, 10.0], rtol=0)


class TestEvolve:
    def test_null_dynamics(self):
        space = CompositeSpace(2)
        program = StubProgram(space, 5.0, lambda t: np.zeros((4, 4)))
        rng = np.random.default_rng(0)
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi0 = StateVector(space, amps / np.linalg.norm(amps))
        traj = evolve(program, psi0)
        assert np.allclose(traj.final.amplitudes, psi0.amplitudes, atol=1e-10)

    def test_half_z_phase_return(self):
        # H = Z/2 on |+>: after T = 2 pi the state returns up to a global phase
        space = CompositeSpace(1)
        z = np.diag([0.5, -0.5])
        program = StubProgram(space, 2 * math.pi, lambda t: z)
        psi0 = StateVector(space, np.array([1, 1]) / math.sqrt(2))
        traj = evolve(program, psi0)
        overlap = abs(np.vdot(psi0.amplitudes, traj.final.amplitudes))
        assert overlap == pytest.approx(1.0, abs=1e-8)
        # halfway the state is orthogonal: e^{-i pi Z/2}|+> = -i|->
        mid = traj.states[50]
        assert abs(np.vdot(psi0.amplitudes, mid.amplitudes)) < 1e-6

    def test_split_evolution_matches_single(self):
        rng = np.random.default_rng(1)
        dim = 8
        h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (h + h.conj().T) / 2
        space = CompositeSpace(3)
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi0 = StateVector(space, amps / np.linalg.norm(amps))
        whole = evolve(StubProgram(space, 4.0, lambda t: h), psi0).final
        half1 = evolve(StubProgram(space, 2.0, lambda t: h), psi0).final
        half2 = evolve(StubProgram(space, 2.0, lambda t: h), half1).final
        assert np.allclose(half2.amplitudes, whole.amplitudes, atol=1e-7)
        exact = expm(-1j * 4.0 * h) @ psi0.amplitudes
        assert np.allclose(whole.amplitudes, exact, atol=1e-7)

    def test_norm_drift_is_fatal(self):
        space = CompositeSpace(1)
        growth = 1j * np.eye(2)  # anti-Hermitian: amplifies the state
        program = StubProgram(space, 5.0, lambda t: growth)
        psi0 = StateVector(space, np.array([1.0, 0.0]))
        with pytest.raises(IntegrationError):
            evolve(program, psi0)

    def test_unnormalized_start_rejected(self):
        space = CompositeSpace(1)
        program = StubProgram(space, 1.0, lambda t: np.zeros((2, 2)))
        with pytest.raises(ValueError):
            evolve(program, StateVector(space, np.array([1.0, 1.0])))

    def test_matches_exponential_product(self):
        # time-ordered product of midpoint exponentials, 10^4 uniform steps
        problem, _ = normalize_problem(gen_mis_instance(4, seed=7))
        lam = choose_lambda(composite_space_for(problem))
        total_time = resolve_runtime("2piN", 4)
        program = build_qchop(problem, lam, total_time)
        psi0 = qchop_initial_state(problem)
        traj = evolve(program, psi0)
        steps = 10_000
        h = total_time / steps
        state = psi0.amplitudes.copy()
        for k in range(steps):
            mid = program.matrix((k + 0.5) * h)
            state = expm(-1j * h * mid) @ state
        fidelity = abs(np.vdot(state, traj.final.amplitudes)) ** 2
        assert fidelity >= 1.0 - 1e-6

    def test_tolerance_convergence(self):
        problem = gen_mis_instance(6, seed=8)
        loose = run_single(problem, "qchop", "2piN2", rtol=1e-8, atol=1e-8)
        tight = run_single(problem, "qchop", "2piN2", rtol=5e-9, atol=5e-9)
        assert abs(loose.final["r"] - tight.final["r"]) <= 1e-6


class TestResolveRuntime:
    def test_presets(self):
        assert resolve_runtime("2piN", 10) == pytest.approx(2 * math.pi * 10)
        assert resolve_runtime("2piN2", 10) == pytest.approx(2 * math.pi * 100)
        assert resolve_runtime("12.5", 10) == 12.5
        assert resolve_runtime(7, 10) == 7.0

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            resolve_runtime("fortnight", 4)


class TestRunSingle:
    def test_report_contents(self):
        problem = gen_mis_instance(4, seed=9)
        report = run_single(problem, "qchop", 20.0, n_checkpoints=11)
        assert len(report.times) == 11
        assert report.metadata["variant"] == "qchop"
        assert report.metadata["lambda"] == 4.0
        assert report.metadata["policy"] == "global-odd"
        assert report.integrator["n_evaluations"] > 0
        assert report.error is None
        # starts at the worst feasible state: r = 0, feasible probability 1
        assert report.r[0] == pytest.approx(0.0, abs=1e-12)
        assert report.p_feas[0] == pytest.approx(1.0, abs=1e-12)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            run_single(gen_mis_instance(4, seed=9), "grover", 10.0)

    def test_lambda_override(self):
        report = run_single(gen_mis_instance(4, seed=9), "qchop", 10.0, lam=8.0)
        assert report.metadata["lambda"] == 8.0


class TestSweep:
    def test_empty(self):
        result = sweep([], ["qchop"], [10.0])
        assert result.runs == [] and result.aggregates == {}

    def test_deterministic(self):
        problems = [gen_mis_instance(4, seed=s) for s in (0, 1)]
        a = sweep(problems, ["qchop", "saa"], [15.0], n_checkpoints=21)
        b = sweep(problems, ["qchop", "saa"], [15.0], n_checkpoints=21)
        for ra, rb in zip(a.runs, b.runs):
            assert np.array_equal(ra.r, rb.r)
            assert np.array_equal(ra.p_opt, rb.p_opt)
        assert a.aggregates == b.aggregates

    def test_failures_recorded_not_fatal(self):
        good = gen_mis_instance(4, seed=0)
        constant = ConstrainedProblem(2, ZPolynomial({frozenset(): 2.0}),
                                      worst_feasible=0, label="degenerate")
        result = sweep([good, constant], ["qchop"], [10.0], n_checkpoints=11)
        assert result.n_failures == 1
        errors = [r for r in result.runs if r.error is not None]
        assert len(errors) == 1 and errors[0].metadata["instance"] == "degenerate"
        assert result.aggregates["qchop@10.0"]["n"] == 1

    def test_aggregate_statistics(self):
        problems = [gen_mis_instance(4, seed=s) for s in (2, 3)]
        result = sweep(problems, ["qchop"], [15.0], n_checkpoints=11)
        stats = result.aggregates["qchop@15.0"]
        finals = [r.final["r"] for r in result.runs]
        assert stats["r"]["mean"] == pytest.approx(np.mean(finals))
        assert stats["r"]["min"] == pytest.approx(min(finals))
        assert stats["r"]["max"] == pytest.approx(max(finals))

    def test_select(self):
        problems = [gen_knapsack_instance(3, seed=4)]
        result = sweep(problems, ["qchop", "saa"], [10.0], n_checkpoints=11)
        assert len(result.select(variant="saa")) == 1
        assert result.select(variant="saa")[0].metadata["variant"] == "saa"

    def test_threaded_sweep_matches_serial(self, monkeypatch):
        problems = [gen_mis_instance(4, seed=s) for s in (5, 6)]
        serial = sweep(problems, ["qchop"], [12.0], n_checkpoints=11)
        monkeypatch.setenv("QCHOP_THREADS", "2")
        threaded = sweep(problems, ["qchop"], [12.0], n_checkpoints=11)
        for a, b in zip(serial.runs, threaded.runs):
            assert a.metadata["instance"] == b.metadata["instance"]
            assert np.array_equal(a.r, b.r)
            assert np.array_equal(a.p_opt, b.p_opt)
