"""Observables over simulated states: approximation ratio and success probabilities.

All quantities are expectation values of diagonal operators, evaluated in a
single pass over the composite basis:

* feasibility uses the constraint diagonal, so a basis state counts as
  feasible only when its qubit part satisfies every constraint *and* each
  slack digit records the constraint value D(x);
* the approximation ratio rescales the objective affinely so the best and
  worst feasible states score 1 and 0, with all probability outside the
  feasible manifold scoring 0;
* optimal (and epsilon-optimal) probabilities collect feasible probability
  mass whose ratio reaches 1 (or 1 - epsilon) up to a 1e-9 tie tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hamiltonians import composite_space_for, constraint_diagonal
from .hilbert import CompositeSpace, StateVector
from .problems import TIE_TOL, ConstrainedProblem, OracleResult, brute_force_solve


@dataclass
class MetricsReport:
    """Per-checkpoint expectations for one run, plus its configuration."""

    times: np.ndarray
    r: np.ndarray
    p_feas: np.ndarray
    p_opt: np.ndarray
    p_eps: np.ndarray
    epsilon: float
    metadata: dict = field(default_factory=dict)
    integrator: dict = field(default_factory=dict)
    error: str | None = None
    states: list | None = None

    @property
    def final(self) -> dict:
        if self.error is not None or len(self.times) == 0:
            return {}
        return {
            "r": float(self.r[-1]),
            "p_feas": float(self.p_feas[-1]),
            "p_opt": float(self.p_opt[-1]),
            "p_eps": float(self.p_eps[-1]),
        }

    def rows(self):
        for i in range(len(self.times)):
            yield (self.times[i], self.r[i], self.p_feas[i], self.p_opt[i], self.p_eps[i])


class StateMetrics:
    """Precomputed masks for evaluating one problem's metrics on many states."""

    def __init__(self, problem: ConstrainedProblem, space: CompositeSpace | None = None,
                 oracle: OracleResult | None = None, epsilon: float | None = None):
        self.problem = problem
        self.space = space if space is not None else composite_space_for(problem)
        self.oracle = oracle if oracle is not None else brute_force_solve(problem)
        self.epsilon = problem.epsilon if epsilon is None else float(epsilon)
        if self.oracle.e_best == self.oracle.e_worst:
            raise ValueError("objective is constant on the feasible set; ratio undefined")

        self.feasible = constraint_diagonal(problem, self.space) == 0.0
        ratio_q = (problem.objective.diagonal(problem.n_vars) - self.oracle.e_worst) \
            / (self.oracle.e_best - self.oracle.e_worst)
        ratio = np.tile(ratio_q, self.space.slack_dim)
        self.ratio = np.where(self.feasible, ratio, 0.0)
        self.optimal = self.feasible & (ratio >= 1.0 - TIE_TOL)
        self.eps_optimal = self.feasible & (ratio >= 1.0 - self.epsilon - TIE_TOL)

    def _probs(self, psi: StateVector) -> np.ndarray:
        if psi.space != self.space:
            raise ValueError("state lives in a different space than the metrics")
        return psi.probabilities()

    def approx_ratio(self, psi: StateVector) -> float:
        return float(np.dot(self._probs(psi), self.ratio))

    def feasible_prob(self, psi: StateVector) -> float:
        return float(self._probs(psi)[self.feasible].sum())

    def optimal_prob(self, psi: StateVector) -> float:
        return float(self._probs(psi)[self.optimal].sum())

    def eps_optimal_prob(self, psi: StateVector, epsilon: float | None = None) -> float:
        probs = self._probs(psi)
        if epsilon is None or epsilon == self.epsilon:
            return float(probs[self.eps_optimal].sum())
        mask = self.feasible & (np.tile(
            (self.problem.objective.diagonal(self.problem.n_vars) - self.oracle.e_worst)
            / (self.oracle.e_best - self.oracle.e_worst), self.space.slack_dim)
            >= 1.0 - epsilon - TIE_TOL)
        return float(probs[mask].sum())

    def evaluate(self, psi: StateVector) -> tuple[float, float, float, float]:
        """(ratio, feasible, optimal, eps-optimal) in one pass."""
        probs = self._probs(psi)
        return (
            float(np.dot(probs, self.ratio)),
            float(probs[self.feasible].sum()),
            float(probs[self.optimal].sum()),
            float(probs[self.eps_optimal].sum()),
        )


def approx_ratio(psi: StateVector, problem: ConstrainedProblem,
                 oracle: OracleResult | None = None) -> float:
    return StateMetrics(problem, psi.space, oracle).approx_ratio(psi)


def feasible_prob(psi: StateVector, problem: ConstrainedProblem,
                  oracle: OracleResult | None = None) -> float:
    return StateMetrics(problem, psi.space, oracle).feasible_prob(psi)


def optimal_prob(psi: StateVector, problem: ConstrainedProblem,
                 oracle: OracleResult | None = None) -> float:
    return StateMetrics(problem, psi.space, oracle).optimal_prob(psi)


def eps_optimal_prob(psi: StateVector, problem: ConstrainedProblem, epsilon: float,
                     oracle: OracleResult | None = None) -> float:
    return StateMetrics(problem, psi.space, oracle).eps_optimal_prob(psi, epsilon)
