"""Time-parameterized Hamiltonian programs for constrained adiabatic optimization.

Two algorithm families are assembled here, both acting matrix-free on the
composite qubit+slack space:

* Q-CHOP: an always-on constraint Hamiltonian plus a slowly rotated objective
  ramp, H(t) = H_con - (1/lambda) * H_obj(theta(t)) (x) S(theta(t)), with the
  linear schedule theta = pi t / T.  The rotation continuously turns every
  Pauli-Z factor of the objective into cos(theta) Z + sin(theta) X so that
  the ramp sweeps from -H_obj to +H_obj, carrying the worst feasible state
  into the best one.  Problems with inequality constraints get the slack
  mixer S(theta) = 1 + sin(theta) * (all-to-all slack coupler), and an
  optional counterdiabatic term (pi/T) * S_y can be added for linear
  objectives.

* The standard adiabatic algorithm (SAA): linear interpolation from a
  transverse-field driver (plus uniform-state projectors on slack qudits) to
  the penalized problem Hamiltonian H_con + (1/lambda) * H_obj.

The constant term of the objective is excluded from every dynamical
operator: it shifts all energies uniformly and affects neither dynamics nor
any reported metric.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hilbert import (
    CompositeSpace,
    StateVector,
    subset_signs,
    _apply_rotated_z,
    _apply_x,
    _global_spin,
    _mul_qubit_diag,
    _slack_plus_projector,
    _slack_sum,
)
from .problems import (
    AffineForm,
    ConstrainedProblem,
    InstanceRejected,
    PatternProjector,
    ZPolynomial,
    slack_value_set,
)

QCHOP = "qchop"
QCHOP_CD = "qchop-cd"
SAA = "saa"
VARIANTS = (QCHOP, QCHOP_CD, SAA)


class RotationPolicy(enum.Enum):
    """How objective Z-strings are swept from +Z to -Z character.

    GLOBAL conjugates every term by the collective y rotation (valid only
    when all terms have odd length, so that the sign flips at theta = pi).
    PER_TERM rotates one qubit per term and averages over the choice, which
    flips the sign of terms of any length.  HYBRID rotates odd-length terms
    globally and even-length terms per-qubit.
    """

    GLOBAL = "global-odd"
    PER_TERM = "one-per-term"
    HYBRID = "hybrid"


@dataclass
class NormalizationReport:
    """Scale factor applied to the objective and the penalty factor in use."""

    norm: float
    n_terms: int
    lam: float | None = None


def normalize_objective(objective: ZPolynomial) -> tuple[ZPolynomial, NormalizationReport]:
    """Rescale so that the mean square of nonconstant coefficients is 1.

    The constant term is excluded from the mean but divided along with the
    rest, making the rescaled objective invariant under any positive scaling
    of the input.  A uniform +/-1 linear objective has norm 1 already.
    """
    values = [c for s, c in objective.coeffs.items() if s]
    if not values:
        raise InstanceRejected("objective is constant; nothing to optimize")
    norm = float(np.sqrt(np.mean(np.square(values))))
    return objective.scaled(1.0 / norm), NormalizationReport(norm=norm, n_terms=len(values))


def normalize_problem(problem: ConstrainedProblem) -> tuple[ConstrainedProblem, NormalizationReport]:
    objective, report = normalize_objective(problem.objective)
    return dataclasses.replace(problem, objective=objective, meta=dict(problem.meta)), report


def choose_lambda(space: CompositeSpace, report: NormalizationReport | None = None,
                  override: float | None = None) -> float:
    """Penalty factor: the qubit count by default, or a positive override."""
    if override is not None:
        if override <= 0:
            raise ValueError("penalty factor must be positive")
        lam = float(override)
    else:
        lam = float(space.n_qubits)
    if report is not None:
        report.lam = lam
    return lam


def reduced_forms(problem: ConstrainedProblem) -> tuple[AffineForm, ...]:
    """Inequality constraints divided through by their coefficient gcd."""
    return tuple(form.reduced() for form in problem.inequality_constraints)


def composite_space_for(problem: ConstrainedProblem) -> CompositeSpace:
    """The simulation space: one pruned-value slack qudit per inequality."""
    slack_values = tuple(tuple(slack_value_set(form)) for form in reduced_forms(problem))
    return CompositeSpace(problem.n_vars, slack_values)


def constraint_diagonal(problem: ConstrainedProblem, space: CompositeSpace) -> np.ndarray:
    """Total constraint energy over the composite basis.

    Equality terms contribute their 0/1 projector values; each inequality
    D(x) >= 0 contributes (D(x) - n)^2 with n the attached slack value.  The
    diagonal vanishes exactly on feasible bitstrings whose slack digits
    record D(x).
    """
    if space.n_qubits != problem.n_vars:
        raise ValueError("space does not match the problem's variable count")
    qdim = space.qubit_dim
    eq = np.zeros(qdim)
    for con in problem.equality_constraints:
        if isinstance(con, PatternProjector):
            eq += con.indicator(problem.n_vars)
        else:
            eq += con.diagonal(problem.n_vars)
    out = np.tile(eq, space.slack_dim).reshape(space.slack_dim, qdim)
    forms = reduced_forms(problem)
    if len(forms) != space.n_slack:
        raise ValueError("space does not match the problem's inequality count")
    digit_arrays = space.slack_digit_arrays()
    for k, form in enumerate(forms):
        dvals = form.values(problem.n_vars).astype(float)
        nvals = np.asarray(space.slack_values[k], dtype=float)[digit_arrays[k]]
        out += (dvals[None, :] - nvals[:, None]) ** 2
    return out.reshape(-1)


@dataclass
class HamiltonianProgram:
    """Immutable action psi -> H(t) psi for one algorithm variant.

    ``apply`` consumes and returns flat complex amplitude arrays; it is pure
    and re-entrant, so one program can drive many integrations at once.
    """

    space: CompositeSpace
    variant: str
    lam: float
    total_time: float
    con_diag: np.ndarray
    obj_diag_q: np.ndarray
    policy: RotationPolicy | None = None
    mixing: bool = False
    cd: bool = False
    _array_diag: np.ndarray | None = None
    _flips: tuple = ()
    _product_terms: tuple = ()

    def theta(self, t: float) -> float:
        return math.pi * t / self.total_time

    def ramp_action(self, theta: float, amps: np.ndarray) -> np.ndarray:
        """Rotated-objective action (without mixer, lambda, or constraints)."""
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        out = np.zeros_like(amps)
        if self._array_diag is not None:
            out += cos_t * _mul_qubit_diag(self.space, self._array_diag, amps)
        for j, weights in self._flips:
            out += sin_t * _mul_qubit_diag(self.space, weights, _apply_x(amps, j))
        for subset, coeff in self._product_terms:
            term = amps
            for j in subset:
                term = _apply_rotated_z(term, j, cos_t, sin_t)
            out += coeff * term
        return out

    def apply(self, t: float, amps: np.ndarray) -> np.ndarray:
        if _kernels.READY and not self._product_terms:
            return self._apply_fused(t, amps)
        return self.apply_reference(t, amps)

    def apply_reference(self, t: float, amps: np.ndarray) -> np.ndarray:
        """Pure-numpy action; the compiled fast path must match it exactly."""
        if self.variant == SAA:
            return self._apply_saa(t, amps)
        theta = self.theta(t)
        out = self.con_diag * amps
        psi = amps
        if self.mixing:
            sin_t = math.sin(theta)
            if sin_t != 0.0:
                psi = amps + sin_t * _slack_sum(self.space, amps)
        out -= self.ramp_action(theta, psi) / self.lam
        if self.cd:
            out += (math.pi / self.total_time) * _global_spin(self.space, "y", amps)
        return out

    def _apply_saa(self, t: float, amps: np.ndarray) -> np.ndarray:
        u = t / self.total_time
        drive = _global_spin(self.space, "x", amps)
        for k in range(self.space.n_slack):
            drive += _slack_plus_projector(self.space, k, amps)
        final = self.con_diag * amps
        final += _mul_qubit_diag(self.space, self.obj_diag_q, amps) / self.lam
        return (u - 1.0) * drive + u * final

    def _fast_arrays(self):
        if getattr(self, "_fast", None) is None:
            space = self.space
            qdim = space.qubit_dim
            if self._array_diag is not None:
                diag_q = np.ascontiguousarray(self._array_diag)
            else:
                diag_q = np.zeros(qdim)
            gbits = np.array([1 << j for j, _ in self._flips], dtype=np.int64)
            gmat = np.zeros((len(self._flips), qdim))
            for k, (_, weights) in enumerate(self._flips):
                gmat[k] = weights
            all_bits = np.array([1 << j for j in range(space.n_qubits)], dtype=np.int64)
            slack_dims = np.array(space.slack_dims, dtype=np.int64)
            strides = np.empty(space.n_slack, dtype=np.int64)
            stride = qdim
            for k, d in enumerate(space.slack_dims):
                strides[k] = stride
                stride *= d
            self._fast = (np.ascontiguousarray(self.con_diag), diag_q, gmat, gbits,
                          all_bits, slack_dims, strides,
                          np.ascontiguousarray(self.obj_diag_q))
        return self._fast

    def _apply_fused(self, t: float, amps: np.ndarray) -> np.ndarray:
        con, diag_q, gmat, gbits, all_bits, slack_dims, strides, obj_q = self._fast_arrays()
        amps = np.ascontiguousarray(amps, dtype=np.complex128)
        qdim = self.space.qubit_dim
        if self.variant == SAA:
            return _kernels.saa_rhs(amps, con, obj_q, all_bits, slack_dims, strides,
                                    t / self.total_time, 1.0 / self.lam, qdim)
        theta = self.theta(t)
        cd_coef = math.pi / self.total_time if self.cd else 0.0
        return _kernels.qchop_rhs(amps, con, diag_q, gmat, gbits,
                                  math.cos(theta), math.sin(theta), 1.0 / self.lam,
                                  self.mixing, qdim, cd_coef, all_bits)

    def apply_state(self, t: float, psi: StateVector) -> StateVector:
        if psi.space is not self.space and psi.space != self.space:
            raise ValueError("state lives in a different space than the program")
        return StateVector(self.space, self.apply(t, psi.amplitudes))

    def matrix(self, t: float) -> np.ndarray:
        """Dense materialization for exhaustive checks on small spaces."""
        from .dense import operator_matrix
        return operator_matrix(lambda v: self.apply(t, v), self.space.dim)


def _route_terms(objective: ZPolynomial, policy: RotationPolicy):
    """Split nonconstant terms into the averaged-rotation path and the
    full-product path, per the rotation policy."""
    array_terms = []
    product_terms = []
    for subset, c in objective.nonconstant().items():
        if len(subset) == 1:
            array_terms.append((subset, c))
        elif policy is RotationPolicy.PER_TERM:
            array_terms.append((subset, c))
        elif policy is RotationPolicy.GLOBAL:
            product_terms.append((subset, c))
        else:  # HYBRID
            if len(subset) % 2 == 1:
                product_terms.append((subset, c))
            else:
                array_terms.append((subset, c))
    return array_terms, product_terms


def _build_ramp(space: CompositeSpace, objective: ZPolynomial, policy: RotationPolicy):
    n = space.n_qubits
    array_terms, product_terms = _route_terms(objective, policy)
    array_diag = None
    flip_weights: dict[int, np.ndarray] = {}
    for subset, c in array_terms:
        if array_diag is None:
            array_diag = np.zeros(space.qubit_dim)
        array_diag += 0.5 * c * subset_signs(n, subset)
        share = 0.5 * c / len(subset)
        for j in subset:
            if j not in flip_weights:
                flip_weights[j] = np.zeros(space.qubit_dim)
            flip_weights[j] += share * subset_signs(n, subset - {j})
    flips = tuple(sorted(flip_weights.items()))
    products = tuple((tuple(sorted(subset)), 0.5 * c) for subset, c in product_terms)
    return array_diag, flips, products


def build_qchop(problem: ConstrainedProblem, lam: float, total_time: float, *,
                cd: bool = False,
                policy: RotationPolicy | None = None) -> HamiltonianProgram:
    """Assemble the constrained-rotation program for a problem with a known
    worst feasible state.

    The rotation policy defaults to GLOBAL when every objective term has odd
    length and PER_TERM otherwise; GLOBAL cannot be forced onto an objective
    with even-length terms, whose sign would fail to flip at theta = pi.
    """
    if problem.worst_feasible is None:
        raise ValueError("problem lacks a worst feasible state; "
                         "derive a subproblem with build_relaxed first")
    if lam <= 0:
        raise ValueError("penalty factor must be positive")
    if not problem.objective.nonconstant():
        raise InstanceRejected("objective is constant; nothing to optimize")
    if policy is None:
        policy = RotationPolicy.GLOBAL if problem.objective.is_odd() else RotationPolicy.PER_TERM
    elif policy is RotationPolicy.GLOBAL and not problem.objective.is_odd():
        raise ValueError("global rotation requires an odd objective")
    space = composite_space_for(problem)
    con = constraint_diagonal(problem, space)
    array_diag, flips, products = _build_ramp(space, problem.objective, policy)
    nonconstant = ZPolynomial(dict(problem.objective.nonconstant()))
    return HamiltonianProgram(
        space=space,
        variant=QCHOP_CD if cd else QCHOP,
        lam=float(lam),
        total_time=float(total_time),
        con_diag=con,
        obj_diag_q=nonconstant.diagonal(problem.n_vars),
        policy=policy,
        mixing=space.n_slack > 0,
        cd=cd,
        _array_diag=array_diag,
        _flips=flips,
        _product_terms=products,
    )


def build_saa(problem: ConstrainedProblem, lam: float, total_time: float) -> HamiltonianProgram:
    """Assemble the penalty-based interpolation baseline.

    At t = 0 the action is the pure driver, whose ground state is the
    uniform product state; at t = T it equals the Q-CHOP operator at
    theta = pi.
    """
    if lam <= 0:
        raise ValueError("penalty factor must be positive")
    space = composite_space_for(problem)
    con = constraint_diagonal(problem, space)
    nonconstant = ZPolynomial(dict(problem.objective.nonconstant()))
    return HamiltonianProgram(
        space=space,
        variant=SAA,
        lam=float(lam),
        total_time=float(total_time),
        con_diag=con,
        obj_diag_q=nonconstant.diagonal(problem.n_vars),
    )


def qchop_initial_state(problem: ConstrainedProblem,
                        space: CompositeSpace | None = None) -> StateVector:
    """Basis state at the worst feasible bitstring, slack digits set to D(x)."""
    if problem.worst_feasible is None:
        raise ValueError("problem lacks a worst feasible state")
    if space is None:
        space = composite_space_for(problem)
    x = problem.worst_feasible
    digits = []
    for k, form in enumerate(reduced_forms(problem)):
        value = form.value(x)
        try:
            digits.append(space.slack_values[k].index(value))
        except ValueError:
            raise RuntimeError(
                f"slack value {value} for the worst feasible state is missing from "
                f"the allowed set of constraint {k}; the encoding is inconsistent"
            ) from None
    return StateVector.basis_state(space, x, digits)


def saa_initial_state(space: CompositeSpace) -> StateVector:
    """Uniform superposition over qubits and over each slack qudit's values."""
    return StateVector.uniform(space)


def build_relaxed(problem: ConstrainedProblem, x_star: int) -> ConstrainedProblem:
    """Subproblem whose worst feasible state is a chosen feasible bitstring.

    The objective becomes -(f - f(x_star))^2: it vanishes at x_star and is
    negative elsewhere, so minimizing it finds the feasible state whose
    original objective value lies farthest from f(x_star) (the original best
    or worst).  Constraints are unchanged.
    """
    if not problem.is_feasible(x_star):
        raise ValueError("reference bitstring violates a constraint")
    e_star = problem.objective.value(x_star)
    objective = -(problem.objective.plus_constant(-e_star).squared())
    label = f"{problem.label}-relaxed" if problem.label else "relaxed"
    return dataclasses.replace(problem, objective=objective, worst_feasible=x_star,
                               label=label, source=None, meta=dict(problem.meta))


def yww_effective_hamiltonian(n_vertices: int, edges, phi_dot: float, theta: float,
                              theta_dot: float) -> np.ndarray:
    """Dense effective Hamiltonian of the rotating-frame independent-set
    method of Yu, Wilczek, and Wu (test scale only).

    Built as 4 * H_con + phi_dot * R_y(theta) S_z R_y(theta)^dag +
    theta_dot * S_y, with the factor 4 matching that method's constraint
    normalization.  With phi_dot = -4/lambda and theta_dot = 0 this equals
    4x the Q-CHOP operator for maximum independent set.
    """
    if n_vertices > 8:
        raise ValueError("dense construction limited to 8 vertices")
    from .dense import global_spin_matrix, pauli_string_matrix

    dim = 1 << n_vertices
    q = np.arange(dim)
    con = np.zeros(dim)
    for u, v in edges:
        con += (((q >> int(u)) & 1) & ((q >> int(v)) & 1)).astype(float)
    rotated = np.zeros((dim, dim), dtype=complex)
    for j in range(n_vertices):
        rotated += math.cos(theta) * pauli_string_matrix(n_vertices, {j: "Z"})
        rotated += math.sin(theta) * pauli_string_matrix(n_vertices, {j: "X"})
    rotated *= 0.5
    s_y = global_spin_matrix(n_vertices, "y")
    return 4.0 * np.diag(con) + phi_dot * rotated + theta_dot * s_y
