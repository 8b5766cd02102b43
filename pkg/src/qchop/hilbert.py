"""Composite Hilbert space of qubits plus slack qudits, and matrix-free kernels.

The composite basis is indexed by a single integer.  Qubit ``j`` occupies bit
``j`` of the low ``n_qubits`` bits (qubit 0 is least significant), with bit
value equal to the decision variable ``x_j``.  Slack qudit digits sit above
the qubit bits in mixed radix, qudit 0 least significant.  Pauli conventions:

    Z = |0><0| - |1><1|,    X = |0><1| + |1><0|,    Y = -i Z X,

so bit value 0 corresponds to Z eigenvalue +1.

All ``apply_*`` kernels are linear maps acting on :class:`StateVector`
without materializing any operator matrix; each costs O(dimension) per
elementary factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Largest composite dimension the kernels will address (1 GiB of amplitudes).
MAX_DIM = 1 << 26


@dataclass(frozen=True)
class CompositeSpace:
    """N qubits together with one finite slack qudit per inequality constraint.

    Parameters
    ----------
    n_qubits : int
        Number of binary decision variables.
    slack_values : tuple of tuples of int
        For each slack qudit, the ascending list of integer values its
        digits stand for (the pruned allowed-value set of the constraint).
    """

    n_qubits: int
    slack_values: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be nonnegative")
        object.__setattr__(
            self, "slack_values",
            tuple(tuple(int(v) for v in vals) for vals in self.slack_values),
        )
        for k, vals in enumerate(self.slack_values):
            if len(vals) == 0:
                raise ValueError(f"slack qudit {k} has empty value set")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"slack qudit {k} values must be strictly ascending")
        if self.dim <= 0 or self.dim > MAX_DIM:
            raise ValueError(f"total dimension {self.dim} outside (0, {MAX_DIM}]")

    @property
    def qubit_dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def slack_dims(self) -> tuple[int, ...]:
        return tuple(len(vals) for vals in self.slack_values)

    @property
    def slack_dim(self) -> int:
        out = 1
        for d in self.slack_dims:
            out *= d
        return out

    @property
    def dim(self) -> int:
        return self.qubit_dim * self.slack_dim

    @property
    def n_slack(self) -> int:
        return len(self.slack_values)

    def encode(self, qubit_bits: int, slack_digits: Sequence[int] = ()) -> int:
        """Composite index of the basis state |qubit_bits> |digits...>."""
        if not 0 <= qubit_bits < self.qubit_dim:
            raise ValueError(f"qubit index {qubit_bits} out of range")
        if len(slack_digits) != self.n_slack:
            raise ValueError(f"expected {self.n_slack} slack digits, got {len(slack_digits)}")
        idx = 0
        for digit, d in zip(reversed(slack_digits), reversed(self.slack_dims)):
            if not 0 <= digit < d:
                raise ValueError(f"slack digit {digit} out of range [0, {d})")
            idx = idx * d + digit
        return idx * self.qubit_dim + qubit_bits

    def decode(self, index: int) -> tuple[int, tuple[int, ...]]:
        """Inverse of :meth:`encode`: (qubit bits, slack digits)."""
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} out of range")
        qubit_bits = index % self.qubit_dim
        rest = index // self.qubit_dim
        digits = []
        for d in self.slack_dims:
            digits.append(rest % d)
            rest //= d
        return qubit_bits, tuple(digits)

    def slack_digit_arrays(self) -> list[np.ndarray]:
        """Per qudit, the digit of every slack configuration (length slack_dim)."""
        configs = np.arange(self.slack_dim)
        out = []
        stride = 1
        for d in self.slack_dims:
            out.append((configs // stride) % d)
            stride *= d
        return out


@dataclass
class StateVector:
    """Complex amplitudes over the composite basis of a :class:`CompositeSpace`."""

    space: CompositeSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.space.dim,):
            raise ValueError(
                f"amplitude length {self.amplitudes.shape} does not match dimension {self.space.dim}"
            )

    @classmethod
    def basis_state(cls, space: CompositeSpace, qubit_bits: int,
                    slack_digits: Sequence[int] = ()) -> "StateVector":
        amps = np.zeros(space.dim, dtype=np.complex128)
        amps[space.encode(qubit_bits, slack_digits)] = 1.0
        return cls(space, amps)

    @classmethod
    def uniform(cls, space: CompositeSpace) -> "StateVector":
        amps = np.full(space.dim, 1.0 / np.sqrt(space.dim), dtype=np.complex128)
        return cls(space, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_norm(self, tol: float = 1e-6) -> None:
        drift = abs(self.norm() ** 2 - 1.0)
        if drift > tol:
            raise ValueError(f"state norm drifted by {drift:.3e} (> {tol:.1e})")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def subset_signs(n_qubits: int, subset: Iterable[int]) -> np.ndarray:
    """Diagonal of the Pauli-Z string over ``subset``: entries are +/-1.

    Entry q is the product over j in subset of (1 - 2 x_j) where x_j is bit j
    of q.
    """
    signs = np.ones(1 << n_qubits)
    for j in subset:
        if not 0 <= j < n_qubits:
            raise ValueError(f"qubit index {j} out of range for {n_qubits} qubits")
        q = np.arange(1 << n_qubits)
        signs[(q >> j) & 1 == 1] *= -1.0
    return signs


# ---------------------------------------------------------------------------
# raw kernels on flat amplitude arrays (shared by the Hamiltonian programs)
# ---------------------------------------------------------------------------

def _qubit_block(amps: np.ndarray, j: int) -> np.ndarray:
    # splits out bit j: leading axis carries higher bits and all slack digits
    return amps.reshape(-1, 2, 1 << j)


def _apply_x(amps: np.ndarray, j: int) -> np.ndarray:
    b = _qubit_block(amps, j)
    return b[:, ::-1, :].reshape(-1)


def _apply_rotated_z(amps: np.ndarray, j: int, cos_t: float, sin_t: float) -> np.ndarray:
    # cos(t) Z_j + sin(t) X_j
    b = _qubit_block(amps, j)
    out = np.empty_like(b)
    out[:, 0, :] = cos_t * b[:, 0, :] + sin_t * b[:, 1, :]
    out[:, 1, :] = sin_t * b[:, 0, :] - cos_t * b[:, 1, :]
    return out.reshape(-1)


def _accumulate_y(out: np.ndarray, amps: np.ndarray, j: int, weight: complex) -> None:
    # out += weight * Y_j amps, with Y|0> = i|1> and Y|1> = -i|0>
    b = _qubit_block(amps, j)
    o = _qubit_block(out, j)
    o[:, 0, :] += weight * (-1j) * b[:, 1, :]
    o[:, 1, :] += weight * (+1j) * b[:, 0, :]


def _mul_qubit_diag(space: CompositeSpace, diag_q: np.ndarray, amps: np.ndarray) -> np.ndarray:
    # multiply by a diagonal defined on the qubit factor, broadcast over slack
    view = amps.reshape(space.slack_dim, space.qubit_dim)
    return (view * diag_q).reshape(-1)


def _rotated_zstring(space: CompositeSpace, subset: Sequence[int], rotated: Sequence[int],
                     theta: float, amps: np.ndarray) -> np.ndarray:
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    rotated = set(rotated)
    plain = [j for j in subset if j not in rotated]
    out = amps
    if plain:
        out = _mul_qubit_diag(space, subset_signs(space.n_qubits, plain), out)
    for j in rotated:
        out = _apply_rotated_z(out, j, cos_t, sin_t)
    return out


def _global_spin(space: CompositeSpace, axis: str, amps: np.ndarray) -> np.ndarray:
    n = space.n_qubits
    if axis == "z":
        q = np.arange(space.qubit_dim)
        diag = 0.5 * (n - 2.0 * np.bitwise_count(q).astype(np.int64))
        return _mul_qubit_diag(space, diag, amps)
    if axis == "x":
        out = np.zeros_like(amps)
        for j in range(n):
            out += _apply_x(amps, j)
        return 0.5 * out
    if axis == "y":
        out = np.zeros_like(amps)
        for j in range(n):
            _accumulate_y(out, amps, j, 0.5)
        return out
    raise ValueError(f"axis must be one of x, y, z; got {axis!r}")


def _slack_sum(space: CompositeSpace, amps: np.ndarray) -> np.ndarray:
    # (tensor product over qudits of the all-ones coupler) applied to amps:
    # every slack configuration receives the sum over all configurations
    view = amps.reshape(space.slack_dim, space.qubit_dim)
    total = view.sum(axis=0)
    return np.broadcast_to(total, view.shape).reshape(-1)


def _slack_plus_projector(space: CompositeSpace, k: int, amps: np.ndarray) -> np.ndarray:
    # projector onto the uniform superposition of qudit k's allowed values
    d = space.slack_dims[k]
    stride = space.qubit_dim
    for dd in space.slack_dims[:k]:
        stride *= dd
    view = amps.reshape(-1, d, stride)
    mean = view.mean(axis=1, keepdims=True)
    return np.broadcast_to(mean, view.shape).reshape(-1)


# ---------------------------------------------------------------------------
# public kernels
# ---------------------------------------------------------------------------

def apply_diagonal(diag: np.ndarray, psi: StateVector) -> StateVector:
    """Multiply by a real diagonal operator given over the full composite basis."""
    diag = np.asarray(diag)
    if diag.shape != (psi.space.dim,):
        raise ValueError(
            f"diagonal length {diag.shape} does not match dimension {psi.space.dim}"
        )
    return StateVector(psi.space, diag * psi.amplitudes)


def apply_rotated_zstring(subset: Sequence[int], rotated: Sequence[int], theta: float,
                          psi: StateVector) -> StateVector:
    """Apply prod_{j in rotated} (cos(theta) Z_j + sin(theta) X_j) * prod_{k in subset\\rotated} Z_k.

    Acts on the qubit factor only.  ``rotated`` must be a subset of
    ``subset``, and ``subset`` must be nonempty.
    """
    subset = tuple(subset)
    rotated = tuple(rotated)
    if not subset:
        raise ValueError("subset must be nonempty")
    if not set(rotated) <= set(subset):
        raise ValueError("rotated qubits must form a subset of the Z-string support")
    for j in subset:
        if not 0 <= j < psi.space.n_qubits:
            raise ValueError(f"qubit index {j} out of range")
    return StateVector(psi.space, _rotated_zstring(psi.space, subset, rotated, theta,
                                                   psi.amplitudes))


def apply_global_spin(axis: str, psi: StateVector) -> StateVector:
    """Apply the collective spin operator (1/2) sum_j P_j for P in {X, Y, Z}."""
    return StateVector(psi.space, _global_spin(psi.space, axis, psi.amplitudes))


def apply_slack_mixer(theta: float, psi: StateVector) -> StateVector:
    """Apply 1 + sin(theta) * (all-to-all coupler on every slack qudit).

    The coupler replaces the joint slack-digit distribution with the
    unweighted sum over all allowed configurations; the qubit factor is
    untouched.  With no slack qudits this is the identity.
    """
    if psi.space.n_slack == 0:
        return StateVector(psi.space, psi.amplitudes.copy())
    mixed = psi.amplitudes + np.sin(theta) * _slack_sum(psi.space, psi.amplitudes)
    return StateVector(psi.space, mixed)
