"""Dense materialization of operator actions, for tests and tiny spaces only.

The simulation kernels never build matrices; this module exists so that
operator identities can be checked exhaustively on spaces of a few thousand
dimensions.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

MAX_DENSE_DIM = 1 << 12

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def operator_matrix(apply: Callable[[np.ndarray], np.ndarray], dim: int) -> np.ndarray:
    """Materialize a linear action column by column."""
    if dim > MAX_DENSE_DIM:
        raise ValueError(f"refusing to materialize a {dim}-dimensional operator")
    mat = np.zeros((dim, dim), dtype=np.complex128)
    basis = np.zeros(dim, dtype=np.complex128)
    for i in range(dim):
        basis[i] = 1.0
        mat[:, i] = apply(basis)
        basis[i] = 0.0
    return mat


def pauli_string_matrix(n_qubits: int, ops: dict[int, str]) -> np.ndarray:
    """Kronecker-product matrix with the given single-qubit Paulis.

    Qubit 0 is the least significant index, so it sits rightmost in the
    Kronecker product.
    """
    if n_qubits > 12:
        raise ValueError("dense Pauli strings limited to 12 qubits")
    mat = np.array([[1.0 + 0j]])
    for j in range(n_qubits):
        mat = np.kron(_PAULI[ops.get(j, "I")], mat)
    return mat


def global_spin_matrix(n_qubits: int, axis: str) -> np.ndarray:
    """Dense (1/2) sum_j P_j for P in {X, Y, Z}."""
    dim = 1 << n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(n_qubits):
        out += pauli_string_matrix(n_qubits, {j: axis.upper()})
    return 0.5 * out
