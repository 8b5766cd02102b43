"""
Operator identities on small dense matrices
===========================================

The simulation never builds matrices, but on a few hundred dimensions we can
materialize every operator and confirm the algebra: the rotated objective
interpolates exactly from +H_obj to -H_obj, the penalty baseline at its final
time coincides with the rotated program at theta = pi, and the rotating-frame
analysis of the original independent-set method reproduces the assembled
operator times four.
"""
import math

import numpy as np

from qchop import (
    build_qchop,
    build_saa,
    gen_knapsack_instance,
    gen_mis_instance,
    normalize_problem,
    yww_effective_hamiltonian,
)
from qchop.dense import operator_matrix
from qchop.problems import ZPolynomial

problem, _ = normalize_problem(gen_knapsack_instance(4, seed=2))
program = build_qchop(problem, lam=4.0, total_time=10.0)
space = program.space
print(f"knapsack on {space.dim} dimensions "
      f"({space.n_qubits} qubits x {space.slack_dims[0]}-level slack)")

objective = np.diag(np.tile(
    ZPolynomial(dict(problem.objective.nonconstant())).diagonal(problem.n_vars),
    space.slack_dim))
ramp0 = operator_matrix(lambda v: program.ramp_action(0.0, v), space.dim)
ramp1 = operator_matrix(lambda v: program.ramp_action(math.pi, v), space.dim)
print(f"|ramp(0) - H_obj|      = {np.abs(ramp0 - objective).max():.2e}")
print(f"|ramp(pi) + H_obj|     = {np.abs(ramp1 + objective).max():.2e}")

saa = build_saa(problem, lam=4.0, total_time=10.0)
print(f"|SAA(T) - QCHOP(pi)|   = {np.abs(saa.matrix(10.0) - program.matrix(10.0)).max():.2e}")

mis = gen_mis_instance(5, seed=4)
mis_program = build_qchop(mis, lam=5.0, total_time=10.0)
theta = 1.3
h_eff = yww_effective_hamiltonian(5, mis.source["edges"], phi_dot=-4.0 / 5.0,
                                  theta=theta, theta_dot=0.0)
h_tot = mis_program.matrix(10.0 * theta / math.pi)
print(f"|H_eff - 4 H_tot|      = {np.abs(h_eff - 4.0 * h_tot).max():.2e}")

herm = max(np.abs(program.matrix(t) - program.matrix(t).conj().T).max()
           for t in np.linspace(0, 10, 7))
print(f"hermiticity deviation  = {herm:.2e}")
