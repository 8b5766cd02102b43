"""
Inequality constraints through slack qudits
===========================================

A knapsack capacity constraint  sum_i w_i x_i <= W  becomes the equality
(D(x) - n)^2 = 0 with D(x) = W - sum_i w_i x_i and one integer slack
variable n, carried by a qudit whose allowed values are pruned to the
residue class of the constraint coefficients.
"""
import numpy as np

from qchop import (
    AffineForm,
    brute_force_solve,
    composite_space_for,
    encode_knapsack,
    qchop_initial_state,
    run_single,
    slack_value_set,
)

# even weights and an even capacity share a gcd of 2: the slack qudit only
# needs every other value
form = AffineForm(6, {0: -2, 1: -4})
print("D(x) = 6 - 2 x0 - 4 x1  ->  slack values", slack_value_set(form))
print("after dividing out the gcd:", slack_value_set(form.reduced()))
print()

problem = encode_knapsack(values=[6, 1, 3, 5], weights=[5, 2, 4, 3], capacity=9)
space = composite_space_for(problem)
print(f"{problem.n_vars} qubits x {space.slack_dims[0]}-level slack qudit "
      f"-> dimension {space.dim}")

# the initial state pins the slack register to D(x_worst): the empty
# knapsack leaves the full capacity as slack
psi0 = qchop_initial_state(problem, space)
index = int(np.flatnonzero(psi0.amplitudes)[0])
bits, digits = space.decode(index)
print(f"start: items {bits:04b}, slack value {space.slack_values[0][digits[0]]}")
print()

oracle = brute_force_solve(problem)
print(f"best packing value: {-oracle.e_best:.0f}")
report = run_single(problem, "qchop", "2piN2")
print(f"qchop: r={report.final['r']:.4f}  p_opt={report.final['p_opt']:.4f}  "
      f"p_feas={report.final['p_feas']:.4f}")
