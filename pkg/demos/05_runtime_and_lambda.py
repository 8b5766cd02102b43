"""
Runtime scaling and the penalty factor
======================================

Two knobs govern the algorithm: the quantum runtime T (adiabaticity) and the
penalty factor lambda (constraint protection).  Longer runtimes raise the
optimal-state probability; larger lambda suppresses leakage out of the
feasible manifold at the cost of a weaker ramp.
"""
import math

from qchop import gen_mis_instance, run_single

problem = gen_mis_instance(8, seed=3)
n = problem.n_vars

print("runtime sweep (lambda = N):")
print("      T        r      p_opt   p_feas")
for factor in (0.5, 1.0, 2.0, 4.0):
    total_time = factor * 2 * math.pi * n ** 2
    report = run_single(problem, "qchop", total_time)
    final = report.final
    print(f"  {total_time:7.0f}  {final['r']:.4f}  {final['p_opt']:.4f}  "
          f"{final['p_feas']:.4f}")

print()
print("penalty sweep (T = 2 pi N^2): leakage 1 - p_feas falls with lambda")
print("   lambda   leakage      p_opt")
for lam in (n / 2, n, 2 * n, 4 * n):
    report = run_single(problem, "qchop", "2piN2", lam=lam)
    final = report.final
    print(f"  {lam:7.1f}  {1 - final['p_feas']:.2e}  {final['p_opt']:.4f}")
