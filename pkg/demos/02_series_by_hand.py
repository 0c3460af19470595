import numpy as np

from blasius_ham import (HamParams, Operators, build_embedded_operator, build_grid, error_fpp0,
                         factorize, partial_sum, residual_loss, run_series, solve_reference)

grid = build_grid(8.0, 801)
ops = Operators.build(grid)

# The linear operator does not depend on hbar or a, so factor it once
fac = factorize(build_embedded_operator(ops.d3, ops.d1))

# Build the deformation series for fixed parameters
params = HamParams(hbar=-0.22222, a=1.118889, eps_ham=0.0)
series = run_series(grid, ops, fac, params, target_order=35)

ref = solve_reference(grid)
print(" M   j_res        |F''(0) err|  max|F - ref|")
for M in (0, 2, 5, 10, 20, 35):
    F = partial_sum(series, M)
    print(f"{M:2d}  {residual_loss(F, ops.d2, ops.d3):.3e}  {error_fpp0(F, ops.d2):.3e}"
          f"     {np.max(np.abs(F - ref.f)):.3e}")

# Term sizes shrink roughly geometrically when hbar is in the convergent range
norms = [np.max(np.abs(t)) for t in series.terms[1:]]
print("sup-norm of f_1, f_10, f_35:", [f"{norms[i]:.2e}" for i in (0, 9, 34)])

# hbar outside that range makes them grow instead
bad = run_series(grid, ops, fac, HamParams(-5.0, 1.0, eps_ham=0.0), 8)
print("hbar = -5, sup-norm of f_1..f_8:", [f"{np.max(np.abs(t)):.1e}" for t in bad.terms[1:]])
