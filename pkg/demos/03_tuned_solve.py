from blasius_ham import OptimConfig, SolverContext, build_grid, order_adaptive_solve, solve_reference

grid = build_grid(8.0, 801)
ctx = SolverContext(grid, f_ref=solve_reference(grid).f)

# Sweep (hbar, a) at order 2, then refine and raise the order until the loss is small
cfg = OptimConfig(eps_tol=1e-7, eps_imp=1e-10)


def show(rec):
    L = rec.loss
    print(f"M={rec.order:2d}  J={L.j_total:.3e}  j_res={L.j_res:.2e}  j_bc={L.j_bc:.2e}"
          f"  j_data={L.j_data:.2e}  hbar={rec.hbar:+.4f}  a={rec.a:.4f}  err={rec.abs_err_fpp0:.2e}")


result = order_adaptive_solve(cfg, ctx, workers=1, progress=show)
print("stopped:", result.stop_reason, "at M =", result.m_star)
print("hbar* =", round(result.hbar_star, 5), " a* =", round(result.a_star, 5))
