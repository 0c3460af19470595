import numpy as np

from blasius_ham import build_grid, solve_reference

# Shooting reference on a long domain
grid = build_grid(10.0, 801)
ref = solve_reference(grid, tol=1e-10, substeps=10)
print("f''(0) =", round(ref.fpp0, 7))

# Velocity profile at a few stations
for eta in (0.0, 1.0, 2.0, 3.0, 5.0, 8.0):
    i = int(round(eta / grid.h))
    print(f"eta={eta:4.1f}  f={ref.f[i]:.6f}  f'={ref.fp[i]:.6f}  f''={ref.fpp[i]:.6f}")

# Edge of the layer, where f' first reaches 0.99
i99 = np.argmax(ref.fp >= 0.99)
print("boundary-layer thickness (f' = 0.99):", round(grid.nodes[i99], 3))

# Displacement constant: f - eta tends to a negative constant far out
print("f - eta at the outer edge:", round(ref.f[-1] - grid.nodes[-1], 5))
