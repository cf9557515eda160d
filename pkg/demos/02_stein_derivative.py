"""
Two views of a fractional derivative
====================================

``frac_deriv`` applies the Fourier multiplier ``|xi|^alpha`` directly.
``stein_deriv`` evaluates the singular difference integral with a graded
quadrature on the periodic box. Its normalizing constant is calibrated on
the grid and lands on the closed form ``2 Gamma(-alpha) cos(pi alpha/2)``.
"""

import numpy as np

import gzk

grid = gzk.make_grid(128, 128, 20.0, 20.0)
u = gzk.Field.from_function(grid, lambda X, Y: np.exp(-(X**2 + Y**2) / 2))
q = gzk.SteinQuadrature()

print(f"{'alpha':>6} {'calibrated d':>14} {'closed form':>14} {'x error':>9} {'y error':>9}")
for alpha in (0.25, 0.5, 0.75):
    d = q.calibrate(grid, 0, alpha)
    errs = []
    for axis in (0, 1):
        ref = gzk.frac_deriv(u, axis, alpha)
        errs.append((gzk.stein_deriv(u, axis, alpha, q) - ref).norm() / ref.norm())
    print(f"{alpha:6.2f} {d:14.10f} {gzk.stein_constant(alpha):14.10f} {errs[0]:9.1e} {errs[1]:9.1e}")

# The difference integral sees the product structure: for g = exp(i t phi),
# D(g f) = g D f + g Phi(f), which is how the correction term arises.
t, alpha = 0.1, 0.5
X, Y = grid.mesh()
g = np.exp(1j * t * gzk.phase(X, Y))
lhs = gzk.stein_deriv(gzk.Field.physical(grid, g * u.values), 0, alpha, q).values
rhs = g * (gzk.stein_deriv(u, 0, alpha, q).values + gzk.phi_physical(u, 0, t, alpha, q).values)
print("product rule residual:", np.linalg.norm(lhs - rhs) / np.linalg.norm(lhs))
