"""
How fast does the correction grow?
==================================

The correction ``Phi^v`` vanishes at t = 0 and its L2 norm may grow at
most linearly in t. A log-log fit of the norm over t in {1, 2, 4, 8}
should therefore give a slope no larger than one. A wide pulse on a
large box keeps the evolved data away from the edge.
"""

import numpy as np

import gzk

grid = gzk.make_grid(512, 512, 256.0, 256.0)
u0 = gzk.Field.from_function(grid, lambda X, Y: np.exp(-(X**2 + Y**2) / 8))
w = gzk.WeightParams(s=1.0, r1=0.5, r2=0.5, beta=0.25)

ts = np.array([1.0, 2.0, 4.0, 8.0])
rows = [gzk.commutator_check(u0, t, w) for t in ts]
beta_rows = [gzk.commutator_check_beta(u0, t, w) for t in ts]
for d in "xy":
    norms = np.array([r[f"phi_norm_{d}"] for r in rows])
    bnorms = np.array([r[f"phi_norm_{d}"] for r in beta_rows])
    slope = np.polyfit(np.log(ts), np.log(norms), 1)[0]
    bslope = np.polyfit(np.log(ts), np.log(bnorms), 1)[0]
    print(f"direction {d}: ||Phi|| = {np.round(norms, 4)}, slope {slope:.2f}; "
          f"with D^beta slope {bslope:.2f}")
    print(f"  bound ratios ||Phi|| / ((1+t) ||u0||_H^s): {np.round([r[f'bound_ratio_{d}'] for r in rows], 4)}")
