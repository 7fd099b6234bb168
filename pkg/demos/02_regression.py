"""Robust regression: least squares is dragged by one outlier, Huber and l1
IRLS are not, and l0 regression recovers the clean fit exactly."""
import numpy as np

from glram import HUBER, L1, L2, batch_regress, solve_l0
from glram.oracle import scan_regression_1d

rng = np.random.default_rng(0)
a = rng.uniform(1, 2, 40)
b = 1.5 * a
b[3] += 80.0                          # one gross outlier

for g in (L2, HUBER, L1):
    out = batch_regress(g, a[:, None], b[:, None])
    x_opt, opt = scan_regression_1d(g, a, b)
    print(f"{str(g):12s} slope={out.X[0, 0]:.4f}  cost={out.v[0]:.4f}  "
          f"1-d oracle cost={opt:.4f}  solver={out.solver_id}")

x, mismatches = solve_l0(a[:, None], b)
print(f"l0           slope={x[0]:.4f}  mismatched rows={mismatches}")
