"""Structural facts behind uniform column sampling, checked by brute force."""
import numpy as np

from glram.errors import LemmaPreconditionError
from glram.oracle import cramer_coeffs, max_det_subset, monte_carlo_lemma21

M = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 2.0]])
res = max_det_subset(M, [0, 1, 2])
print("max-det columns", res.P.tolist(), "rows", res.Q.tolist(), "|det|", res.det_abs)
print("column 1 through columns {0, 2}:", cramer_coeffs(M, [0, 2], 1))

rng = np.random.default_rng(1)
worst, seen = 0.0, 0
while seen < 200:
    Ms = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 5))
    try:
        alpha = cramer_coeffs(Ms, [0, 1, 2, 3], 4)
    except LemmaPreconditionError:
        continue
    seen += 1
    worst = max(worst, np.abs(alpha).max())
print(f"largest coefficient over {seen} random rank-2 cases: {worst:.6f}")

Ms = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 12))
rep = monte_carlo_lemma21(Ms, 2, trials=500, rng=2)
print(f"P[sampled column avoids the max-det set] ~ {rep.event_frequency:.3f}")
print(f"P[a quarter of the columns avoid it]      ~ {rep.lemma22_frequency:.3f}")
