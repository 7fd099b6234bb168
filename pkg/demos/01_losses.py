"""Tour of the loss registry: values, structural constants, and an empirical
check of the approximate triangle inequality."""
import numpy as np

from glram import LossSpec, check_ati, make_loss

xs = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
print("x:", xs)
for kind in ("huber", "lp", "l1l2", "geman_mcclure", "fair", "tukey", "cauchy",
             "quantile", "l0", "reverse_huber"):
    g = LossSpec(kind)
    print(f"{str(g):22s} g(x)={np.round(g(xs), 4)}  ati(3)={g.ati_bound(3):g}  mon={g.mon_constant:g}")

# A skewed quantile loss needs a monotonicity constant above one.
q = make_loss("quantile", tau=0.3)
print("\nquantile tau=0.3 mon constant:", round(q.mon_constant, 4))

# The linear ati constant is enough for Huber even on mixed-scale inputs.
for t in (2, 3, 5):
    rep = check_ati(LossSpec("huber"), t, trials=20_000, rng=t)
    print(f"huber t={t}: worst g(sum)/(t * sum g) = {rep.max_ratio:.4f}  pass={rep.passed}")
