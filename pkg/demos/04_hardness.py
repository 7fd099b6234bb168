"""Hardness instances: how much worse the best small column subset is than
an explicit low-rank witness."""
from glram.experiments import huber_hard_ratio, run_hardness

rows, increasing = run_hardness("reverse_huber", [64, 256, 1024])
print("reverse Huber: best single column vs rank-one witness")
for n, sub, rank, ratio in rows:
    print(f"  n={n:5d} subset={sub:10.3f} witness={rank:9.3f} ratio={ratio:.4f}")
print("  ratio strictly increasing:", increasing)

sub, rank = huber_hard_ratio(4096)
print(f"\nHuber, n=4096: subset cost {sub:.4g} vs mean-matrix cost {rank:.4g} "
      f"(ratio {sub / rank:.2f})")
