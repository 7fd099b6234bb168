"""End-to-end runs: the block-diagonal comparison and the hardness ratio sweeps."""
from dataclasses import dataclass
import math
import time

import numpy as np

from .instances import (BLOCK_KPRIME, gen_experiment_block, gen_huber_hard,
                        gen_reverse_huber_hard, reverse_huber_witness)
from .loss import HUBER, LossSpec, matrix_cost
from .matrix import RngState, numerical_rank, truncated_frobenius_rank_k
from .oracle import exhaustive_best_subset, l1_alternating_baseline, scan_regression_1d
from .selector import SelectorConfig, fit_back, select_columns

REPORT_SCHEMA = "glram-report/1"


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"[{stage}] {exc}")
        self.stage = stage
        self.original = exc


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, typ, exc, tb):
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


@dataclass
class ExperimentResult:
    report: dict
    A: np.ndarray
    ours_X: np.ndarray
    svd_B: np.ndarray
    l1_U: np.ndarray
    l1_V: np.ndarray


def run_experiment(n, k=1, seed=0, preset="experiment", kprime=None, l1_iters=50,
                   dry_run=False, timing=False, threads=1):
    """Block-diagonal comparison of the selector against SVD and an l1 baseline.

    Both baselines use the selector's output size as their target rank.
    All three fits are scored with Huber (tau = 1).
    """
    kprime = kprime if kprime is not None else BLOCK_KPRIME.get(n)
    config = {"n": n, "k": k, "seed": seed, "preset": preset, "kprime": kprime,
              "l1_iters": l1_iters, "eval_loss": str(HUBER)}
    report = {"schema": REPORT_SCHEMA, "config": config}
    if dry_run:
        return ExperimentResult(report, None, None, None, None, None)
    t0 = time.perf_counter()
    with _Stage("generate"):
        inst = gen_experiment_block(n, kprime, seed=RngState(seed, stream=1))
        A = inst.A
    with _Stage("select"):
        cfg = SelectorConfig(k, preset=preset, seed=RngState(seed))
        trace = select_columns(A, HUBER, cfg, threads=threads)
        S = trace.final_S
        X, ours_cost = fit_back(A, S, HUBER)
    r = int(S.size)
    with _Stage("svd"):
        B = truncated_frobenius_rank_k(A, r)
        svd_cost = matrix_cost(HUBER, A - B)
    with _Stage("l1"):
        base = l1_alternating_baseline(A, r, iters=l1_iters, seed=RngState(seed, stream=2))
        l1_cost = matrix_cost(HUBER, A - base.matrix)
    n1, n2, _ = inst.meta["block_sizes"]
    report.update({
        "output_rank": r,
        "output_numerical_rank": numerical_rank(A[:, S]),
        "final_S": [int(i) for i in S],
        "rounds": len(trace.rounds),
        "selected_per_block": [int(np.sum(S < n1)), int(np.sum((S >= n1) & (S < n1 + n2))),
                               int(np.sum(S >= n1 + n2))],
        "costs": {"ours": ours_cost, "svd": svd_cost, "l1_baseline": l1_cost},
        "ours_best": bool(ours_cost < svd_cost and ours_cost < l1_cost),
    })
    if timing:
        report["wall_time_s"] = time.perf_counter() - t0
    return ExperimentResult(report, A, X, B, base.U, base.V)


def costs_csv(report):
    rows = ["method,huber_cost"]
    for method in ("ours", "svd", "l1_baseline"):
        rows.append(f"{method},{report['costs'][method]!r}")
    return "\n".join(rows) + "\n"


# -- hardness sweeps -----------------------------------------------------------

REVERSE_HUBER = LossSpec("reverse_huber")


def _best_single_column_1d(g, A):
    """Exact-by-scan cost of the best single column, using one 1-d oracle
    fit per distinct (source, target) column pair."""
    distinct, inverse, counts = np.unique(A, axis=1, return_inverse=True, return_counts=True)
    best = math.inf
    for s in range(distinct.shape[1]):
        total = 0.0
        for t in range(distinct.shape[1]):
            if s == t:
                continue
            _, cost = scan_regression_1d(g, distinct[:, s], distinct[:, t])
            total += counts[t] * cost
        best = min(best, total)
    return best


def reverse_huber_ratio(n):
    """(best single-column cost, rank-one witness cost) for the reverse-Huber instance."""
    A = gen_reverse_huber_hard(n)
    subset_cost = _best_single_column_1d(REVERSE_HUBER, A)
    c, w = reverse_huber_witness(n)
    witness_cost = matrix_cost(REVERSE_HUBER, np.outer(c, w) - A)
    return subset_cost, witness_cost


def huber_hard_k(n):
    return max(1, int(math.floor(0.5 * math.sqrt(math.log2(n)))))


def huber_hard_ratio(n, seed=0, g=HUBER):
    """(best small-subset cost, rank-one mean-matrix cost) on the Huber instance.

    ``k = floor(sqrt(log2 n) / 2)`` (at least 1) groups; the subset has
    ``k // 2`` columns drawn from one representative per group plus a zero
    column.  For ``k = 1`` the subset is empty and its cost is ``||A||_g``.
    """
    k = huber_hard_k(n)
    inst = gen_huber_hard(n, k, seed=RngState(seed))
    reps = [lo for lo, _ in inst.meta["groups"]]
    last = inst.meta["groups"][-1][1]
    if last < n:
        reps.append(last)
    _, subset_cost = exhaustive_best_subset(inst.A, g, k // 2, candidates=reps)
    return subset_cost, matrix_cost(g, inst.Delta)


def run_hardness(kind, sizes, seed=0):
    """Rows of ``(n, subset_cost, rank_cost, ratio)`` and a flag telling
    whether the ratio increases strictly with n."""
    rows = []
    for n in sizes:
        if kind == "reverse_huber":
            sub, rank = reverse_huber_ratio(n)
        elif kind == "huber":
            sub, rank = huber_hard_ratio(n, seed=seed)
        else:
            raise ValueError(f"unknown hardness kind {kind!r}")
        sub, rank = float(sub), float(rank)
        rows.append((int(n), sub, rank, sub / rank))
    ratios = [r[3] for r in rows]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    return rows, increasing


def hardness_csv(rows):
    lines = ["n,subset_cost,rank_cost,ratio"]
    lines += [f"{n},{s!r},{r!r},{q!r}" for n, s, r, q in rows]
    return "\n".join(lines) + "\n"
