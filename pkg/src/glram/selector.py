"""Bicriteria column subset selection for entrywise g-loss low-rank approximation.

Each round draws several uniform samples of ``sample_size`` columns from
the surviving set ``T``, regresses every other surviving column on each
sample, and keeps the sample whose cheapest ``drop_fraction`` share of
columns has the smallest total estimated cost.  Those cheap columns are
discarded together with the sample; the sample joins the output.  Rounds
continue while ``|T| >= stop_threshold``; the survivors join the output.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
import math

import numpy as np

from .errors import CapabilityError
from .loss import matrix_cost
from .matrix import RngState, as_matrix, column_set, sample_subset
from .regression import RegressionConfig, batch_regress

PRESETS = ("theory", "experiment")


@dataclass(frozen=True)
class SelectorConfig:
    k: int
    preset: str = "experiment"
    sample_size: int = None
    drop_fraction: float = None
    repeats_per_round: int = None   # None under "theory": ceil(log2 n)
    stop_threshold: int = None
    seed: RngState = field(default_factory=RngState)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.preset not in PRESETS:
            raise ValueError(f"preset must be one of {PRESETS}")
        theory = self.preset == "theory"
        defaults = {
            "sample_size": 2 * self.k,
            "drop_fraction": 1 / 20 if theory else 1 / 2,
            "repeats_per_round": None if theory else 20,
            "stop_threshold": 1000 * self.k if theory else 4 * self.k,
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, value)
        if not isinstance(self.seed, RngState):
            object.__setattr__(self, "seed", RngState(int(self.seed)))
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        if not 0.0 < self.drop_fraction < 1.0:
            raise ValueError("drop_fraction must lie in (0, 1)")
        if self.stop_threshold <= self.sample_size:
            raise ValueError("stop_threshold must exceed sample_size")
        if self.repeats_per_round is not None and self.repeats_per_round < 1:
            raise ValueError("repeats_per_round must be >= 1")

    def repeats_for(self, n):
        if self.repeats_per_round is not None:
            return self.repeats_per_round
        return max(1, math.ceil(math.log2(max(n, 2))))

    def to_dict(self):
        d = asdict(self)
        d["seed"] = {"seed": self.seed.seed, "stream": self.seed.stream}
        return d


@dataclass
class RoundRecord:
    index: int
    j_star: int
    S: np.ndarray
    R: np.ndarray
    cost: float
    repeat_costs: np.ndarray
    T_size: int          # |T_i| after the round

    def to_dict(self):
        return {
            "index": self.index,
            "j_star": self.j_star,
            "S": [int(i) for i in self.S],
            "R": [int(i) for i in self.R],
            "cost": float(self.cost),
            "repeat_costs": [float(c) for c in self.repeat_costs],
            "T_size": self.T_size,
        }


@dataclass
class SelectionTrace:
    rounds: list
    final_S: np.ndarray
    T_final: np.ndarray
    total_estimated_cost: float
    n_columns: int

    def to_dict(self):
        return {
            "rounds": [r.to_dict() for r in self.rounds],
            "final_S": [int(i) for i in self.final_S],
            "T_final": [int(i) for i in self.T_final],
            "total_estimated_cost": float(self.total_estimated_cost),
        }


def prune_count(remaining, drop_fraction):
    """Columns discarded from the ``remaining`` non-sampled ones (at least one)."""
    return min(remaining, max(1, math.ceil(drop_fraction * remaining)))


def _run_repeat(A, g, T, cfg, reg_config, i, j):
    gen = cfg.seed.spawn(i, j).generator()
    S = sample_subset(gen, T, cfg.sample_size)
    rest = np.setdiff1d(T, S, assume_unique=True)
    out = batch_regress(g, A[:, S], A[:, rest], reg_config)
    # stable sort: equal costs resolve to the lower column index
    order = np.argsort(out.v, kind="stable")
    keep = order[:prune_count(rest.size, cfg.drop_fraction)]
    R = np.sort(rest[keep])
    return S, R, float(np.sum(out.v[keep]))


def select_columns(A, g, cfg, reg_config=None, threads=1):
    """Run the selection rounds and return the full :class:`SelectionTrace`.

    Repeats within a round are independent (each has its own RNG stream)
    and run on ``threads`` workers; results do not depend on ``threads``.
    """
    A = as_matrix(A)
    n = A.shape[1]
    reg_config = reg_config or RegressionConfig()
    repeats = cfg.repeats_for(n)
    T = np.arange(n, dtype=np.int64)
    rounds = []
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        i = 1
        while T.size >= cfg.stop_threshold:
            try:
                if pool is None:
                    results = [_run_repeat(A, g, T, cfg, reg_config, i, j) for j in range(repeats)]
                else:
                    results = list(pool.map(lambda j: _run_repeat(A, g, T, cfg, reg_config, i, j),
                                            range(repeats)))
            except CapabilityError as exc:
                raise CapabilityError(f"round {i}: {exc}") from exc
            costs = np.array([c for _, _, c in results])
            j_star = int(np.argmin(costs))   # first minimum on ties
            S, R, c = results[j_star]
            T = np.setdiff1d(T, np.union1d(S, R), assume_unique=True)
            rounds.append(RoundRecord(i, j_star, S, R, c, costs, int(T.size)))
            i += 1
    finally:
        if pool is not None:
            pool.shutdown()
    chosen = [T] + [r.S for r in rounds]
    final_S = column_set(np.concatenate(chosen), n)
    total = float(sum(r.cost for r in rounds))
    return SelectionTrace(rounds, final_S, T, total, n)


def fit_back(A, S, g, reg_config=None):
    """Regress every column of ``A`` on ``A_S``; return ``(X, cost)``."""
    A = as_matrix(A)
    S = column_set(S, A.shape[1])
    if S.size == 0:
        raise ValueError("S must be non-empty")
    out = batch_regress(g, A[:, S], A, reg_config)
    if g.kind == "l0":
        # l0 costs use the solver's zero threshold
        return out.X, float(np.sum(out.v))
    return out.X, matrix_cost(g, A[:, S] @ out.X - A)
