"""Brute-force reference computations for desk-scale verification.

Nothing here is fast.  These routines enumerate subsets, scan scalar
parameters, or run heuristics whose only job is to give the main
algorithm something independent to be compared against.
"""
from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from .errors import BudgetError, LemmaPreconditionError
from .loss import L1, column_costs, matrix_cost
from .matrix import as_generator, as_matrix, column_set, numerical_rank, sample_subset
from .regression import l0_cost, l0_threshold, solve_irls
from .selector import fit_back


@dataclass
class MaxDetResult:
    P: np.ndarray     # column indices (global)
    Q: np.ndarray     # row indices
    det_abs: float
    rank: int


def _all_minors(sub, r, budget):
    """|det| of every r x r minor of ``sub``; rows of the result follow
    column subsets in lexicographic order, columns follow row subsets."""
    n, h = sub.shape
    n_p, n_q = math.comb(h, r), math.comb(n, r)
    if n_p * n_q > budget:
        raise BudgetError(f"{n_p} x {n_q} minors exceed budget {budget}")
    Ps = np.array(list(combinations(range(h), r)), dtype=np.int64).reshape(n_p, r)
    Qs = np.array(list(combinations(range(n), r)), dtype=np.int64).reshape(n_q, r)
    rows = sub[Qs]                     # n_q x r x h
    D = np.empty((n_p, n_q))
    for a, P in enumerate(Ps):
        D[a] = np.abs(np.linalg.det(rows[:, :, P]))
    return Ps, Qs, D


def max_det_subset(Mstar, H, budget=5_000_000, max_cols=12, max_rank=6):
    """Column set P within H (with rows Q) maximizing ``|det(M*[Q, P])|``.

    ``|P| = |Q|`` is the numerical rank of ``M*_H``.  Ties within a relative
    1e-9 go to the lexicographically smallest ``(P, Q)``.
    """
    M = np.asarray(Mstar, dtype=np.float64)
    H = column_set(H, M.shape[1])
    if H.size > max_cols:
        raise BudgetError(f"|H| = {H.size} exceeds {max_cols}")
    sub = M[:, H]
    r = numerical_rank(sub)
    if r > max_rank:
        raise BudgetError(f"rank {r} exceeds {max_rank}")
    if r == 0:
        empty = np.zeros(0, dtype=np.int64)
        return MaxDetResult(empty, empty, 1.0, 0)
    Ps, Qs, D = _all_minors(sub, r, budget)
    best = D.max()
    flat = int(np.flatnonzero(D.ravel() >= best * (1.0 - 1e-9))[0])
    a, q = divmod(flat, D.shape[1])
    return MaxDetResult(H[Ps[a]], Qs[q].copy(), float(D[a, q]), r)


def cramer_coeffs(Mstar, H, i, budget=5_000_000):
    """Coefficients expressing column ``i`` of ``M*`` through the columns of H.

    Requires ``i`` to lie outside the max-determinant set of ``H + {i}``;
    the coefficients then come from Cramer's rule on the rows Q and have
    magnitude at most one.  Entries for columns of H outside P are zero.
    """
    M = np.asarray(Mstar, dtype=np.float64)
    H = column_set(H, M.shape[1])
    if i in H:
        raise ValueError("i must not belong to H")
    res = max_det_subset(M, np.append(H, i), budget=budget)
    if i in res.P:
        raise LemmaPreconditionError(f"column {i} is in the max-determinant set {res.P.tolist()}")
    alpha = np.zeros(H.size)
    if res.rank == 0:
        return alpha
    base_mat = M[np.ix_(res.Q, res.P)]
    base = np.linalg.det(base_mat)
    target = M[res.Q, i]
    pos = np.searchsorted(H, res.P)
    for t in range(res.rank):
        mt = base_mat.copy()
        mt[:, t] = target
        alpha[pos[t]] = np.linalg.det(mt) / base
    return alpha


def exhaustive_best_subset(A, g, subset_size, budget=20_000, candidates=None, reg_config=None):
    """Cheapest ``fit_back`` cost over every column subset of the given size.

    ``candidates`` restricts the search (e.g. to one representative per
    group of identical columns).  Exact for least squares; otherwise only
    as good as the regression solver.  Ties go to the lexicographically
    first subset.
    """
    A = as_matrix(A)
    cand = np.arange(A.shape[1]) if candidates is None else column_set(candidates, A.shape[1])
    if subset_size == 0:
        return np.zeros(0, dtype=np.int64), matrix_cost(g, A)
    total = math.comb(cand.size, subset_size)
    if total > budget:
        raise BudgetError(f"{total} subsets exceed budget {budget}")
    best_S, best = None, math.inf
    for S in combinations(cand.tolist(), subset_size):
        _, cost = fit_back(A, S, g, reg_config)
        if cost < best:
            best_S, best = np.array(S, dtype=np.int64), cost
    return best_S, best


def l0_bruteforce(A, b, max_rows=None):
    """Exact ``min_x ||A x - b||_0`` by enumerating row subsets.

    Every subset of at most ``k`` rows (k = columns of A) is fitted exactly
    with ``numpy.linalg.lstsq``; an optimal x always interpolates such a
    subset, so the minimum over the enumeration is the true optimum (under
    the same zero threshold as the main solver).
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).ravel()
    n, k = A.shape
    thr = l0_threshold(A, b)
    best = l0_cost(b, thr)
    for size in range(1, min(k, n) + 1 if max_rows is None else max_rows + 1):
        for rows in combinations(range(n), size):
            rows = list(rows)
            x = np.linalg.lstsq(A[rows], b[rows], rcond=None)[0]
            best = min(best, l0_cost(A @ x - b, thr))
            if best == 0:
                return 0
    return best


@dataclass
class Lemma21Report:
    trials: int
    event_frequency: float          # Pr[i not in R(H + {i})]
    lemma22_frequency: float        # Pr[#{i : i not in R(H + {i})} >= (m - 2k)/4]


def monte_carlo_lemma21(Mstar, k, trials=2000, rng=0, count_all=True, budget=5_000_000):
    """Monte Carlo frequencies of the uniform-sampling events.

    Each trial draws H of size 2k and a column i outside it, and records
    whether i avoids the max-determinant set of ``H + {i}``.  With
    ``count_all`` it also checks every other i for the same H and records
    whether at least ``(m - 2k)/4`` of them avoid it.
    """
    M = np.asarray(Mstar, dtype=np.float64)
    m = M.shape[1]
    if 2 * k >= m:
        raise ValueError("need 2k < m")
    gen = as_generator(rng)
    universe = np.arange(m)
    hits = 0
    lemma22 = 0
    for _ in range(trials):
        H = sample_subset(gen, universe, 2 * k)
        rest = np.setdiff1d(universe, H)
        i = int(gen.choice(rest))
        outside = {}
        for c in (rest if count_all else [i]):
            outside[int(c)] = int(c) not in max_det_subset(M, np.append(H, c), budget=budget).P
        hits += outside[i]
        if count_all:
            lemma22 += sum(outside.values()) >= (m - 2 * k) / 4
    return Lemma21Report(trials, hits / trials, lemma22 / trials if count_all else math.nan)


def regression_bracket(a, b):
    """Interval that contains a minimizer of ``sum g(a x - b)`` for any
    loss nondecreasing in |x|: the span of the per-row fits ``b_i/a_i``."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    nz = np.abs(a) > 0
    if not np.any(nz):
        return 0.0, 0.0
    t = b[nz] / a[nz]
    return float(t.min()), float(t.max())


def golden_section_min(f, lo, hi, resolution=1e-7, max_iter=500):
    """Minimize a unimodal scalar function on ``[lo, hi]``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= resolution:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def scan_regression_1d(g, a, b, lo=None, hi=None, grid=4001, rel_resolution=1e-7):
    """Oracle for ``min_x sum g(a x - b)``: grid scan then golden-section refinement.

    The refinement runs on the two grid cells around the best grid point
    down to ``rel_resolution`` times the cell width (finer than the same
    fraction of the bracket).  The per-row fits ``b_i/a_i`` inside that
    cell, where piecewise losses have their kinks, are evaluated too, as
    are the best grid point and ``x = 0``.  Returns ``(x, cost)``.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if lo is None or hi is None:
        lo, hi = regression_bracket(a, b)
    def f(x):
        return float(np.sum(g(a * x - b)))
    if hi <= lo:
        return lo, f(lo)
    xs = np.linspace(lo, hi, grid)
    vals = np.sum(g(np.outer(a, xs) - b[:, None]), axis=0)
    j = int(np.argmin(vals))
    left, right = xs[max(j - 1, 0)], xs[min(j + 1, grid - 1)]
    x, fx = golden_section_min(f, left, right, resolution=rel_resolution * (right - left))
    candidates = [(fx, x), (float(vals[j]), float(xs[j])), (f(0.0), 0.0)]
    nz = a != 0
    kinks = b[nz] / a[nz]
    for t in kinks[(kinks >= left) & (kinks <= right)]:
        candidates.append((f(float(t)), float(t)))
    best = min(candidates)
    return best[1], best[0]


@dataclass
class L1Baseline:
    U: np.ndarray
    V: np.ndarray
    history: list     # l1 cost after init and after every half-step

    @property
    def matrix(self):
        return self.U @ self.V


def l1_alternating_baseline(A, k, iters=50, seed=0, inner_iters=10):
    """Heuristic entrywise-l1 rank-k factorization ``U V``.

    Random Gaussian ``U``; then alternately refit ``V`` (columns of A on U)
    and ``U`` (rows of A on V) by warm-started, damped l1 IRLS.  The l1
    cost never increases across half-steps.  No approximation guarantee.
    """
    A = as_matrix(A)
    n, m = A.shape
    if not 1 <= k <= min(n, m):
        raise ValueError("k must lie in [1, min(n, m)]")
    gen = as_generator(seed)
    U = gen.standard_normal((n, k))
    V = solve_irls(L1, U, A, max_iters=inner_iters).X
    history = [matrix_cost(L1, A - U @ V)]
    for _ in range(iters):
        U = solve_irls(L1, V.T, A.T, max_iters=inner_iters, X0=U.T).X.T
        history.append(matrix_cost(L1, A - U @ V))
        V = solve_irls(L1, U, A, max_iters=inner_iters, X0=V).X
        history.append(matrix_cost(L1, A - U @ V))
    return L1Baseline(U, V, history)
