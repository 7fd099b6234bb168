"""Multiple-response regression under an entrywise loss.

Given ``A`` (n x d) and ``B`` (n x m) each solver returns coefficients
``X`` (d x m) and per-column cost estimates ``v``.  The estimates are the
achieved costs of the returned coefficients, so ``v_i >= OPT_i`` holds by
construction; the upper side ``v_i <= reg_factor * OPT_i`` is a property
of the solver (exact for least squares, certified by tests for IRLS).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, SolverError
from .loss import column_costs
from .matrix import RANK_TOL, independent_columns, least_squares_minnorm


@dataclass
class RegressionOutcome:
    X: np.ndarray
    v: np.ndarray
    reg_factor: float
    solver_id: str
    iterations: np.ndarray = None
    history: list = field(default=None, repr=False)


@dataclass(frozen=True)
class RegressionConfig:
    max_iters: int = 100
    tol: float = 1e-8
    reg_factor: float = 2.0
    weight_floor: float = 1e-12


def _as_2d(B):
    B = np.asarray(B, dtype=np.float64)
    return B.reshape(-1, 1) if B.ndim == 1 else B


def _check_dims(A, B):
    if A.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, B is {B.shape}")


def solve_l2(A, B, g=None):
    """Exact least-squares fit of every column of ``B``.

    ``v`` is the sum of squared residuals, or the ``g``-cost of the
    residual when a loss is given (used when dispatching ``lp:p=2``).
    """
    A = _as_2d(A)
    B = _as_2d(B)
    _check_dims(A, B)
    X = least_squares_minnorm(A, B)
    R = A @ X - B
    v = np.sum(R * R, axis=0) if g is None else column_costs(g, R)
    return RegressionOutcome(X, v, 1.0, "l2-exact", np.zeros(B.shape[1], dtype=int))


def irls_weights(g, R, floor=1e-12):
    """IRLS weights ``psi(r) / r`` with ``|r|`` and the weight floored."""
    mag = np.maximum(np.abs(R), floor)
    safe = np.where(R < 0, -mag, mag)
    W = g.derivative(safe) / safe
    return np.maximum(W, floor)


def _weighted_solve(A, B, W):
    """Solve ``(A^T W_j A) x_j = A^T W_j b_j`` for every column j."""
    n, r = A.shape
    outer = (A[:, :, None] * A[:, None, :]).reshape(n, r * r)
    G = (W.T @ outer).reshape(-1, r, r)
    rhs = (W * B).T @ A
    ridge = 1e-14 * np.trace(G, axis1=1, axis2=2) + 1e-300
    G[:, np.arange(r), np.arange(r)] += ridge[:, None]
    try:
        return np.linalg.solve(G, rhs[:, :, None])[:, :, 0].T
    except np.linalg.LinAlgError:
        return np.stack([np.linalg.lstsq(G[j], rhs[j], rcond=None)[0]
                         for j in range(G.shape[0])], axis=1)


def solve_irls(g, A, B, max_iters=100, tol=1e-8, reg_factor=2.0, X0=None,
               weight_floor=1e-12, record=False):
    """Iteratively reweighted least squares, one independent problem per column.

    Each sweep solves a weighted least-squares problem with weights
    ``psi(r)/r``.  A step that raises a column's cost is halved (up to 40
    times) and dropped if it never helps, so the per-column cost sequence
    never increases.  A column stops once its relative cost decrease falls
    below ``tol``.
    """
    A = _as_2d(A)
    B = _as_2d(B)
    _check_dims(A, B)
    n, d = A.shape
    m = B.shape[1]
    X = np.zeros((d, m))
    piv = independent_columns(A)
    iterations = np.zeros(m, dtype=int)
    if piv.size == 0:
        v = column_costs(g, -B)
        return RegressionOutcome(X, v, reg_factor, _irls_id(g), iterations,
                                 [v.copy()] if record else None)
    Ar = np.asfortranarray(A[:, piv])
    if X0 is not None:
        X0 = _as_2d(X0)
        # warm starts may reference dependent columns; refit the same
        # fitted values on the independent ones
        Xr = least_squares_minnorm(Ar, A @ X0)
    else:
        Xr = least_squares_minnorm(Ar, B)
    R = Ar @ Xr - B
    cost = column_costs(g, R)
    history = [cost.copy()] if record else None
    active = np.isfinite(cost)
    if not np.all(active):
        bad = int(np.flatnonzero(~active)[0])
        raise SolverError(f"non-finite cost in column {bad}")

    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ra = R[:, idx]
        W = irls_weights(g, Ra, weight_floor)
        Xa_old = Xr[:, idx]
        Xa_new = _weighted_solve(Ar, B[:, idx], W)
        finite = np.all(np.isfinite(Xa_new), axis=0)
        if not np.all(finite):
            bad = int(idx[np.flatnonzero(~finite)[0]])
            raise SolverError(f"non-finite IRLS iterate in column {bad}")
        step = Xa_new - Xa_old
        old_cost = cost[idx]
        new_X = Xa_new.copy()
        new_cost = column_costs(g, Ar @ new_X - B[:, idx])
        pending = new_cost > old_cost
        scale = 1.0
        for _ in range(40):
            if not np.any(pending):
                break
            scale *= 0.5
            cols = np.flatnonzero(pending)
            trial = Xa_old[:, cols] + scale * step[:, cols]
            trial_cost = column_costs(g, Ar @ trial - B[:, idx[cols]])
            new_X[:, cols] = trial
            new_cost[cols] = trial_cost
            pending[cols] = trial_cost > old_cost[cols]
        # columns whose step never helped keep the old iterate
        stuck = new_cost > old_cost
        new_X[:, stuck] = Xa_old[:, stuck]
        new_cost[stuck] = old_cost[stuck]

        Xr[:, idx] = new_X
        R[:, idx] = Ar @ new_X - B[:, idx]
        cost[idx] = new_cost
        iterations[idx] += 1
        if record:
            history.append(cost.copy())
        rel = (old_cost - new_cost) / np.maximum(old_cost, 1e-300)
        done = stuck | (rel < tol) | (new_cost == 0.0)
        active[idx[done]] = False

    X[piv, :] = Xr
    return RegressionOutcome(X, cost, reg_factor, _irls_id(g), iterations, history)


def _irls_id(g):
    if g.kind == "quantile":
        return "irls-smoothed"
    return "irls" if g.convex else "irls-local"


# -- l0 regression ------------------------------------------------------------

@dataclass
class RegularPartition:
    """Row blocks S_1..S_h: each block has full row rank and spans the rows
    of every later block.  All-zero rows belong to no block and are kept
    in ``null_rows``."""

    blocks: list
    null_rows: np.ndarray
    n: int


def build_regular_partition(A, tol=RANK_TOL):
    """Greedy regular partition of the rows of ``A``.

    Each block is a maximal set of independent rows (scanned in index
    order) among the rows not yet assigned, so it spans all of them and
    hence every later block.
    """
    A = _as_2d(A)
    n = A.shape[0]
    norms = np.linalg.norm(A, axis=1)
    scale = norms.max() if n else 0.0
    null_rows = np.flatnonzero(norms <= tol * scale) if scale > 0 else np.arange(n)
    remaining = [i for i in range(n) if norms[i] > tol * scale] if scale > 0 else []
    blocks = []
    while remaining:
        basis = []
        block, rest = [], []
        for i in remaining:
            row = A[i]
            resid = row.copy()
            for _ in range(2):  # re-orthogonalize once for stability
                for q in basis:
                    resid -= (q @ resid) * q
            if np.linalg.norm(resid) > tol * norms[i]:
                basis.append(resid / np.linalg.norm(resid))
                block.append(i)
            else:
                rest.append(i)
        blocks.append(np.asarray(block, dtype=np.int64))
        remaining = rest
    return RegularPartition(blocks, np.asarray(null_rows, dtype=np.int64), n)


def l0_threshold(A, b):
    scale = max(float(np.max(np.abs(b), initial=0.0)), float(np.max(np.abs(A), initial=0.0)))
    return 1e-9 * (scale if scale > 0 else 1.0)


def l0_cost(residual, threshold):
    return int(np.count_nonzero(np.abs(residual) > threshold))


def solve_l0(A, b, partition=None):
    """k-approximate l0 regression over a regular partition.

    Starts from ``x = 0`` and tries the exact solution of every block's
    equations, keeping the one with the fewest mismatched rows.  The
    result mismatches at most ``k`` times as many rows as the optimum.
    Returns ``(x, cost)``.
    """
    A = _as_2d(A)
    b = np.asarray(b, dtype=np.float64).ravel()
    _check_dims(A, b.reshape(-1, 1))
    thr = l0_threshold(A, b)
    if partition is None:
        partition = build_regular_partition(A)
    best_x = np.zeros(A.shape[1])
    best = l0_cost(A @ best_x - b, thr)
    for block in partition.blocks:
        x = least_squares_minnorm(A[block], b[block])
        cost = l0_cost(A @ x - b, thr)
        if cost < best:
            best_x, best = x, cost
    return best_x, best


def _solve_l0_batch(A, B):
    A = _as_2d(A)
    B = _as_2d(B)
    _check_dims(A, B)
    part = build_regular_partition(A)
    X = np.zeros((A.shape[1], B.shape[1]))
    v = np.zeros(B.shape[1])
    for j in range(B.shape[1]):
        X[:, j], v[j] = solve_l0(A, B[:, j], part)
    return RegressionOutcome(X, v, float(max(A.shape[1], 1)), "l0-partition",
                             np.zeros(B.shape[1], dtype=int))


def batch_regress(g, A, B, config=None, X0=None):
    """Dispatch to the solver matching ``g``.

    ``lp:p=2`` -> exact least squares; ``l0`` -> regular-partition solver;
    any loss with an IRLS weight function -> IRLS.  The jumping and ReLU
    losses have no solver and raise :class:`CapabilityError`.
    """
    config = config or RegressionConfig()
    if g.kind == "lp" and g.params["p"] == 2.0:
        return solve_l2(A, B, g)
    if g.kind == "l0":
        return _solve_l0_batch(A, B)
    if g.kind in ("jumping", "relu"):
        raise CapabilityError(f"no regression solver for loss {g}")
    return solve_irls(g, A, B, max_iters=config.max_iters, tol=config.tol,
                      reg_factor=config.reg_factor, X0=X0,
                      weight_floor=config.weight_floor)

