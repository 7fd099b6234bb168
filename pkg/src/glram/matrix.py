"""Dense matrix helpers, column sets, seeded streams and base factorizations.

Matrices are plain ``numpy.ndarray`` objects in Fortran (column-major)
order so that column subsets are cheap.  Column sets are sorted ``int64``
arrays.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

RANK_TOL = 1e-10


def as_matrix(a, copy=False):
    """Validate ``a`` and return it as a column-major float64 2-D array."""
    arr = np.array(a, dtype=np.float64, order="F", copy=copy or None)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1, order="F")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"matrix must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or Inf entries")
    return np.asfortranarray(arr)


def column_set(indices, ncols=None):
    """Return ``indices`` as a sorted array of distinct column indices.

    Raises ``ValueError`` on duplicates and ``IndexError`` when an index
    falls outside ``[0, ncols)``.
    """
    idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                     dtype=np.int64).ravel()
    out = np.unique(idx)
    if out.size != idx.size:
        raise ValueError("column set contains duplicate indices")
    if ncols is not None and out.size and (out[0] < 0 or out[-1] >= ncols):
        raise IndexError(f"column index out of range for {ncols} columns")
    return out


def subset_columns(A, S):
    """Columns of ``A`` indexed by ``S``, in increasing index order."""
    A = np.asarray(A)
    S = column_set(S, A.shape[1])
    return np.asfortranarray(A[:, S])


@dataclass(frozen=True)
class RngState:
    """Seed plus stream path for a counter-based (Philox) generator.

    ``spawn`` derives independent child streams, e.g. one per
    (round, repeat) pair of the selector.  The same state always yields
    the same draws.
    """

    seed: int = 0
    stream: int = 0
    path: tuple = ()

    def spawn(self, *keys):
        return RngState(self.seed, self.stream, self.path + tuple(int(k) for k in keys))

    def generator(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,) + self.path)
        return np.random.Generator(np.random.Philox(ss))


def as_generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngState):
        return rng.generator()
    return RngState(int(rng)).generator()


def sample_subset(rng, universe, size):
    """Uniformly random ``size``-subset of ``universe`` (sorted)."""
    universe = np.asarray(universe, dtype=np.int64).ravel()
    if size < 0 or size > universe.size:
        raise ValueError(f"cannot sample {size} items from a universe of {universe.size}")
    if size == universe.size:
        return np.sort(universe)
    gen = as_generator(rng)
    return np.sort(gen.choice(universe, size=size, replace=False))


def independent_columns(A, tol=RANK_TOL):
    """Pivot indices of a maximal set of linearly independent columns.

    Uses QR with column pivoting; a column counts when its pivot exceeds
    ``tol`` times the largest pivot.  Returned indices are sorted.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros(0, dtype=np.int64)
    r = int(np.sum(diag > tol * diag[0]))
    return np.sort(piv[:r]).astype(np.int64)


def numerical_rank(A, tol=RANK_TOL):
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def least_squares_minnorm(A, B, tol=RANK_TOL):
    """Minimum-norm least-squares solution of ``A X = B``.

    Complete orthogonal decomposition: pivoted QR of ``A`` to find the
    numerical rank, then a second QR of the leading rows of ``R`` so the
    returned solution has no component in the null space of ``A``.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    vector = B.ndim == 1
    if vector:
        B = B.reshape(-1, 1)
    if A.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, B is {B.shape}")
    n, d = A.shape
    X = np.zeros((d, B.shape[1]))
    Q, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return X[:, 0] if vector else X
    r = int(np.sum(diag > tol * diag[0]))
    QtB = Q[:, :r].T @ B
    if r == d:
        Y = scipy.linalg.solve_triangular(R[:r, :r], QtB)
    else:
        # R[:r, :] = T^T Z^T with Z orthonormal (d x r)
        Z, T = np.linalg.qr(R[:r, :].T)
        W = scipy.linalg.solve_triangular(T, QtB, trans="T")
        Y = Z @ W
    X[piv, :] = Y
    return X[:, 0] if vector else X


def truncated_frobenius_rank_k(A, k, tol=1e-10, max_sweeps=1000, oversample=5, seed=0):
    """Best rank-``k`` Frobenius approximation by orthogonal subspace iteration.

    Iterates an orthonormal basis ``V`` of the right singular subspace
    with Rayleigh-Ritz extraction each sweep, until the top-``k`` subspace
    rotates by less than ``tol`` (largest principal-angle sine) or
    ``max_sweeps`` is reached.  Returns ``A V V^T``.
    """
    A = np.asarray(A, dtype=np.float64)
    n, d = A.shape
    if k < 0 or k > min(n, d):
        raise ValueError(f"k={k} must lie in [0, {min(n, d)}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if k == 0:
        return np.zeros_like(A, order="F")
    p = min(d, k + oversample)
    gen = np.random.default_rng(seed)
    V, _ = np.linalg.qr(gen.standard_normal((d, p)))
    Vk_old = None
    for _ in range(max_sweeps):
        Y = A.T @ (A @ V)
        V, _ = np.linalg.qr(Y)
        # Rayleigh-Ritz on the Gram operator restricted to span(V)
        AV = A @ V
        w, E = np.linalg.eigh(AV.T @ AV)
        V = V @ E[:, ::-1]
        Vk = V[:, :k]
        if Vk_old is not None:
            rot = Vk - Vk_old @ (Vk_old.T @ Vk)
            if np.linalg.norm(rot, 2) < tol:
                break
        Vk_old = Vk
    Vk = V[:, :k]
    return np.asfortranarray((A @ Vk) @ Vk.T)
