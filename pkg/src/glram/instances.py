"""Seeded generators for synthetic and adversarial test matrices."""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import GenerationError
from .loss import matrix_cost
from .matrix import RngState, as_generator

# output rank of the block experiment for k = 1, by n
BLOCK_KPRIME = {200: 12, 300: 12, 400: 14, 500: 14}


@dataclass
class PlantedInstance:
    A: np.ndarray
    A_star: np.ndarray
    Delta: np.ndarray
    k: int
    opt_cost_g: float = None
    meta: dict = field(default_factory=dict)

    def opt_cost(self, g):
        """g-cost of the planted residual, an upper bound on the rank-k optimum."""
        return matrix_cost(g, self.Delta)


def _gen(seed):
    return as_generator(seed if isinstance(seed, (RngState, np.random.Generator)) else RngState(int(seed)))


def experiment_block_sizes(n, kprime):
    n1 = (4 * n) // 5
    n3 = kprime
    n2 = n - n1 - n3
    if n2 < 1 or kprime < 1 or n1 < kprime:
        raise ValueError(f"n={n} too small for k'={kprime}")
    return n1, n2, n3


def gen_experiment_block(n, kprime=None, seed=0):
    """Three-block diagonal matrix: replicated small noise, ground truth, outliers.

    Block 1 is ``4n/5`` square and holds copies of ``k'`` distinct sign
    patterns with entries ``+-5/sqrt(n)`` (column j uses pattern j mod k').
    Block 2 is the rank-``k'`` ground truth ``U V^T / sqrt(k')`` with
    Gaussian factors; its size ``n - 4n/5 - k'`` absorbs any rounding.
    Block 3 is ``k' x k'`` diagonal with entries ``+-5 n^0.8``.
    ``A_star`` is the ground-truth block embedded in zeros.
    """
    if kprime is None:
        if n not in BLOCK_KPRIME:
            raise ValueError(f"no default k' for n={n}; pass kprime")
        kprime = BLOCK_KPRIME[n]
    n1, n2, n3 = experiment_block_sizes(n, kprime)
    gen = _gen(seed)
    amp = 5.0 / math.sqrt(n)
    while True:
        patterns = gen.choice(np.array([-amp, amp]), size=(n1, kprime))
        if np.unique(patterns, axis=1).shape[1] == kprime:
            break
    block1 = patterns[:, np.arange(n1) % kprime]
    U = gen.standard_normal((n2, kprime))
    V = gen.standard_normal((n2, kprime))
    block2 = (U @ V.T) / math.sqrt(kprime)
    signs = gen.choice(np.array([-1.0, 1.0]), size=n3)
    block3 = np.diag(signs * 5.0 * n ** 0.8)

    A = np.zeros((n, n), order="F")
    A[:n1, :n1] = block1
    A[n1:n1 + n2, n1:n1 + n2] = block2
    A[n1 + n2:, n1 + n2:] = block3
    A_star = np.zeros((n, n), order="F")
    A_star[n1:n1 + n2, n1:n1 + n2] = block2
    meta = {"block_sizes": (n1, n2, n3), "kprime": kprime}
    return PlantedInstance(A, A_star, A - A_star, kprime, meta=meta)


def huber_hard_groups(n, k):
    eps = 0.2 / (1.5 * k)
    sizes = [int(math.floor(n ** (1.0 - 2.0 * i * eps))) for i in range(1, k + 1)]
    return eps, sizes


def gen_huber_hard(n, k, seed=0):
    """Columns in ``k`` groups with geometrically growing mean and noise.

    Group i has ``floor(n^(1-2 i eps))`` columns ``n^(1.5 i eps) 1 + noise``
    with ``eps = 0.2/(1.5k)``; the noise is ``+-n^(-0.2+i eps)`` on the first
    ``n - ceil(n^0.1)`` rows and ``+-n^(0.5+2 i eps)`` on the rest.  Other
    columns are zero.  ``A_star`` is the rank-one mean part.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    eps, sizes = huber_hard_groups(n, k)
    if sum(sizes) > n:
        raise ValueError(f"group sizes {sizes} exceed n={n}")
    if min(sizes) < 1:
        raise ValueError(f"empty group for n={n}, k={k}")
    gen = _gen(seed)
    n_large = int(math.ceil(n ** 0.1))
    A_star = np.zeros((n, n), order="F")
    Delta = np.zeros((n, n), order="F")
    groups = []
    start = 0
    for i, size in enumerate(sizes, start=1):
        cols = slice(start, start + size)
        A_star[:, cols] = n ** (1.5 * i * eps)
        signs = gen.choice(np.array([-1.0, 1.0]), size=(n, size))
        mag = np.full(n, n ** (-0.2 + i * eps))
        mag[n - n_large:] = n ** (0.5 + 2 * i * eps)
        Delta[:, cols] = signs * mag[:, None]
        groups.append((start, start + size))
        start += size
    meta = {"eps": eps, "groups": groups, "n_large": n_large}
    return PlantedInstance(A_star + Delta, A_star, Delta, 1, meta=meta)


def gen_reverse_huber_hard(n):
    """Column 0 is ``(sqrt(n), 0, ..., 0)``; every other column is ``(0, 1/n, ..., 1/n)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    A = np.zeros((n, n), order="F")
    A[0, 0] = math.sqrt(n)
    A[1:, 1:] = 1.0 / n
    return A


def reverse_huber_witness(n):
    """Rank-one witness ``c w^T`` for :func:`gen_reverse_huber_hard`.

    ``c = (n^-1/4, 1/n, ..., 1/n)``; column 0 uses ``n^(3/4) c`` (matching
    the first coordinate) and every other column uses ``c`` itself.
    """
    c = np.full(n, 1.0 / n)
    c[0] = n ** -0.25
    w = np.ones(n)
    w[0] = n ** 0.75
    return c, w


def gen_identity_jl(n, target_eps=0.25, seed=0, max_attempts=20):
    """Identity plus a low-rank ``B = U U^T`` with ``|I - B|_max <= target_eps``.

    ``U`` has i.i.d. ``+-1/sqrt(k)`` entries, so ``diag(B) = 1`` exactly.
    ``k`` starts at ``ceil(eps^-2 ln n)`` and doubles after each failed draw.
    Note ``rank(B) <= min(k, n)``.  Returns ``(I, B, U)``.
    """
    if not 1.0 / math.sqrt(n) < target_eps < 0.5:
        raise ValueError("target_eps must lie in (1/sqrt(n), 1/2)")
    gen = _gen(seed)
    k = int(math.ceil(target_eps ** -2 * math.log(n)))
    I = np.eye(n, order="F")
    achieved = math.inf
    for _ in range(max_attempts):
        U = gen.choice(np.array([-1.0, 1.0]), size=(n, k)) / math.sqrt(k)
        B = U @ U.T
        achieved = float(np.max(np.abs(I - B)))
        if achieved <= target_eps:
            return I, np.asfortranarray(B), U
        k *= 2
    raise GenerationError(f"|I - UU^T|_max = {achieved:.3g} > {target_eps} after {max_attempts} draws")


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "gaussian"       # gaussian | sparse_outliers | mixed
    sigma: float = 0.0
    density: float = 0.0
    magnitude: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "sparse_outliers", "mixed"):
            raise ValueError(f"unknown noise model {self.kind!r}")
        if self.sigma < 0 or not 0 <= self.density <= 1 or self.magnitude < 0:
            raise ValueError("invalid noise parameters")


def gen_planted(n, k, noise_model=None, seed=0, loss=None, m=None):
    """Rank-k ground truth with unit-norm columns plus structured noise."""
    noise_model = noise_model or NoiseModel()
    m = n if m is None else m
    gen = _gen(seed)
    A_star = gen.standard_normal((n, k)) @ gen.standard_normal((k, m))
    norms = np.linalg.norm(A_star, axis=0)
    A_star /= np.where(norms > 0, norms, 1.0)
    Delta = np.zeros((n, m))
    if noise_model.kind in ("gaussian", "mixed") and noise_model.sigma > 0:
        Delta += noise_model.sigma * gen.standard_normal((n, m))
    if noise_model.kind in ("sparse_outliers", "mixed") and noise_model.density > 0:
        mask = gen.random((n, m)) < noise_model.density
        signs = gen.choice(np.array([-1.0, 1.0]), size=(n, m))
        Delta += mask * signs * noise_model.magnitude
    A_star = np.asfortranarray(A_star)
    Delta = np.asfortranarray(Delta)
    inst = PlantedInstance(np.asfortranarray(A_star + Delta), A_star, Delta, k,
                           meta={"noise": noise_model})
    if loss is not None:
        inst.opt_cost_g = inst.opt_cost(loss)
    return inst
