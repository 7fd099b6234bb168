from itertools import combinations

import numpy as np
import pytest

from glram.errors import BudgetError, LemmaPreconditionError
from glram.loss import HUBER, L1, L2, matrix_cost
from glram.oracle import (cramer_coeffs, exhaustive_best_subset, golden_section_min,
                          l1_alternating_baseline, max_det_subset, monte_carlo_lemma21,
                          regression_bracket, scan_regression_1d)

M_SMALL = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 2.0]])


def _reverse_pass_best(M, H, r):
    """Second enumeration in reverse order, for self-consistency."""
    best = 0.0
    for P in reversed(list(combinations(H, r))):
        for Q in reversed(list(combinations(range(M.shape[0]), r))):
            best = max(best, abs(np.linalg.det(M[np.ix_(Q, P)])))
    return best


def test_max_det_small_example():
    res = max_det_subset(M_SMALL, [0, 1, 2])
    assert res.det_abs == pytest.approx(2.0)
    assert res.P.tolist() == [0, 2] and res.Q.tolist() == [0, 1] and res.rank == 2


def test_max_det_identity_and_zero():
    res = max_det_subset(np.eye(3), [0, 1, 2])
    assert res.P.tolist() == res.Q.tolist() == [0, 1, 2] and res.det_abs == pytest.approx(1.0)
    res = max_det_subset(np.zeros((3, 4)), [0, 1])
    assert res.rank == 0 and res.P.size == 0


def test_max_det_rank_one_picks_largest_entry(rng):
    M = np.outer(rng.standard_normal(4), rng.standard_normal(6))
    res = max_det_subset(M, range(6))
    assert res.rank == 1
    r, c = np.unravel_index(np.argmax(np.abs(M)), M.shape)
    assert res.P.tolist() == [c] and res.Q.tolist() == [r]


def test_max_det_self_consistency(rng):
    for _ in range(20):
        M = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 7))
        H = sorted(rng.choice(7, size=5, replace=False).tolist())
        res = max_det_subset(M, H)
        assert res.det_abs >= _reverse_pass_best(M, H, res.rank) * (1 - 1e-9)


def test_max_det_budget():
    with pytest.raises(BudgetError):
        max_det_subset(np.eye(13), range(13))
    with pytest.raises(BudgetError):
        max_det_subset(np.eye(8), range(8))


def test_cramer_examples():
    alpha = cramer_coeffs(M_SMALL, [0, 2], 1)
    np.testing.assert_allclose(alpha, [-1.0, 0.5])
    M = np.array([[1.0, 3.0, 1.0], [2.0, 0.5, 2.0]])
    # column 2 duplicates column 0 of H; lexicographic tie-break keeps 0 in P
    np.testing.assert_allclose(cramer_coeffs(M, [0, 1], 2), [1.0, 0.0])


def test_cramer_precondition_and_arguments():
    with pytest.raises(LemmaPreconditionError):
        cramer_coeffs(M_SMALL, [0, 1], 2)
    with pytest.raises(ValueError):
        cramer_coeffs(M_SMALL, [0, 1], 1)


def test_cramer_bound_random_rank2():
    gen = np.random.default_rng(8)
    checked = 0
    for _ in range(50):
        M = gen.standard_normal((4, 2)) @ gen.standard_normal((2, 8))
        H, i = [0, 1, 2, 3], int(gen.integers(4, 8))
        try:
            alpha = cramer_coeffs(M, H, i)
        except LemmaPreconditionError:
            continue
        checked += 1
        assert np.max(np.abs(alpha)) <= 1 + 1e-9
        np.testing.assert_allclose(M[:, H] @ alpha, M[:, i], atol=1e-9)
    assert checked > 10


def test_exhaustive_best_subset_examples(rng):
    A = np.outer(rng.standard_normal(6), rng.standard_normal(5))
    _, cost = exhaustive_best_subset(A, L2, 1)
    assert cost <= 1e-10 * np.linalg.norm(A)
    _, cost = exhaustive_best_subset(np.eye(5), L1, 4)
    assert cost >= 1 - 1e-9
    S, cost = exhaustive_best_subset(np.eye(3), L1, 0)
    assert S.size == 0 and cost == 3.0
    with pytest.raises(BudgetError):
        exhaustive_best_subset(np.eye(30), L1, 5)


def test_exhaustive_matches_explicit_enumeration(rng):
    A = rng.standard_normal((6, 5))
    _, cost = exhaustive_best_subset(A, L2, 2)
    best = min(np.sum((A[:, list(S)] @ np.linalg.lstsq(A[:, list(S)], A, rcond=None)[0] - A) ** 2)
               for S in combinations(range(5), 2))
    assert cost == pytest.approx(best / 2, rel=1e-9)


def test_monte_carlo_rank_one():
    M = np.outer(np.random.default_rng(0).standard_normal(3), np.random.default_rng(1).standard_normal(10))
    rep = monte_carlo_lemma21(M, 1, trials=2000, rng=0, count_all=False)
    assert rep.event_frequency >= 0.6


def test_monte_carlo_zero_matrix():
    rep = monte_carlo_lemma21(np.zeros((3, 6)), 1, trials=50, rng=1)
    assert rep.event_frequency == 1.0 and rep.lemma22_frequency == 1.0


def test_monte_carlo_rank_two():
    gen = np.random.default_rng(3)
    M = gen.standard_normal((6, 2)) @ gen.standard_normal((2, 12))
    rep = monte_carlo_lemma21(M, 2, trials=400, rng=3)
    assert rep.event_frequency >= 0.5 - 3 * np.sqrt(0.25 / 400)
    with pytest.raises(ValueError):
        monte_carlo_lemma21(M, 6, trials=1)


def test_bracket_and_golden():
    assert regression_bracket([1.0, 2.0, 0.0], [3.0, -2.0, 5.0]) == (-1.0, 3.0)
    assert regression_bracket([0.0], [1.0]) == (0.0, 0.0)
    x, fx = golden_section_min(lambda t: (t - 1.3) ** 2, -5, 5, resolution=1e-10)
    assert x == pytest.approx(1.3, abs=1e-8)


def test_scan_regression_1d_l1_is_weighted_median():
    a = np.array([1.0, 2.0, 0.5, 3.0])
    b = np.array([1.0, 5.0, 3.0, -2.0])
    x, cost = scan_regression_1d(L1, a, b)
    # exact minimum of a piecewise-linear convex function is at a kink
    kinks = b / a
    exact = min(np.sum(np.abs(a * t - b)) for t in kinks)
    assert cost == pytest.approx(exact, abs=1e-12)


def test_l1_baseline_examples(rng):
    A = rng.standard_normal((15, 2)) @ rng.standard_normal((2, 12))
    base = l1_alternating_baseline(A, 2, iters=30, seed=0)
    assert matrix_cost(L1, A - base.matrix) <= 1e-6 * np.abs(A).sum()
    h = np.array(base.history)
    assert np.all(np.diff(h) <= 1e-9 * h[:-1] + 1e-12 * np.abs(A).sum())
    n = 10
    base = l1_alternating_baseline(np.eye(n), 1, iters=20, seed=1)
    assert matrix_cost(L1, np.eye(n) - base.matrix) >= n - 2
    with pytest.raises(ValueError):
        l1_alternating_baseline(np.eye(3), 4)
