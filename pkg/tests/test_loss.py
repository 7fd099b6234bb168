import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glram.loss import (HUBER, KINDS, L1, L2, LossSpec, ati_ratio_report, check_ati, column_costs,
                        make_loss, matrix_cost, parse_loss, vector_cost)

GRID = np.concatenate([-np.logspace(-6, 4, 400)[::-1], [0.0], np.logspace(-6, 4, 400)])
ALL = [LossSpec(k) for k in KINDS] + [make_loss("lp", p=1.5), make_loss("quantile", tau=0.3),
                                     make_loss("huber", tau=0.25), make_loss("tukey", tau=3)]


def test_formula_examples():
    assert HUBER.eval(0.5) == pytest.approx(0.125)
    assert HUBER.eval(2.0) == pytest.approx(1.5)
    q = make_loss("quantile", tau=0.3)
    assert q.eval(-1.0) == pytest.approx(0.7)
    assert q.eval(1.0) == pytest.approx(0.3)
    assert LossSpec("reverse_huber").eval(3.0) == pytest.approx(9.0)
    assert LossSpec("reverse_huber").eval(0.5) == pytest.approx(0.5)


def test_remaining_formulas_match_direct_evaluation():
    x = 1.7
    cases = {
        "l1l2": 2 * (math.sqrt(1 + x * x / 2) - 1),
        "geman_mcclure": x * x / (2 + 2 * x * x),
        "fair": x - math.log(1 + x),
        "tukey": 1 / 6,
        "cauchy": 0.5 * math.log(1 + x * x),
        "l0": 1.0,
        "jumping": 1.0,
        "relu": x,
    }
    for kind, want in cases.items():
        assert LossSpec(kind).eval(x) == pytest.approx(want, rel=1e-12), kind
    assert LossSpec("tukey").eval(0.5) == pytest.approx(1 / 6 * (1 - (1 - 0.25) ** 3))
    assert make_loss("lp", p=3).eval(-2.0) == pytest.approx(8 / 3)
    assert LossSpec("relu").eval(-4.0) == 0.0
    assert make_loss("jumping", c=2, tau=0.25).eval(0.25) == 0.0
    assert make_loss("jumping", c=2, tau=0.25).eval(0.3) == 2.0


@pytest.mark.parametrize("g", ALL, ids=str)
def test_zero_at_origin_and_nonnegative(g):
    assert g.eval(0.0) == 0.0
    assert np.all(g(GRID) >= 0.0)
    assert g.ati_bound(1) >= 1


@pytest.mark.parametrize("g", [g for g in ALL if g.mon_constant == 1.0], ids=str)
def test_nondecreasing_in_magnitude(g):
    pos = np.logspace(-6, 4, 800)
    for sign in (1.0, -1.0):
        vals = g(sign * pos)
        assert np.all(np.diff(vals) >= -1e-12 * np.maximum(1.0, vals[1:]))


@pytest.mark.parametrize("g", ALL, ids=str)
def test_monotone_property_with_constant(g):
    if math.isinf(g.mon_constant):
        pytest.skip("no finite monotonicity constant")
    gen = np.random.default_rng(3)
    x = gen.choice(GRID, 4000)
    y = gen.choice(GRID, 4000)
    small = np.where(np.abs(x) <= np.abs(y), x, y)
    large = np.where(np.abs(x) <= np.abs(y), y, x)
    assert np.all(g(small) <= g.mon_constant * g(large) * (1 + 1e-12))


def test_quantile_mon_constant():
    assert make_loss("quantile", tau=0.3).mon_constant == pytest.approx(0.7 / 0.3)
    assert make_loss("quantile", tau=0.5).mon_constant == 1.0


@pytest.mark.parametrize("g", [g for g in ALL if g.symmetric], ids=str)
def test_symmetry(g):
    a, b = g(GRID), g(-GRID)
    assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(1.0, a))


def test_relu_and_skewed_quantile_not_symmetric():
    assert not LossSpec("relu").symmetric
    assert not make_loss("quantile", tau=0.3).symmetric


def test_reverse_huber_convex_on_grid():
    g = LossSpec("reverse_huber")
    x = np.linspace(-5, 5, 2001)
    second = g(x[2:]) - 2 * g(x[1:-1]) + g(x[:-2])
    assert np.all(second >= -1e-12)


@pytest.mark.parametrize("g", [g for g in ALL if math.isfinite(g.ati_bound(2))], ids=str)
@pytest.mark.parametrize("t", [2, 3, 5])
def test_check_ati_passes_with_registered_constant(g, t):
    rep = check_ati(g, t, trials=4000, rng=11)
    assert rep.passed, (rep.max_ratio, rep.worst_sample)


def test_check_ati_l2_equality_case():
    rep = ati_ratio_report(L2, [[0.7, 0.7]])
    assert rep.max_ratio == pytest.approx(1.0, rel=1e-12)


def test_check_ati_quantile_and_huber():
    assert check_ati(make_loss("quantile", tau=0.3), 4, trials=2000).passed
    rep = check_ati(HUBER, 3, trials=10_000)
    assert rep.bound == 3 and rep.passed


def test_check_ati_huber_near_worst_case_grid():
    # equal large entries are the tight case for the linear constant
    xs = np.array([[a, a, a] for a in np.logspace(-3, 6, 200)])
    assert ati_ratio_report(HUBER, xs).max_ratio <= 1.0 + 1e-12


def test_check_ati_rejects_small_t_and_skips_zero_rows():
    with pytest.raises(ValueError):
        check_ati(HUBER, 1)
    rep = ati_ratio_report(LossSpec("l0"), [[0.0, 0.0], [1.0, -1.0]])
    assert rep.trials == 1 and rep.passed


def test_jumping_has_no_finite_ati():
    assert math.isinf(LossSpec("jumping").ati_bound(2))
    # every ratio is 0 against an infinite constant, so the check is vacuous
    assert check_ati(LossSpec("jumping"), 2, trials=100).max_ratio == 0.0


def test_costs():
    assert vector_cost(HUBER, [0.5, 2.0]) == pytest.approx(1.625)
    assert matrix_cost(LossSpec("l0"), np.eye(3)) == 3
    gen = np.random.default_rng(0)
    A = gen.standard_normal((7, 5))
    total = 0.0
    for i in range(7):
        for j in range(5):
            total += abs(A[i, j])
    assert matrix_cost(L1, A) == pytest.approx(total, rel=1e-12)
    np.testing.assert_allclose(column_costs(L1, A), np.abs(A).sum(axis=0))


@settings(max_examples=60)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=20))
def test_matrix_cost_is_sum_of_column_costs(vals):
    A = np.array(vals).reshape(-1, 1)
    A = np.hstack([A, -2 * A])
    assert matrix_cost(HUBER, A) == pytest.approx(vector_cost(HUBER, A[:, 0]) + vector_cost(HUBER, A[:, 1]))


def test_parse_loss_strings():
    assert parse_loss("huber:tau=1") == HUBER
    assert parse_loss("lp:p=1.5")["p"] == 1.5
    assert parse_loss("quantile:tau=0.3")["tau"] == 0.3
    assert parse_loss("l1") == L1
    assert str(parse_loss("huber:tau=2")) == "huber:tau=2"
    for bad in ("nope", "huber:tau", "huber:beta=2", "quantile:tau=1.5", "huber:tau=-1"):
        with pytest.raises(ValueError):
            parse_loss(bad)


def test_flags():
    assert HUBER.convex and HUBER.sketchable and HUBER.symmetric
    assert not LossSpec("cauchy").convex
    assert L1.scale_invariant and not HUBER.scale_invariant
    assert not make_loss("lp", p=3).sketchable


def test_derivative_closed_and_numeric_forms_agree():
    x = np.linspace(-3, 3, 61)
    x = x[np.abs(np.abs(x) - 1.0) > 1e-3]
    for kind in ("huber", "fair", "cauchy", "geman_mcclure", "tukey", "l1l2", "reverse_huber"):
        g = LossSpec(kind)
        h = 1e-6
        numeric = (g(x + h) - g(x - h)) / (2 * h)
        np.testing.assert_allclose(g.derivative(x), numeric, atol=1e-5, err_msg=kind)
