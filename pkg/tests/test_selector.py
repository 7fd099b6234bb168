import math

import numpy as np
import pytest

from glram.errors import CapabilityError
from glram.instances import NoiseModel, gen_experiment_block, gen_planted
from glram.loss import HUBER, L1, L2, LossSpec, matrix_cost
from glram.matrix import RngState
from glram.selector import SelectorConfig, fit_back, prune_count, select_columns


def test_config_presets():
    th = SelectorConfig(2, preset="theory")
    assert (th.sample_size, th.drop_fraction, th.stop_threshold) == (4, 1 / 20, 2000)
    assert th.repeats_for(1000) == 10
    ex = SelectorConfig(2)
    assert (ex.sample_size, ex.drop_fraction, ex.repeats_per_round, ex.stop_threshold) == (4, 0.5, 20, 8)
    assert SelectorConfig(1, repeats_per_round=3).repeats_for(10**6) == 3


@pytest.mark.parametrize("kwargs", [
    {"k": 0}, {"k": 1, "preset": "fast"}, {"k": 1, "drop_fraction": 1.0},
    {"k": 1, "stop_threshold": 2}, {"k": 1, "sample_size": 0}, {"k": 1, "repeats_per_round": 0},
])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        SelectorConfig(**kwargs)


def test_prune_count():
    assert prune_count(10, 0.5) == 5
    assert prune_count(11, 0.5) == 6
    assert prune_count(3, 1 / 20) == 1
    assert prune_count(0, 0.5) == 0


def _check_trace(trace, cfg, n):
    sizes = [n] + [r.T_size for r in trace.rounds]
    assert all(b < a for a, b in zip(sizes, sizes[1:]))
    union = set(trace.T_final.tolist())
    for r in trace.rounds:
        assert not set(r.S.tolist()) & set(r.R.tolist())
        assert r.cost == min(r.repeat_costs)
        assert r.j_star == int(np.argmin(r.repeat_costs))
        union |= set(r.S.tolist())
    assert sorted(union) == trace.final_S.tolist()
    assert trace.final_S.size <= cfg.stop_threshold + len(trace.rounds) * cfg.sample_size
    assert trace.T_final.size < cfg.stop_threshold


def test_repeated_column_zero_pruned_cost():
    c = np.random.default_rng(0).standard_normal(10)
    A = np.tile(c[:, None], (1, 40))
    cfg = SelectorConfig(1, seed=RngState(3))
    trace = select_columns(A, HUBER, cfg)
    assert trace.rounds[0].cost == 0.0
    assert trace.total_estimated_cost == 0.0
    _check_trace(trace, cfg, 40)


def test_exact_rank_k_l1_zero_fit():
    gen = np.random.default_rng(1)
    dirs = gen.standard_normal((20, 2))
    A = dirs[:, gen.integers(0, 2, 60)] * gen.uniform(0.5, 2.0, 60)
    cfg = SelectorConfig(2, seed=RngState(4))
    trace = select_columns(A, L1, cfg)
    _, cost = fit_back(A, trace.final_S, L1)
    assert cost <= 1e-8 * np.abs(A).sum()


def test_round_count_bound_theory_preset():
    inst = gen_planted(60, 1, NoiseModel("gaussian", sigma=0.1), seed=2)
    cfg = SelectorConfig(1, preset="theory", stop_threshold=5, seed=RngState(0))
    trace = select_columns(inst.A, HUBER, cfg)
    assert len(trace.rounds) <= 20 * math.ceil(math.log2(60))
    _check_trace(trace, cfg, 60)


def test_determinism_and_thread_independence():
    inst = gen_planted(50, 2, NoiseModel("mixed", sigma=0.05, density=0.05, magnitude=5), seed=5)
    cfg = SelectorConfig(2, seed=RngState(9))
    a = select_columns(inst.A, HUBER, cfg)
    b = select_columns(inst.A, HUBER, cfg)
    c = select_columns(inst.A, HUBER, cfg, threads=4)
    assert a.to_dict() == b.to_dict() == c.to_dict()


def test_seed_changes_samples():
    inst = gen_planted(50, 1, NoiseModel("gaussian", sigma=0.1), seed=5)
    a = select_columns(inst.A, HUBER, SelectorConfig(1, seed=RngState(1)))
    b = select_columns(inst.A, HUBER, SelectorConfig(1, seed=RngState(2)))
    assert a.rounds[0].S.tolist() != b.rounds[0].S.tolist()


def test_tie_break_prefers_lower_index():
    # all columns identical => all costs 0; the pruned set is the lowest indices of T \ S
    A = np.ones((4, 20))
    trace = select_columns(A, L2, SelectorConfig(1, repeats_per_round=1, seed=RngState(0)))
    r = trace.rounds[0]
    rest = sorted(set(range(20)) - set(r.S.tolist()))
    assert r.R.tolist() == rest[:9]


def test_no_round_when_below_threshold():
    A = np.random.default_rng(0).standard_normal((5, 3))
    trace = select_columns(A, HUBER, SelectorConfig(1))
    assert trace.rounds == [] and trace.final_S.tolist() == [0, 1, 2]


def test_capability_error_has_round_context():
    A = np.random.default_rng(0).standard_normal((5, 12))
    with pytest.raises(CapabilityError, match="round 1"):
        select_columns(A, LossSpec("relu"), SelectorConfig(1))


def test_fit_back_examples(rng):
    A = rng.standard_normal((8, 6))
    for g in (HUBER, L1, L2):
        X, cost = fit_back(A, range(6), g)
        assert cost <= 1e-12
    u, v = rng.standard_normal(10), rng.standard_normal(7)
    A = np.outer(u, v)
    _, cost = fit_back(A, [3], L2)
    assert cost <= 1e-10 * np.linalg.norm(A)
    with pytest.raises(ValueError):
        fit_back(A, [], L2)


def test_fit_back_cost_recomputes():
    inst = gen_planted(30, 2, NoiseModel("mixed", sigma=0.1, density=0.1, magnitude=3), seed=1)
    X, cost = fit_back(inst.A, [0, 5, 9], HUBER)
    assert cost == pytest.approx(matrix_cost(HUBER, inst.A[:, [0, 5, 9]] @ X - inst.A), rel=1e-12)


def test_l0_fit_back_uses_threshold_count():
    A = np.array([[1.0, 2.0, 0.0], [1.0, 2.0, 1.0]])
    _, cost = fit_back(A, [0], LossSpec("l0"))
    assert cost == 1


@pytest.mark.parametrize("n", [200, 500])
def test_block_experiment_output_rank(n):
    kprime = {200: 12, 500: 14}[n]
    inst = gen_experiment_block(n, kprime, seed=RngState(0, stream=1))
    trace = select_columns(inst.A, HUBER, SelectorConfig(1, seed=RngState(0)))
    assert kprime - 2 <= trace.final_S.size <= kprime + 2
