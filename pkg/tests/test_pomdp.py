import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqs.pomdp import (
    DISCOUNT,
    Action,
    Belief,
    PomdpConfig,
    SearchState,
    belief_update,
    q_go_hat,
    q_stay,
    reward,
    transition_probs,
)

R_1_OF_12 = 0.9494238674460263  # 1 - (e^(1/12) - 1)/(e - 1), mpmath
R_6_OF_12 = 0.6224593312018546  # same, |c| = 6


def test_reward_examples():
    assert reward(12, 12) == 0.0
    assert reward(6, 12) == pytest.approx(0.6226, abs=5e-4)
    assert reward(6, 12) == pytest.approx(R_6_OF_12, abs=1e-15)
    assert reward(1, 12) == pytest.approx(R_1_OF_12, abs=1e-15)
    for n in range(1, 200):
        assert reward(n, n) == 0.0


@pytest.mark.parametrize("size, n", [(0, 5), (6, 5), (-1, 3)])
def test_reward_domain(size, n):
    with pytest.raises(ValueError):
        reward(size, n)


def test_reward_strictly_decreasing_and_bounded():
    for n in (1, 2, 7, 500):
        vals = [reward(s, n) for s in range(1, n + 1)]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_transition_examples():
    assert transition_probs(1.0) == (1.0, 0.0, 0.0, 1.0)
    assert transition_probs(0.5) == (0.25, 0.25, 0.0, 0.5)
    assert transition_probs(0.0) == (0.0, 0.0, 0.0, 0.0)
    for bad in (-0.1, 1.5, math.nan):
        with pytest.raises(ValueError):
            transition_probs(bad)


@settings(max_examples=200)
@given(st.integers(1, 16), st.integers(0, 2**31))
def test_transition_rows_sum_to_one(k, seed):
    eta = np.random.default_rng(seed).dirichlet(np.ones(k)).tolist()
    on = [transition_probs(e) for e in eta]
    assert abs(math.fsum(a + b for a, b, _, _ in on) - 1.0) <= 1e-12
    assert abs(math.fsum(c + d for _, _, c, d in on) - 1.0) <= 1e-12


def test_belief_examples():
    assert belief_update(Belief(0), 0.3, 1) == Belief(1, 0.3)
    assert belief_update(Belief(0, 0.5), 0.5, 1).b == 0.25
    b = belief_update(belief_update(Belief(0), 0.9, 1), 0.8, 2)
    assert b.b == pytest.approx(0.72, abs=1e-15)
    assert b.prob(SearchState(2, True)) == b.b
    assert b.prob(SearchState(2, False)) == pytest.approx(0.28)
    assert b.prob(SearchState(1, True)) == 0.0
    with pytest.raises(ValueError):
        Belief(0, 1.2)


def bayes_filter(dist: dict, etas: dict, observed):
    """Full-state Bayes update over (node, on_path) after descending from one node."""
    post = {}
    for (c, g), p in dist.items():
        for child, eta in etas.items():
            t11, t10, t01, t00 = transition_probs(eta)
            if g:
                post[(child, True)] = post.get((child, True), 0.0) + p * t11
                post[(child, False)] = post.get((child, False), 0.0) + p * t10
            else:
                post[(child, True)] = post.get((child, True), 0.0) + p * t01
                post[(child, False)] = post.get((child, False), 0.0) + p * t00
    # deterministic observation of the arrival node
    kept = {s: p for s, p in post.items() if s[0] == observed}
    z = sum(kept.values())
    return {s: p / z for s, p in kept.items()}, z


@settings(max_examples=200)
@given(st.integers(1, 8), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_belief_update_matches_bayes_filter(k, b, seed):
    rng = np.random.default_rng(seed)
    eta = rng.dirichlet(np.ones(k))
    etas = {10 + i: float(e) for i, e in enumerate(eta)}
    child = 10 + int(rng.integers(k))
    post, z = bayes_filter({(0, True): b, (0, False): 1 - b}, etas, child)
    assert z == pytest.approx(etas[child], abs=1e-12)
    assert belief_update(Belief(0, b), etas[child], child).b == pytest.approx(post[(child, True)], abs=1e-12)


@settings(max_examples=200)
@given(st.lists(st.floats(0.0, 1.0), max_size=30))
def test_belief_product_identity(etas):
    b = Belief(0)
    for i, e in enumerate(etas):
        b = belief_update(b, e, i + 1)
    assert abs(b.b - math.prod(etas)) <= 1e-12


def test_q_stay_examples():
    assert q_stay(1.0, 12, 12) == 0.0
    assert q_stay(1.0, 6, 12) == pytest.approx(R_6_OF_12, abs=1e-15)
    assert q_stay(0.0, 3, 12) == -1.0


def test_q_go_hat_examples():
    assert q_go_hat(1.0, [(1, 1.0, 12)], 12) == q_stay(1.0, 12, 12)
    r0 = reward(3, 12)
    assert q_go_hat(1.0, [(1, 0.5, 3), (2, 0.5, 3)], 12) == pytest.approx(0.5 * (r0 + 1) - 1, abs=1e-15)
    assert q_go_hat(1.0, [(1, 1.0, 4), (2, 0.0, 8)], 12) == pytest.approx(reward(4, 12), abs=1e-15)
    with pytest.raises(ValueError):
        q_go_hat(1.0, [], 12)


@settings(max_examples=300)
@given(st.floats(0, 1), st.integers(1, 40), st.integers(1, 40), st.integers(40, 60))
def test_q_go_hat_two_child_closed_form(e, s1, s2, n):
    r1, r2 = reward(s1, n), reward(s2, n)
    closed = e**2 * (r1 + 1) + (1 - e) ** 2 * (r2 + 1) - 1
    assert abs(q_go_hat(1.0, [(1, e, s1), (2, 1 - e, s2)], n) - closed) <= 1e-12


@settings(max_examples=300)
@given(st.integers(1, 8), st.floats(0, 1), st.integers(0, 2**31))
def test_q_go_hat_bounded_by_best_child(k, b, seed):
    rng = np.random.default_rng(seed)
    n = 50
    sizes = rng.integers(1, n + 1, k)
    eta = rng.dirichlet(np.ones(k))
    qg = q_go_hat(b, [(i, float(e), int(s)) for i, (e, s) in enumerate(zip(eta, sizes))], n)
    best = max(q_stay(float(e) * b, int(s), n) for e, s in zip(eta, sizes))
    assert -1.0 - 1e-12 <= qg <= best + 1e-12
    # a point mass on the best child attains it
    j = int(np.argmax([reward(int(s), n) for s in sizes]))
    point = [(i, 1.0 if i == j else 0.0, int(s)) for i, s in enumerate(sizes)]
    assert q_go_hat(b, point, n) == q_stay(b, int(sizes[j]), n)


def test_config_defaults():
    cfg = PomdpConfig()
    assert cfg.discount == DISCOUNT == 1.0
    assert cfg.schedule.delta == 0.01 and cfg.schedule.nu == 1.0
    assert {a.value for a in Action} == {"descend", "search"}


def test_stop_value_half_cluster_after_one_edge():
    # stopping at a 6-of-12 cluster after one edge of guidance 0.9986 is worth about 0.620
    v = 0.9986 * (reward(6, 12) + 1) - 1
    assert v == pytest.approx(0.620, abs=5e-4)
