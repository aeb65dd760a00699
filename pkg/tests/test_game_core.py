import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import forward_value, pure_policies, tree_value
from strategic_rl.envs import TreeGameSpec, build_random_stochastic, build_random_tree, build_zero_sum_pd
from strategic_rl.game import (BOTH, MAX, MIN, GameBuilder, GameFormatError, GameValidationError,
                               MissingPolicyError, Transition, best_response_value, dumps, loads,
                               minimax_values, nash_conv, policy_from_mapping, policy_values, pure_policy,
                               require_valid, sample_step, uniform_policy, validate_game)
from strategic_rl.rng import stream

C, D = 0, 1


def matrix_game(A, name="m"):
    A = np.asarray(A, dtype=float)
    b = GameBuilder(1, name)
    b.add_state(0, name, *A.shape, BOTH)
    for i in range(A.shape[0]):
        for j in range(A.shape[1]):
            b.set_outcome(0, name, i, j, float(A[i, j]))
    return b.build()


def coin_game():
    b = GameBuilder(2, "s")
    b.add_state(0, "s", 1, 1, BOTH)
    b.add_state(1, "x", 1, 1, BOTH)
    b.add_state(1, "y", 1, 1, BOTH)
    b.set_outcome(0, "s", 0, 0, 0.0, {"x": 0.5, "y": 0.5})
    b.set_outcome(1, "x", 0, 0, 1.0)
    b.set_outcome(1, "y", 0, 0, 0.0)
    return b.build()


def test_validate_well_formed():
    assert validate_game(matrix_game([[0.1, 0.2], [0.3, 0.4]])) == []


def test_validate_bad_row_sum():
    b = GameBuilder(2, "s")
    b.add_state(0, "s", 1, 1, BOTH)
    b.add_state(1, "x", 1, 1, BOTH)
    b.add_state(1, "y", 1, 1, BOTH)
    b.set_outcome(0, "s", 0, 0, 0.0, {"x": 0.5, "y": 0.4})
    b.set_outcome(1, "x", 0, 0, 1.0)
    b.set_outcome(1, "y", 0, 0, 0.0)
    report = validate_game(b.build())
    assert len(report) == 1
    assert report[0].h == 0 and report[0].state == "s" and "sum" in report[0].message


def test_validate_reward_range():
    report = validate_game(matrix_game([[1.5]]))
    assert len(report) == 1 and "[0" in report[0].message
    with pytest.raises(GameValidationError):
        require_valid(matrix_game([[1.5]]))


def test_tag_consistency():
    b = GameBuilder(1, "s")
    b.add_state(0, "s", 2, 2, MAX)
    for i in range(2):
        for j in range(2):
            b.set_outcome(0, "s", i, j, 0.5)
    assert any("player" in v.message or "max" in v.message for v in validate_game(b.build()))


def test_sample_step_deterministic_and_terminal():
    g = build_random_tree(TreeGameSpec(2, 2, 1))
    rng = stream(0, "sampling")
    r, nxt = sample_step(g, 0, 0, 1, 0, rng)
    assert nxt == g.state_index(1, "s.1") and r == 0.0
    for _ in range(5):
        assert sample_step(g, 0, 0, 1, 0, rng)[1] == nxt
    assert sample_step(g, 1, 0, 0, 1, rng)[1] is None


def test_sample_step_frequencies():
    g = coin_game()
    rng = stream(7, "sampling")
    hits = sum(sample_step(g, 0, 0, 0, 0, rng)[1] == g.state_index(1, "x") for _ in range(100_000))
    assert abs(hits / 100_000 - 0.5) < 0.01


def test_sample_step_index_errors():
    g = build_zero_sum_pd(1.0)
    rng = stream(0, "sampling")
    with pytest.raises(IndexError, match="max action"):
        sample_step(g, 0, 0, 2, 0, rng)
    with pytest.raises(IndexError, match="step"):
        sample_step(g, 1, 0, 0, 0, rng)


@pytest.mark.parametrize("x", [-1.0, -0.3, 0.0, 0.6, 1.0])
def test_pd_equilibrium(x):
    values, pair = minimax_values(build_zero_sum_pd(x))
    assert values[0][0] == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(pair.explore_max[0, 0], [0, 1])
    np.testing.assert_allclose(pair.explore_min[0, 0], [0, 1])


def test_matching_pennies_game():
    values, pair = minimax_values(matrix_game([[1, 0], [0, 1]]))
    assert values[0][0] == pytest.approx(0.5)
    np.testing.assert_allclose(pair.explore_max[0, 0], [0.5, 0.5])


@pytest.mark.parametrize("seed", range(5))
def test_tree_values_by_enumeration(seed):
    g = build_random_tree(TreeGameSpec(3, 2, seed))
    leaves = stream(seed, "environment").random(8)
    values, _ = minimax_values(g)
    assert values[0][0] == pytest.approx(tree_value(leaves, 3, 2), abs=1e-12)


def test_tree_max_min_by_pure_policy_enumeration():
    g = build_random_tree(TreeGameSpec(2, 2, 4))
    best = max(min(forward_value(g, mu, nu) for nu in pure_policies(g, MIN)) for mu in pure_policies(g, MAX))
    assert minimax_values(g)[0][0][0] == pytest.approx(best, abs=1e-12)


def test_best_response_examples():
    g = build_zero_sum_pd(1.0)
    always_c = pure_policy(g, MAX, C)
    v, resp = best_response_value(g, always_c, MAX)
    assert v == pytest.approx(0.25)
    np.testing.assert_array_equal(resp[0, 0], [0, 1])
    v, _ = best_response_value(g, pure_policy(g, MIN, D), MIN)
    assert v == pytest.approx(0.5)
    assert nash_conv(g, always_c, pure_policy(g, MIN, D)) == pytest.approx(0.25)


def test_best_response_against_equilibrium():
    g = build_random_stochastic(seed=3)
    values, pair = minimax_values(g)
    v1 = values[0][g.initial_index]
    assert best_response_value(g, pair.eval_max, MAX)[0] == pytest.approx(v1, abs=1e-9)
    assert best_response_value(g, pair.eval_min, MIN)[0] == pytest.approx(v1, abs=1e-9)
    assert abs(nash_conv(g, pair.eval_max, pair.eval_min)) < 1e-9


def test_missing_reachable_state_named():
    g = build_random_tree(TreeGameSpec(2, 2, 0))
    with pytest.raises(MissingPolicyError, match="s.1"):
        best_response_value(g, {(0, "s"): [1, 0], (1, "s.0"): [1]}, MAX)
    mu = policy_from_mapping(g, MAX, {(0, "s"): [1, 0], (1, "s.0"): [1], (1, "s.1"): [1]})
    assert mu.is_valid()


def random_policy(game, side, rng):
    pol = uniform_policy(game, side)
    for p in pol.probs:
        p[:] = rng.random(p.size) + 1e-3
    for h, ptr in enumerate(pol.ptrs):
        for s in range(len(ptr) - 1):
            pol[h, s] = pol[h, s] / pol[h, s].sum()
    return pol


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_policy_value_and_response_properties(seed):
    g = build_random_stochastic(seed=seed)
    rng = np.random.default_rng(seed)
    mu, nu = random_policy(g, MAX, rng), random_policy(g, MIN, rng)
    s1 = g.initial_index
    v = policy_values(g, mu, nu)[0][s1]
    assert v == pytest.approx(forward_value(g, mu, nu), abs=1e-9)
    assert best_response_value(g, nu, MIN)[0] >= v - 1e-9
    assert best_response_value(g, mu, MAX)[0] <= v + 1e-9
    nc = nash_conv(g, mu, nu)
    assert -1e-9 <= nc <= g.horizon


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(2, 3), st.integers(0, 10_000))
def test_turn_based_reduction_matches_lp(depth, branching, seed):
    g = build_random_tree(TreeGameSpec(depth, branching, seed))
    auto, _ = minimax_values(g)
    lp, _ = minimax_values(g, method="lp")
    for a, b in zip(auto, lp):
        np.testing.assert_allclose(a, b, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_minimax_fixed_point(seed):
    """Truncating the game at step h with stage values as terminal payoffs keeps values."""
    g = build_random_stochastic(seed=seed)
    values, _ = minimax_values(g)
    for h in range(g.horizon - 1):
        q = g.rewards[h] + g.transitions[h] @ values[h + 1]
        lay = g.layouts[h]
        from strategic_rl.matrix import solve_zero_sum
        for s in range(lay.n_states):
            block = q[lay.entries_of(s)].reshape(lay.n_max[s], lay.n_min[s])
            assert solve_zero_sum(block).row_value == pytest.approx(values[h][s], abs=1e-9)


def test_round_trip_serialization():
    for g in (build_random_tree(TreeGameSpec(3, 3, 5)), build_random_stochastic(seed=2), coin_game()):
        text = dumps(g)
        assert dumps(loads(text)) == text
        assert validate_game(loads(text)) == []


def test_malformed_game_text():
    with pytest.raises(GameFormatError):
        loads("not a game")


def test_builder_rejects_successor_at_horizon():
    b = GameBuilder(1, "s")
    b.add_state(0, "s", 1, 1, BOTH)
    with pytest.raises(ValueError):
        b.set_outcome(0, "s", 0, 0, 0.5, "s")


def test_transition_tuple():
    tr = Transition(0, 1, 0, 1, 0.5, None)
    assert tr.s_next is None and tr.r == 0.5
