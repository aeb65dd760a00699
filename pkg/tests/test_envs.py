import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import tree_value
from strategic_rl.envs import (DecoyGameSpec, TreeGameSpec, build_decoy_game, build_deep_sea,
                               build_random_stochastic, build_random_tree, build_zero_sum_pd)
from strategic_rl.game import (MAX, MIN, best_response_value, dumps, minimax_values, pure_policy,
                               uniform_policy, validate_game)
from strategic_rl.rng import stream


def test_deep_sea_smallest():
    g = build_deep_sea(2)
    assert g.horizon == 1
    assert g.reward(0, g.initial_index, 1, 0) == 1.0
    assert g.reward(0, g.initial_index, 0, 0) == 0.0


@pytest.mark.parametrize("n", [3, 10, 20])
def test_deep_sea_value_and_unique_optimum(n):
    g = build_deep_sea(n)
    assert validate_game(g) == []
    values, _ = minimax_values(g)
    assert values[0][g.initial_index] == 1.0
    # only always-right attains 1 from the start state
    right = pure_policy(g, MAX, 1)
    v, _ = best_response_value(g, right, MAX)
    assert v == 1.0
    left_once = pure_policy(g, MAX, lambda h, s: 0 if h == 0 else 1)
    assert best_response_value(g, left_once, MAX)[0] == 0.0


def test_deep_sea_uniform_success_probability():
    g = build_deep_sea(10)
    v, _ = best_response_value(g, uniform_policy(g, MAX), MAX)
    assert v == pytest.approx(2.0 ** -9, abs=1e-15)


def test_deep_sea_rejects_small():
    with pytest.raises(ValueError):
        build_deep_sea(1)


def test_decoy_without_decoys():
    g = build_decoy_game(DecoyGameSpec(0, 5))
    assert minimax_values(g)[0][0][0] == 1.0


@pytest.mark.parametrize("D,n,seed", [(2, 3, 0), (3, 4, 1), (8, 10, 2)])
def test_decoy_values_and_vetoes(D, n, seed):
    g = build_decoy_game(DecoyGameSpec(D, n, seed=seed))
    assert validate_game(g) == []
    values, pair = minimax_values(g)
    assert values[0][g.initial_index] == 1.0
    target = g.metadata["target_index"]
    for i in range(D + 1):
        s = g.state_index(1, f"entry{i}")
        if i == target:
            assert values[1][s] == 1.0
        else:
            assert values[1][s] == 0.5
            np.testing.assert_array_equal(pair.explore_min[1, s], [1, 0])  # terminate


def test_decoy_target_index_from_seed():
    targets = {build_decoy_game(DecoyGameSpec(4, 3, seed=s)).metadata["target_index"] for s in range(30)}
    assert targets == set(range(5))
    assert build_decoy_game(DecoyGameSpec(4, 3, target_index=2, seed=9)).metadata["target_index"] == 2


def test_decoy_invalid_spec():
    with pytest.raises(ValueError):
        build_decoy_game(DecoyGameSpec(2, 3, target_index=5))
    with pytest.raises(ValueError):
        build_decoy_game(DecoyGameSpec(-1, 3))


def test_decoy_subtasks_disjoint():
    g = build_decoy_game(DecoyGameSpec(2, 4, seed=0))
    names = [set(n for n in lay.names if n.startswith("t")) for lay in g.layouts[2:]]
    for layer in names:
        prefixes = {n.split("r")[0] for n in layer}
        assert prefixes == {"t0", "t1", "t2"}


def test_tree_depth_one_is_max_of_draws():
    g = build_random_tree(TreeGameSpec(1, 4, 11))
    leaves = stream(11, "environment").random(4)
    assert minimax_values(g)[0][0][0] == leaves.max()


def test_tree_depth_two():
    g = build_random_tree(TreeGameSpec(2, 2, 8))
    leaves = stream(8, "environment").random(4).reshape(2, 2)
    assert minimax_values(g)[0][0][0] == leaves.min(axis=1).max()


def test_tree_paper_family_shape():
    g = build_random_tree(TreeGameSpec(5, 6, 0))
    assert [lay.n_states for lay in g.layouts] == [6 ** h for h in range(5)]
    leaves = stream(0, "environment").random(6 ** 5)
    assert minimax_values(g)[0][0][0] == pytest.approx(tree_value(leaves, 5, 6), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(2, 3), st.integers(0, 10_000))
def test_tree_builds_are_reproducible(depth, branching, seed):
    spec = TreeGameSpec(depth, branching, seed)
    a, b = build_random_tree(spec), build_random_tree(spec)
    assert dumps(a) == dumps(b)
    assert validate_game(a) == []


def test_pd_values():
    g = build_zero_sum_pd(1.0)
    np.testing.assert_array_equal(g.rewards[0], [1.0, 0.25, 0.75, 0.5])
    assert build_zero_sum_pd(0.0).reward(0, 0, 0, 0) == 0.5
    with pytest.raises(ValueError):
        build_zero_sum_pd(1.5)


@settings(max_examples=20, deadline=None)
@given(st.floats(-1, 1))
def test_pd_defection_for_any_x(x):
    _, pair = minimax_values(build_zero_sum_pd(x))
    np.testing.assert_allclose(pair.explore_max[0, 0], [0, 1])
    np.testing.assert_allclose(pair.explore_min[0, 0], [0, 1])


@pytest.mark.parametrize("seed", range(10))
def test_random_stochastic_valid(seed):
    g = build_random_stochastic(seed=seed)
    assert validate_game(g) == []
    assert g.horizon == 3 and g.max_layer_size <= 4


def test_random_stochastic_family_is_stochastic():
    assert sum(not build_random_stochastic(seed=s).is_deterministic for s in range(20)) >= 15


def test_best_response_side_check():
    g = build_zero_sum_pd(1.0)
    with pytest.raises(ValueError):
        best_response_value(g, uniform_policy(g, MIN), "row")
    with pytest.raises(ValueError):
        best_response_value(g, uniform_policy(g, MIN), MAX)
