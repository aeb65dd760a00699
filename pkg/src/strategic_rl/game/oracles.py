"""Exact backward-induction oracles: minimax values, best responses, NashConv."""

from __future__ import annotations

import numpy as np

from ..matrix import TOL, solve_zero_sum
from .model import MAX, MIN, MarkovGame, StepLayout, require_valid
from .policy import Policy, PolicyPair, as_policy, zeros_policy

ValueTable = list[np.ndarray]


def entry_values(game: MarkovGame, h: int, v_next: np.ndarray | None) -> np.ndarray:
    """``R_h + P_h V_{h+1}`` for every joint-action entry of step ``h``."""
    q = game.rewards[h]
    if h < game.horizon - 1:
        q = q + game.transitions[h] @ v_next
    return q


def first_best_rows(M: np.ndarray, maximize: bool) -> np.ndarray:
    """Row-wise index of the first entry within ``TOL`` of the row optimum."""
    if maximize:
        return np.argmax(M >= M.max(axis=1, keepdims=True) - TOL, axis=1)
    return np.argmax(M <= M.min(axis=1, keepdims=True) + TOL, axis=1)


def respond(layout: StepLayout, slot_values: np.ndarray, side: str) -> tuple[np.ndarray, np.ndarray]:
    """Per-state optimum over the responder's slots and the chosen slots."""
    values = np.zeros(layout.n_states)
    chosen = np.zeros(layout.n_states, dtype=np.int64)
    for states, slots in layout.slot_groups[side]:
        M = slot_values[slots]
        k = first_best_rows(M, maximize=(side == MAX))
        values[states] = M[np.arange(len(states)), k]
        chosen[states] = slots[np.arange(len(states)), k]
    return values, chosen


def minimax_values(game: MarkovGame, method: str = "auto") -> tuple[ValueTable, PolicyPair]:
    """Minimax value of every subgame and an equilibrium policy pair.

    ``method='auto'`` solves states where only one player moves by direct
    argmax/argmin and simultaneous states by linear programming;
    ``method='lp'`` sends every state through the LP.
    """
    require_valid(game)
    return _minimax(game, method)


def _minimax(game: MarkovGame, method: str = "auto") -> tuple[ValueTable, PolicyPair]:
    if method not in ("auto", "lp"):
        raise ValueError(f"unknown method {method!r}")
    H = game.horizon
    mu, nu = zeros_policy(game, MAX), zeros_policy(game, MIN)
    values: ValueTable = [None] * H
    v_next = None
    for h in reversed(range(H)):
        layout = game.layouts[h]
        q = entry_values(game, h, v_next)
        v = np.zeros(layout.n_states)
        if method == "auto":
            max_groups, min_groups, simultaneous = layout.decision_groups
            for states, entries in max_groups:
                k = first_best_rows(q[entries], maximize=True)
                v[states] = q[entries][np.arange(len(states)), k]
                mu.probs[h][layout.max_ptr[states] + k] = 1.0
                nu.probs[h][layout.min_ptr[states]] = 1.0
            for states, entries in min_groups:
                k = first_best_rows(q[entries], maximize=False)
                v[states] = q[entries][np.arange(len(states)), k]
                nu.probs[h][layout.min_ptr[states] + k] = 1.0
                mu.probs[h][layout.max_ptr[states]] = 1.0
        else:
            simultaneous = range(layout.n_states)
        for s in simultaneous:
            sol = solve_zero_sum(q[layout.entries_of(s)].reshape(layout.n_max[s], layout.n_min[s]))
            v[s] = sol.row_value
            mu[h, s] = sol.row_strategy
            nu[h, s] = sol.col_strategy
        values[h] = v
        v_next = v
    return values, PolicyPair(mu, nu, mu, nu)


def policy_values(game: MarkovGame, mu: Policy, nu: Policy) -> ValueTable:
    """Direct evaluation of ``V^{mu,nu}`` at every state."""
    values: ValueTable = [None] * game.horizon
    v_next = None
    for h in reversed(range(game.horizon)):
        layout = game.layouts[h]
        q = entry_values(game, h, v_next)
        w = mu.probs[h][layout.entry_max_slot] * nu.probs[h][layout.entry_min_slot]
        values[h] = np.bincount(layout.entry_state, weights=w * q, minlength=layout.n_states)
        v_next = values[h]
    return values


def best_response_values(game: MarkovGame, fixed: Policy, fixed_side: str) -> tuple[ValueTable, Policy]:
    """Values of the optimal pure response to ``fixed`` at every state."""
    responder = MIN if fixed_side == MAX else MAX
    response = zeros_policy(game, responder)
    values: ValueTable = [None] * game.horizon
    v_next = None
    for h in reversed(range(game.horizon)):
        layout = game.layouts[h]
        q = entry_values(game, h, v_next)
        if fixed_side == MAX:
            w = fixed.probs[h][layout.entry_max_slot]
            slot_values = np.bincount(layout.entry_min_slot, weights=w * q, minlength=layout.n_min_slots)
        else:
            w = fixed.probs[h][layout.entry_min_slot]
            slot_values = np.bincount(layout.entry_max_slot, weights=w * q, minlength=layout.n_max_slots)
        v, chosen = respond(layout, slot_values, responder)
        response.probs[h][chosen] = 1.0
        values[h] = v
        v_next = v
    return values, response


def best_response_value(game: MarkovGame, fixed_policy, fixed_side: str) -> tuple[float, Policy]:
    """Value at ``s1`` of the best response to ``fixed_policy`` and that response.

    The responder is the other player: a max responder maximises, a min
    responder minimises the max player's return.
    """
    if fixed_side not in (MAX, MIN):
        raise ValueError(f"fixed_side must be 'max' or 'min', got {fixed_side!r}")
    fixed = as_policy(game, fixed_side, fixed_policy)
    values, response = best_response_values(game, fixed, fixed_side)
    return float(values[0][game.initial_index]), response


def nash_conv(game: MarkovGame, mu, nu) -> float:
    """``sup_mu' V^{mu',nu}(s1) - inf_nu' V^{mu,nu'}(s1)``."""
    sup_max, _ = best_response_value(game, nu, MIN)
    inf_min, _ = best_response_value(game, mu, MAX)
    return sup_max - inf_min


def exploitability(game: MarkovGame, policy, side: str) -> float:
    if side == MAX:
        return -best_response_value(game, policy, MAX)[0]
    return best_response_value(game, policy, MIN)[0]
