"""Per-state policy selection from upper and lower Q matrices.

Both ULCB and Nash-Q choose, at each state, an exploration pair (mu, nu), an
evaluation pair (mu~, nu~) and the new value bounds from the state's Q-bar and
Q-underbar matrices. ``decide_state`` does one state; ``decide_step`` does a
whole step, handling one-player states in vectorised groups.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..game import StepLayout
from ..game.oracles import first_best_rows
from ..matrix import first_best, solve_general_sum, solve_zero_sum

STRATEGIC, OPTIMISTIC = "strategic", "optimistic"
VARIANTS = (STRATEGIC, OPTIMISTIC)


class StateDecision(NamedTuple):
    mu: np.ndarray
    nu: np.ndarray
    mu_eval: np.ndarray
    nu_eval: np.ndarray
    upper: float
    lower: float


def _onehot(n: int, k: int) -> np.ndarray:
    x = np.zeros(n)
    x[k] = 1.0
    return x


def check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant


def decide_state(upper_q: np.ndarray, lower_q: np.ndarray, variant: str,
                 pessimistic_eval: bool) -> StateDecision:
    """Decision at one state from ``(n_max, n_min)`` matrices."""
    m, n = upper_q.shape
    one = np.ones(1)
    if n == 1:
        # max player decides alone
        a_up = first_best(upper_q[:, 0], True)
        a_low = first_best(lower_q[:, 0], True)
        mu = _onehot(m, a_up)
        if variant == STRATEGIC:
            return StateDecision(mu, one, _onehot(m, a_low), one,
                                 float(upper_q[a_up, 0]), float(lower_q[a_low, 0]))
        mu_eval = _onehot(m, a_low) if pessimistic_eval else mu
        return StateDecision(mu, one, mu_eval, one, float(upper_q[a_up, 0]), float(lower_q[a_up, 0]))
    if m == 1:
        b_up = first_best(upper_q[0], False)
        b_low = first_best(lower_q[0], False)
        nu = _onehot(n, b_low)
        if variant == STRATEGIC:
            return StateDecision(one, nu, one, _onehot(n, b_up),
                                 float(upper_q[0, b_up]), float(lower_q[0, b_low]))
        nu_eval = _onehot(n, b_up) if pessimistic_eval else nu
        return StateDecision(one, nu, one, nu_eval, float(upper_q[0, b_low]), float(lower_q[0, b_low]))
    if variant == STRATEGIC:
        up, low = solve_zero_sum(upper_q), solve_zero_sum(lower_q)
        mu, nu_eval = up.row_strategy, up.col_strategy
        mu_eval, nu = low.row_strategy, low.col_strategy
        return StateDecision(mu, nu, mu_eval, nu_eval,
                             float(mu @ upper_q @ nu_eval), float(mu_eval @ lower_q @ nu))
    joint = solve_general_sum(upper_q, -lower_q)
    mu, nu = joint.row_strategy, joint.col_strategy
    if pessimistic_eval:
        mu_eval, nu_eval = pessimistic_state(upper_q, lower_q)
    else:
        mu_eval, nu_eval = mu, nu
    return StateDecision(mu, nu, mu_eval, nu_eval, float(mu @ upper_q @ nu), float(mu @ lower_q @ nu))


def pessimistic_state(upper_q: np.ndarray, lower_q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``mu~`` from the zero-sum game on Q-underbar, ``nu~`` from the one on Q-bar."""
    m, n = upper_q.shape
    if n == 1:
        return _onehot(m, first_best(lower_q[:, 0], True)), np.ones(1)
    if m == 1:
        return np.ones(1), _onehot(n, first_best(upper_q[0], False))
    return solve_zero_sum(lower_q).row_strategy, solve_zero_sum(upper_q).col_strategy


def decide_step(layout: StepLayout, upper_q: np.ndarray, lower_q: np.ndarray, variant: str,
                pessimistic_eval: bool, out: tuple[np.ndarray, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Decisions for every state of one step.

    ``out`` holds zeroed flat probability arrays ``(mu, nu, mu_eval, nu_eval)``
    for this step and is filled in place. Returns ``(V-bar, V-underbar)``.
    """
    mu, nu, mu_eval, nu_eval = out
    upper_v = np.zeros(layout.n_states)
    lower_v = np.zeros(layout.n_states)
    strategic = variant == STRATEGIC
    max_groups, min_groups, simultaneous = layout.decision_groups
    for states, entries in max_groups:
        QU, QL = upper_q[entries], lower_q[entries]
        rows = np.arange(len(states))
        k_up = first_best_rows(QU, maximize=True)
        k_low = first_best_rows(QL, maximize=True)
        base, nb = layout.max_ptr[states], layout.min_ptr[states]
        mu[base + k_up] = 1.0
        nu[nb] = 1.0
        nu_eval[nb] = 1.0
        upper_v[states] = QU[rows, k_up]
        if strategic:
            mu_eval[base + k_low] = 1.0
            lower_v[states] = QL[rows, k_low]
        else:
            mu_eval[base + (k_low if pessimistic_eval else k_up)] = 1.0
            lower_v[states] = QL[rows, k_up]
    for states, entries in min_groups:
        QU, QL = upper_q[entries], lower_q[entries]
        rows = np.arange(len(states))
        k_up = first_best_rows(QU, maximize=False)
        k_low = first_best_rows(QL, maximize=False)
        base, na = layout.min_ptr[states], layout.max_ptr[states]
        nu[base + k_low] = 1.0
        mu[na] = 1.0
        mu_eval[na] = 1.0
        lower_v[states] = QL[rows, k_low]
        if strategic:
            nu_eval[base + k_up] = 1.0
            upper_v[states] = QU[rows, k_up]
        else:
            nu_eval[base + (k_up if pessimistic_eval else k_low)] = 1.0
            upper_v[states] = QU[rows, k_low]
    for s in simultaneous:
        shape = (int(layout.n_max[s]), int(layout.n_min[s]))
        span = layout.entries_of(s)
        d = decide_state(upper_q[span].reshape(shape), lower_q[span].reshape(shape),
                         variant, pessimistic_eval)
        a_span = slice(int(layout.max_ptr[s]), int(layout.max_ptr[s + 1]))
        b_span = slice(int(layout.min_ptr[s]), int(layout.min_ptr[s + 1]))
        mu[a_span], nu[b_span] = d.mu, d.nu
        mu_eval[a_span], nu_eval[b_span] = d.mu_eval, d.nu_eval
        upper_v[s], lower_v[s] = d.upper, d.lower
    return upper_v, lower_v
