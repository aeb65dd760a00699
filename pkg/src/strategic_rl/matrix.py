"""One-shot matrix games.

Zero-sum games are solved with a small primal simplex (Bland's rule), general-
sum games by support enumeration. The row player is always the max player and
``payoff`` is the row player's payoff.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

TOL = 1e-9
GENERAL_SUM_BUDGET = 8


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class StageGame:
    payoff_max: np.ndarray
    payoff_min: np.ndarray | None = None

    def solve(self) -> "StageSolution":
        if self.payoff_min is None:
            return solve_zero_sum(self.payoff_max)
        return solve_general_sum(self.payoff_max, self.payoff_min)


@dataclass(frozen=True)
class StageSolution:
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    row_value: float
    col_value: float


def first_best(values: np.ndarray, maximize: bool = True) -> int:
    """Index of the first entry within ``TOL`` of the optimum."""
    values = np.asarray(values, dtype=float)
    if maximize:
        return int(np.argmax(values >= values.max() - TOL))
    return int(np.argmax(values <= values.min() + TOL))


def _pure(n: int, k: int) -> np.ndarray:
    x = np.zeros(n)
    x[k] = 1.0
    return x


def _bland_simplex(A: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Maximise ``sum(w)`` subject to ``A w <= 1, w >= 0`` for strictly positive ``A``.

    Returns the primal solution, the dual solution (read off the slack
    columns of the objective row) and the optimum.
    """
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :n] = -1.0
    basis = np.arange(n, n + m)
    while True:
        improving = np.flatnonzero(T[m, :-1] < -TOL)
        if improving.size == 0:
            break
        j = improving[0]
        col = T[:m, j]
        rows = np.flatnonzero(col > TOL)
        ratios = T[rows, -1] / col[rows]
        tied = rows[ratios <= ratios.min() + TOL]
        i = tied[np.argmin(basis[tied])]
        T[i] /= T[i, j]
        pivot_col = T[:, j].copy()
        pivot_col[i] = 0.0
        T -= np.outer(pivot_col, T[i])
        basis[i] = j
    w = np.zeros(n)
    in_primal = basis < n
    w[basis[in_primal]] = T[:m, -1][in_primal]
    return w, T[m, n:n + m].copy(), float(T[m, -1])


def solve_zero_sum(payoff) -> StageSolution:
    """Minimax saddle point of the zero-sum game with row payoff ``payoff``."""
    A = np.atleast_2d(np.asarray(payoff, dtype=float))
    m, n = A.shape
    if m == 0 or n == 0 or not np.all(np.isfinite(A)):
        raise ValueError("payoff matrix must be non-empty and finite")
    shift = A.min() - 1.0
    w, u, _ = _bland_simplex(A - shift)
    col = w / w.sum()
    row = np.maximum(u, 0.0)
    row = row / row.sum()
    value = float(row @ A @ col)
    return StageSolution(row, col, value, -value)


def solve_turn_based(payoffs, optimizer: str) -> StageSolution:
    """Pure decision of a single active player over a payoff vector."""
    v = np.asarray(payoffs, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("turn-based payoff vector is empty")
    if optimizer == "max":
        k = first_best(v, maximize=True)
        return StageSolution(_pure(v.size, k), np.ones(1), float(v[k]), -float(v[k]))
    if optimizer == "min":
        k = first_best(v, maximize=False)
        return StageSolution(np.ones(1), _pure(v.size, k), float(v[k]), -float(v[k]))
    raise ValueError(f"optimizer must be 'max' or 'min', got {optimizer!r}")


def response_value(payoff, opponent, responder: str) -> tuple[int, float]:
    """Pure best response to a fixed opponent mix.

    The row responder maximises ``payoff``, the column responder minimises it.
    """
    A = np.atleast_2d(np.asarray(payoff, dtype=float))
    y = np.asarray(opponent, dtype=float)
    if responder == "row":
        if y.size != A.shape[1]:
            raise ValueError(f"opponent has {y.size} actions, matrix has {A.shape[1]} columns")
        values = A @ y
        k = first_best(values, maximize=True)
    elif responder == "col":
        if y.size != A.shape[0]:
            raise ValueError(f"opponent has {y.size} actions, matrix has {A.shape[0]} rows")
        values = y @ A
        k = first_best(values, maximize=False)
    else:
        raise ValueError(f"responder must be 'row' or 'col', got {responder!r}")
    return k, float(values[k])


def is_nash(A: np.ndarray, B: np.ndarray, x: np.ndarray, y: np.ndarray, tol: float = TOL) -> bool:
    """No unilateral deviation gains more than ``tol`` for either player."""
    return bool((A @ y).max() <= x @ A @ y + tol and (x @ B).max() <= x @ B @ y + tol)


def _indifferent_mix(M: np.ndarray) -> np.ndarray | None:
    """Mix over the columns of ``M`` that equalises every row, by direct solve.

    Returns None when the square system is singular.
    """
    k = M.shape[1]
    system = np.zeros((M.shape[0] + 1, k + 1))
    system[:-1, :k] = M
    system[:-1, k] = -1.0
    system[-1, :k] = 1.0
    rhs = np.zeros(M.shape[0] + 1)
    rhs[-1] = 1.0
    if system.shape[0] != system.shape[1]:
        return None
    try:
        sol = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return None
    if np.linalg.cond(system) > 1e12:
        return None
    return sol[:k]


def _feasible_mix(M_in: np.ndarray, M_out: np.ndarray) -> np.ndarray | None:
    """Find ``y >= 0, sum(y) = 1`` making rows of ``M_in`` equal to some ``v``
    and rows of ``M_out`` at most ``v``. Used for degenerate supports."""
    k = M_in.shape[1]
    # variables: y (k), v (1)
    A_eq = np.zeros((M_in.shape[0] + 1, k + 1))
    A_eq[:-1, :k] = M_in
    A_eq[:-1, k] = -1.0
    A_eq[-1, :k] = 1.0
    b_eq = np.zeros(M_in.shape[0] + 1)
    b_eq[-1] = 1.0
    A_ub = b_ub = None
    if M_out.shape[0]:
        A_ub = np.hstack([M_out, -np.ones((M_out.shape[0], 1))])
        b_ub = np.zeros(M_out.shape[0])
    bounds = [(0, None)] * k + [(None, None)]
    res = linprog(np.zeros(k + 1), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return np.maximum(res.x[:k], 0.0)


def _support_pairs(m: int, n: int):
    for total in range(2, m + n + 1):
        for k in range(max(1, total - n), min(m, total - 1) + 1):
            for rows in itertools.combinations(range(m), k):
                for cols in itertools.combinations(range(n), total - k):
                    yield rows, cols


def solve_general_sum(payoff_max, payoff_min) -> StageSolution:
    """One Nash equilibrium of the bimatrix game ``(payoff_max, payoff_min)``.

    Supports are tried smallest total size first, then by row-support size,
    then lexicographically; the first profile passing the deviation check is
    returned.
    """
    A = np.atleast_2d(np.asarray(payoff_max, dtype=float))
    B = np.atleast_2d(np.asarray(payoff_min, dtype=float))
    if A.shape != B.shape:
        raise ValueError(f"payoff shapes differ: {A.shape} vs {B.shape}")
    m, n = A.shape
    if m > GENERAL_SUM_BUDGET or n > GENERAL_SUM_BUDGET:
        raise CapacityError(
            f"{m}x{n} general-sum stage game exceeds the {GENERAL_SUM_BUDGET}x{GENERAL_SUM_BUDGET} "
            "support-enumeration budget; use the turn-based reduction for alternating-move states")
    for rows, cols in _support_pairs(m, n):
        I, J = list(rows), list(cols)
        if len(I) == 1 and len(J) == 1:
            x, y = _pure(m, I[0]), _pure(n, J[0])
        else:
            y_J = x_I = None
            if len(I) == len(J):
                y_J = _indifferent_mix(A[np.ix_(I, J)])
                x_I = _indifferent_mix(B[np.ix_(I, J)].T)
            if y_J is None or x_I is None:
                out_rows = [i for i in range(m) if i not in rows]
                out_cols = [j for j in range(n) if j not in cols]
                y_J = _feasible_mix(A[np.ix_(I, J)], A[np.ix_(out_rows, J)])
                if y_J is None:
                    continue
                x_I = _feasible_mix(B[np.ix_(I, J)].T, B[np.ix_(I, out_cols)].T)
                if x_I is None:
                    continue
            if np.any(y_J < -TOL) or np.any(x_I < -TOL):
                continue
            x, y = np.zeros(m), np.zeros(n)
            x[I] = np.maximum(x_I, 0.0)
            y[J] = np.maximum(y_J, 0.0)
            x /= x.sum()
            y /= y.sum()
        if is_nash(A, B, x, y):
            return StageSolution(x, y, float(x @ A @ y), float(x @ B @ y))
    raise RuntimeError("support enumeration found no equilibrium")  # unreachable for finite games
