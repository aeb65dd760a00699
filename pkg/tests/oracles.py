"""Brute-force reference computations used only by the tests.

They deliberately avoid the package's solvers: matrix games by exhaustive
support enumeration, games by forward recursion and pure-policy enumeration.
"""

from __future__ import annotations

import itertools

import numpy as np

TOL = 1e-9


def zero_sum_value_by_supports(A: np.ndarray) -> float:
    """Value of the zero-sum game ``A`` by trying every pair of equal-size supports."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    for k in range(1, min(m, n) + 1):
        for I in itertools.combinations(range(m), k):
            for J in itertools.combinations(range(n), k):
                sub = A[np.ix_(I, J)]
                # unknowns: y (k), v ; sub @ y = v, sum y = 1  and  x: x @ sub = v, sum x = 1
                M = np.zeros((k + 1, k + 1))
                M[:k, :k] = sub
                M[:k, k] = -1
                M[k, :k] = 1
                rhs = np.zeros(k + 1)
                rhs[k] = 1
                Mx = np.zeros((k + 1, k + 1))
                Mx[:k, :k] = sub.T
                Mx[:k, k] = -1
                Mx[k, :k] = 1
                try:
                    sol_y = np.linalg.solve(M, rhs)
                    sol_x = np.linalg.solve(Mx, rhs)
                except np.linalg.LinAlgError:
                    continue
                y, v = sol_y[:k], sol_y[k]
                x = sol_x[:k]
                if np.any(y < -TOL) or np.any(x < -TOL):
                    continue
                X = np.zeros(m)
                Y = np.zeros(n)
                X[list(I)] = x
                Y[list(J)] = y
                if (A @ Y).max() <= v + 1e-7 and (X @ A).min() >= v - 1e-7:
                    return float(v)
    raise AssertionError("no equilibrium found")


def tree_value(leaves: np.ndarray, depth: int, branching: int) -> float:
    """Alternating max/min over the leaves, max at the root."""
    vals = np.asarray(leaves, dtype=float)
    for level in reversed(range(depth)):
        vals = vals.reshape(-1, branching)
        vals = vals.max(axis=1) if level % 2 == 0 else vals.min(axis=1)
    return float(vals[0])


def forward_value(game, mu, nu, h=0, s=None) -> float:
    """``V^{mu,nu}`` by forward recursion over joint actions and successors."""
    s = game.initial_index if s is None else s
    lay = game.layouts[h]
    total = 0.0
    for a in range(int(lay.n_max[s])):
        for b in range(int(lay.n_min[s])):
            w = mu[h, s][a] * nu[h, s][b]
            if w == 0:
                continue
            q = game.reward(h, s, a, b)
            if h < game.horizon - 1:
                q += sum(p * forward_value(game, mu, nu, h + 1, s2)
                         for s2, p in game.successors(h, s, a, b).items())
            total += w * q
    return total


def pure_policies(game, side):
    """Every deterministic policy of ``side`` (tiny games only)."""
    from strategic_rl.game import pure_policy

    counts = [lay.n_max if side == "max" else lay.n_min for lay in game.layouts]
    keys = [(h, s) for h, c in enumerate(counts) for s in range(len(c))]
    for choice in itertools.product(*(range(int(counts[h][s])) for h, s in keys)):
        table = dict(zip(keys, choice))
        yield pure_policy(game, side, lambda h, s: table[(h, s)])
