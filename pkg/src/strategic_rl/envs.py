"""Benchmark game families: deep sea, decoy task games, random trees and the
zero-sum prisoner's dilemma, plus small random stochastic games for tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import BOTH, MAX, MIN, GameBuilder, MarkovGame
from .rng import stream

WIN, TIE, LOSS = 1.0, 0.5, 0.0
LEFT, RIGHT = 0, 1
TERMINATE, ALLOW = 0, 1


@dataclass(frozen=True)
class DecoyGameSpec:
    """Decoy task game parameters.

    ``target_index`` is the 0-based root action leading to the target task;
    when omitted it is drawn from ``seed``.
    """

    decoy_count: int
    subtask_size: int
    target_index: int | None = None
    seed: int = 0

    def resolved_target(self) -> int:
        if self.target_index is not None:
            return self.target_index
        return int(stream(self.seed, "environment").integers(self.decoy_count + 1))


@dataclass(frozen=True)
class TreeGameSpec:
    depth: int
    branching: int
    seed: int = 0


def _add_deep_sea(builder: GameBuilder, n: int, first_step: int, prefix: str,
                  success: float, failure: float) -> str:
    """Lay an ``n x n`` deep sea over steps ``first_step .. first_step + n - 2``.

    Returns the name of the start state.
    """
    last_row = n - 2
    for row in range(n - 1):
        h = first_step + row
        for col in range(n):
            builder.add_state(h, f"{prefix}r{row}c{col}", 2, 1, MAX)
    for row in range(n - 1):
        h = first_step + row
        for col in range(n):
            name = f"{prefix}r{row}c{col}"
            for move, nxt in ((LEFT, max(col - 1, 0)), (RIGHT, min(col + 1, n - 1))):
                if row == last_row:
                    reached = move == RIGHT and nxt == n - 1
                    builder.set_outcome(h, name, move, 0, success if reached else failure)
                else:
                    builder.set_outcome(h, name, move, 0, 0.0, f"{prefix}r{row + 1}c{nxt}")
    return f"{prefix}r0c0"


def build_deep_sea(n: int) -> MarkovGame:
    """Single-player ``n x n`` deep sea; reward 1 only for moving right ``n-1`` times."""
    if n < 2:
        raise ValueError(f"deep sea needs n >= 2, got {n}")
    builder = GameBuilder(n - 1, "r0c0")
    _add_deep_sea(builder, n, 0, "", WIN, 0.0)
    return builder.build({"environment": "deep_sea", "n": n})


def build_decoy_game(spec: DecoyGameSpec) -> MarkovGame:
    """Root choice among ``decoy_count + 1`` deep-sea sub-tasks.

    Each decoy entry lets the min player terminate (tie, 1/2) or allow the
    attempt; completing a decoy is a max-player loss (0) and failing it a tie.
    The target entry has no veto; completing it is a win (1), failing a tie.
    """
    D, n = spec.decoy_count, spec.subtask_size
    if D < 0:
        raise ValueError(f"decoy_count must be >= 0, got {D}")
    if n < 2:
        raise ValueError(f"subtask_size must be >= 2, got {n}")
    target = spec.resolved_target()
    if not 0 <= target <= D:
        raise ValueError(f"target_index {target} outside [0, {D}]")
    H = n + 1
    builder = GameBuilder(H, "root")
    builder.add_state(0, "root", D + 1, 1, MAX)
    for h in range(2, H):
        builder.add_state(h, "done", 1, 1, BOTH)
    for i in range(D + 1):
        entry = f"entry{i}"
        if i == target:
            builder.add_state(1, entry, 1, 1, MAX)
        else:
            builder.add_state(1, entry, 1, 2, MIN)
        start = _add_deep_sea(builder, n, 2, f"t{i}", *((WIN, TIE) if i == target else (LOSS, TIE)))
        builder.set_outcome(0, "root", i, 0, 0.0, entry)
        if i == target:
            builder.set_outcome(1, entry, 0, 0, 0.0, start)
        else:
            builder.set_outcome(1, entry, 0, TERMINATE, TIE, "done" if H > 2 else None)
            builder.set_outcome(1, entry, 0, ALLOW, 0.0, start)
    for h in range(2, H):
        builder.set_outcome(h, "done", 0, 0, 0.0, "done" if h < H - 1 else None)
    return builder.build({
        "environment": "decoy",
        "decoy_count": D,
        "subtask_size": n,
        "target_index": target,
        "target_state": [1, f"entry{target}"],
    })


def build_random_tree(spec: TreeGameSpec) -> MarkovGame:
    """Alternating-move tree, max moving first; i.i.d. uniform leaf payoffs."""
    d, m = spec.depth, spec.branching
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    if m < 2:
        raise ValueError(f"branching must be >= 2, got {m}")
    leaves = stream(spec.seed, "environment").random(m ** d)
    builder = GameBuilder(d, "s")
    layers = [["s"]]
    for h in range(1, d):
        layers.append([f"{parent}.{k}" for parent in layers[-1] for k in range(m)])
    for h, names in enumerate(layers):
        max_turn = h % 2 == 0
        for name in names:
            builder.add_state(h, name, m if max_turn else 1, 1 if max_turn else m, MAX if max_turn else MIN)
    leaf = 0
    for h, names in enumerate(layers):
        max_turn = h % 2 == 0
        for name in names:
            for k in range(m):
                a, b = (k, 0) if max_turn else (0, k)
                if h == d - 1:
                    builder.set_outcome(h, name, a, b, float(leaves[leaf]))
                    leaf += 1
                else:
                    builder.set_outcome(h, name, a, b, 0.0, f"{name}.{k}")
    return builder.build({"environment": "tree", "depth": d, "branching": m, "seed": spec.seed})


def build_zero_sum_pd(x: float) -> MarkovGame:
    """Zero-sum prisoner's dilemma, payoffs mapped from [-1, 1] to [0, 1].

    Action 0 is cooperate and action 1 is defect for both players.
    """
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [-1, 1], got {x}")
    raw = [[x, -0.5], [0.5, 0.0]]
    builder = GameBuilder(1, "pd")
    builder.add_state(0, "pd", 2, 2, BOTH)
    for a in range(2):
        for b in range(2):
            builder.set_outcome(0, "pd", a, b, (raw[a][b] + 1.0) / 2.0)
    return builder.build({"environment": "zspd", "x": x})


def build_random_stochastic(horizon: int = 3, max_states: int = 4, n_actions: int = 2,
                            seed: int = 0) -> MarkovGame:
    """Random simultaneous-move game with Dirichlet transitions."""
    rng = stream(seed, "environment")
    sizes = [1] + [int(rng.integers(1, max_states + 1)) for _ in range(horizon - 1)]
    builder = GameBuilder(horizon, "s0")
    for h, size in enumerate(sizes):
        for i in range(size):
            builder.add_state(h, f"s{i}", n_actions, n_actions, BOTH)
    for h, size in enumerate(sizes):
        for i in range(size):
            for a in range(n_actions):
                for b in range(n_actions):
                    r = float(rng.random())
                    succ = None
                    if h < horizon - 1:
                        p = rng.dirichlet(np.ones(sizes[h + 1]))
                        succ = {f"s{j}": float(q) for j, q in enumerate(p / p.sum())}
                    builder.set_outcome(h, f"s{i}", a, b, r, succ)
    return builder.build({"environment": "stochastic", "seed": seed})
