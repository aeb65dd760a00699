"""Independent Q-learning: each player learns over its own actions only."""

from __future__ import annotations

import numpy as np

from ..game import MAX, MIN, MarkovGame, Policy, PolicyPair, Transition
from ..matrix import first_best
from .bonus import learning_rate_alpha


class QLearner:
    """Single-agent learner for one side, treating the opponent as environment.

    The max player's reward is ``r`` and the min player's is ``1 - r``, so both
    maximise a return in ``[0, H]``. ``optimistic`` starts at ``H`` and drives
    epsilon-greedy exploration; ``pessimistic`` starts at 0 and gives the
    greedy evaluation policy.
    """

    def __init__(self, game: MarkovGame, side: str, epsilon: float = 0.05):
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        self.side = side
        self.epsilon = epsilon
        self.horizon = game.horizon
        self.ptrs = [lay.max_ptr if side == MAX else lay.min_ptr for lay in game.layouts]
        sizes = [int(p[-1]) for p in self.ptrs]
        self.optimistic = [np.full(n, float(game.horizon)) for n in sizes]
        self.pessimistic = [np.zeros(n) for n in sizes]
        self.counts = [np.zeros(n, dtype=np.int64) for n in sizes]
        self.explore = Policy(side, [np.zeros(n) for n in sizes], self.ptrs)
        self.evaluate = Policy(side, [np.zeros(n) for n in sizes], self.ptrs)
        for h, ptr in enumerate(self.ptrs):
            for s in range(len(ptr) - 1):
                self._refresh(h, s)

    def own_reward(self, r: float) -> float:
        return r if self.side == MAX else 1.0 - r

    def own_action(self, tr: Transition) -> int:
        return tr.a if self.side == MAX else tr.b

    def _span(self, h: int, s: int) -> slice:
        return slice(int(self.ptrs[h][s]), int(self.ptrs[h][s + 1]))

    def _refresh(self, h: int, s: int) -> None:
        span = self._span(h, s)
        q_opt, q_pess = self.optimistic[h][span], self.pessimistic[h][span]
        n = q_opt.size
        explore = np.full(n, self.epsilon / n)
        explore[first_best(q_opt, True)] += 1.0 - self.epsilon
        greedy = np.zeros(n)
        greedy[first_best(q_pess, True)] = 1.0
        self.explore[h, s] = explore
        self.evaluate[h, s] = greedy

    def _next_max(self, table: list[np.ndarray], h: int, s_next: int | None) -> float:
        if s_next is None:
            return 0.0
        return float(table[h + 1][self._span(h + 1, s_next)].max())

    def update(self, tr: Transition) -> None:
        if not 0.0 <= tr.r <= 1.0:
            raise ValueError(f"reward {tr.r!r} at step {tr.h + 1} outside [0, 1]")
        h = tr.h
        k = int(self.ptrs[h][tr.s]) + self.own_action(tr)
        self.counts[h][k] += 1
        alpha = learning_rate_alpha(int(self.counts[h][k]), self.horizon)
        r = self.own_reward(tr.r)
        for table in (self.optimistic, self.pessimistic):
            target = r + self._next_max(table, h, tr.s_next)
            table[h][k] = (1 - alpha) * table[h][k] + alpha * target
        self._refresh(h, tr.s)


def iql_step(max_learner: QLearner, min_learner: QLearner, transition: Transition) -> None:
    max_learner.update(transition)
    min_learner.update(transition)


class IndependentQ:
    def __init__(self, game: MarkovGame, epsilon: float = 0.05):
        self.max_learner = QLearner(game, MAX, epsilon)
        self.min_learner = QLearner(game, MIN, epsilon)
        self._snapshot: PolicyPair | None = None

    def policies(self) -> PolicyPair:
        if self._snapshot is None:
            self._snapshot = PolicyPair(self.max_learner.explore.copy(), self.min_learner.explore.copy(),
                                        self.max_learner.evaluate.copy(), self.min_learner.evaluate.copy())
        return self._snapshot

    def observe(self, transition: Transition) -> None:
        iql_step(self.max_learner, self.min_learner, transition)
        self._snapshot = None
