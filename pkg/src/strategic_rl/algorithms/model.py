"""Per-learner statistics shared by the model-based and model-free learners."""

from __future__ import annotations

import numpy as np

from ..game import MarkovGame, Transition


class LearnerModel:
    """Visit counts, empirical model and upper/lower value tables.

    Successor counts are kept sparse as parallel lists of observed
    ``(entry, successor)`` pairs per step.
    """

    def __init__(self, game: MarkovGame):
        H = game.horizon
        self.horizon = H
        self.layouts = game.layouts
        self.sizes = (game.max_layer_size, *game.max_actions)
        self.counts = [np.zeros(lay.n_entries, dtype=np.int64) for lay in game.layouts]
        self.reward_hat = [np.zeros(lay.n_entries) for lay in game.layouts]
        self.upper_q = [np.full(lay.n_entries, float(H)) for lay in game.layouts]
        self.lower_q = [np.zeros(lay.n_entries) for lay in game.layouts]
        self.upper_v = [np.full(lay.n_states, float(H)) for lay in game.layouts]
        self.lower_v = [np.zeros(lay.n_states) for lay in game.layouts]
        self._pairs: list[dict[tuple[int, int], int]] = [{} for _ in range(H)]
        self._pair_entry: list[list[int]] = [[] for _ in range(H)]
        self._pair_succ: list[list[int]] = [[] for _ in range(H)]
        self._pair_count: list[list[int]] = [[] for _ in range(H)]
        self._distinct = [np.zeros(lay.n_entries, dtype=np.int64) for lay in game.layouts]

    def record(self, tr: Transition) -> bool:
        """Count one observation; returns True if ``R_hat`` or ``P_hat`` changed."""
        h = tr.h
        if not 0.0 <= tr.r <= 1.0:
            raise ValueError(f"reward {tr.r!r} at step {h + 1} outside [0, 1]")
        e = self.layouts[h].entry(tr.s, tr.a, tr.b)
        first = self.counts[h][e] == 0
        changed = first or self.reward_hat[h][e] != tr.r
        self.counts[h][e] += 1
        self.reward_hat[h][e] = tr.r
        if tr.s_next is not None:
            key = (e, tr.s_next)
            idx = self._pairs[h].get(key)
            if idx is None:
                self._pairs[h][key] = len(self._pair_entry[h])
                self._pair_entry[h].append(e)
                self._pair_succ[h].append(tr.s_next)
                self._pair_count[h].append(1)
                self._distinct[h][e] += 1
            else:
                self._pair_count[h][idx] += 1
            changed = changed or self._distinct[h][e] > 1
        return bool(changed)

    def successor_counts(self, h: int, e: int) -> dict[int, int]:
        return {s: self._pair_count[h][i] for (entry, s), i in self._pairs[h].items() if entry == e}

    def empirical_transition(self, h: int, e: int) -> np.ndarray:
        p = np.zeros(self.layouts[h + 1].n_states)
        n = self.counts[h][e]
        for s, c in self.successor_counts(h, e).items():
            p[s] = c / n
        return p

    def expected_next(self, h: int, v_next: np.ndarray) -> np.ndarray:
        """``P_hat_h V`` for every entry (zero for unvisited entries)."""
        E = self.layouts[h].n_entries
        if not self._pair_entry[h]:
            return np.zeros(E)
        rows = np.asarray(self._pair_entry[h])
        cols = np.asarray(self._pair_succ[h])
        cnt = np.asarray(self._pair_count[h], dtype=float)
        # ratio first so single-successor entries give exactly V(s')
        prob = cnt / self.counts[h][rows]
        return np.bincount(rows, weights=prob * v_next[cols], minlength=E)

    def next_upper(self, h: int, s_next: int | None) -> float:
        return 0.0 if s_next is None else float(self.upper_v[h + 1][s_next])

    def next_lower(self, h: int, s_next: int | None) -> float:
        return 0.0 if s_next is None else float(self.lower_v[h + 1][s_next])
