"""Factored per-step policies for one player.

A :class:`Policy` stores, for each step, one flat probability array over the
player's action slots; ``policy[h, s]`` is the mixed strategy at state ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .model import MAX, MIN, MarkovGame

MixedStrategy = np.ndarray

PROB_TOL = 1e-12


class MissingPolicyError(KeyError):
    pass


@dataclass(eq=False)
class Policy:
    side: str
    probs: list[np.ndarray]
    ptrs: list[np.ndarray]

    def __getitem__(self, key: tuple[int, int]) -> MixedStrategy:
        h, s = key
        ptr = self.ptrs[h]
        return self.probs[h][ptr[s]:ptr[s + 1]]

    def __setitem__(self, key: tuple[int, int], value) -> None:
        h, s = key
        ptr = self.ptrs[h]
        self.probs[h][ptr[s]:ptr[s + 1]] = value

    def copy(self) -> "Policy":
        return Policy(self.side, [p.copy() for p in self.probs], self.ptrs)

    def same_as(self, other: "Policy | None") -> bool:
        return other is not None and all(np.array_equal(p, q) for p, q in zip(self.probs, other.probs))

    def is_valid(self) -> bool:
        for p, ptr in zip(self.probs, self.ptrs):
            if np.any(p < 0):
                return False
            sums = np.add.reduceat(p, ptr[:-1]) if p.size else np.zeros(0)
            if np.any(np.abs(sums - 1.0) > PROB_TOL):
                return False
        return True


@dataclass(eq=False)
class PolicyPair:
    """Exploration policies (mu, nu) and evaluation policies (mu~, nu~)."""

    explore_max: Policy
    explore_min: Policy
    eval_max: Policy
    eval_min: Policy

    def copy(self) -> "PolicyPair":
        return PolicyPair(self.explore_max.copy(), self.explore_min.copy(),
                          self.eval_max.copy(), self.eval_min.copy())


def _ptrs(game: MarkovGame, side: str) -> list[np.ndarray]:
    if side == MAX:
        return [layout.max_ptr for layout in game.layouts]
    if side == MIN:
        return [layout.min_ptr for layout in game.layouts]
    raise ValueError(f"side must be 'max' or 'min', got {side!r}")


def _counts(game: MarkovGame, side: str) -> list[np.ndarray]:
    return [layout.n_max if side == MAX else layout.n_min for layout in game.layouts]


def uniform_policy(game: MarkovGame, side: str) -> Policy:
    probs = [np.repeat(1.0 / n, n) for n in _counts(game, side)]
    return Policy(side, probs, _ptrs(game, side))


def zeros_policy(game: MarkovGame, side: str) -> Policy:
    ptrs = _ptrs(game, side)
    return Policy(side, [np.zeros(int(ptr[-1])) for ptr in ptrs], ptrs)


def pure_policy(game: MarkovGame, side: str, choose: Callable[[int, int], int] | int = 0) -> Policy:
    """Deterministic policy; ``choose(h, s)`` gives the action index (or a constant)."""
    policy = zeros_policy(game, side)
    counts = _counts(game, side)
    for h, layout in enumerate(game.layouts):
        for s in range(layout.n_states):
            k = choose(h, s) if callable(choose) else choose
            k = min(int(k), int(counts[h][s]) - 1)
            policy.probs[h][policy.ptrs[h][s] + k] = 1.0
    return policy


def policy_from_mapping(game: MarkovGame, side: str,
                        mapping: Mapping[tuple[int, str | int], np.ndarray]) -> Policy:
    """Build a :class:`Policy` from ``{(h, state): probabilities}``.

    States may be given by name or index. Every reachable state must be
    present; unreachable ones default to uniform.
    """
    policy = uniform_policy(game, side)
    seen = [np.zeros(layout.n_states, dtype=bool) for layout in game.layouts]
    for (h, s), probs in mapping.items():
        idx = game.state_index(h, s) if isinstance(s, str) else int(s)
        probs = np.asarray(probs, dtype=float)
        if probs.shape != policy[h, idx].shape:
            raise ValueError(f"strategy at step {h + 1}, state {game.state_name(h, idx)!r} "
                             f"has {probs.size} entries, expected {policy[h, idx].size}")
        policy[h, idx] = probs
        seen[h][idx] = True
    for h, mask in enumerate(game.reachable):
        missing = np.flatnonzero(mask & ~seen[h])
        if missing.size:
            raise MissingPolicyError(
                f"policy for the {side} player is missing reachable state "
                f"{game.state_name(h, int(missing[0]))!r} at step {h + 1}")
    return policy


def as_policy(game: MarkovGame, side: str, policy) -> Policy:
    if isinstance(policy, Policy):
        if policy.side != side:
            raise ValueError(f"expected a {side} policy, got a {policy.side} policy")
        return policy
    return policy_from_mapping(game, side, policy)
