"""Episode loop shared by all learners."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Protocol

import numpy as np

from ..game import MarkovGame, Policy, PolicyPair, Transition, sample_step
from ..rng import stream
from .bonus import BonusSchedule
from .iql import IndependentQ
from .nash_q import NashQ
from .ulcb import ULCB

ALGORITHMS = ("strategic_ulcb", "optimistic_ulcb", "strategic_nashq", "optimistic_nashq", "iql")


class Learner(Protocol):
    def policies(self) -> PolicyPair: ...

    def observe(self, transition: Transition) -> None: ...


@dataclass(frozen=True)
class LearnerSpec:
    algorithm: str = "strategic_ulcb"
    bonus: BonusSchedule = field(default_factory=BonusSchedule)
    epsilon: float = 0.05
    # evaluation pairs of the optimistic variants come from the worst-case bounds
    pessimistic_eval: bool = True

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")


def make_learner(game: MarkovGame, spec: LearnerSpec) -> Learner:
    if spec.algorithm == "iql":
        return IndependentQ(game, spec.epsilon)
    variant, kind = spec.algorithm.split("_")
    cls = ULCB if kind == "ulcb" else NashQ
    return cls(game, variant, spec.bonus, spec.pessimistic_eval)


def sample_action(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; single-action sets use no randomness."""
    if probs.size == 1:
        return 0
    cum = np.cumsum(probs)
    return min(int(np.searchsorted(cum, rng.random() * cum[-1], side="right")), probs.size - 1)


def rollout(game: MarkovGame, mu: Policy, nu: Policy, rng: np.random.Generator,
            learner: Learner | None = None) -> list[Transition]:
    """One episode from ``s1``; each transition is fed to ``learner`` as it happens."""
    trajectory = []
    s = game.initial_index
    for h in range(game.horizon):
        a = sample_action(mu[h, s], rng)
        b = sample_action(nu[h, s], rng)
        r, s_next = sample_step(game, h, s, a, b, rng)
        tr = Transition(h, s, a, b, r, s_next)
        trajectory.append(tr)
        if learner is not None:
            learner.observe(tr)
        s = s_next
    return trajectory


class EpisodeRecord(NamedTuple):
    episode: int
    policies: PolicyPair
    trajectory: list[Transition]
    learner: Learner


def run_learner(game: MarkovGame, spec: LearnerSpec, episodes: int, seed: int,
                learner: Learner | None = None) -> Iterator[EpisodeRecord]:
    """Yield one record per episode (1-based), deterministic in ``seed``.

    ``policies`` is the pair planned before the episode; the same object is
    yielded again whenever the learner's policies did not change.
    """
    if episodes < 0:
        raise ValueError(f"episode count must be >= 0, got {episodes}")
    learner = learner if learner is not None else make_learner(game, spec)
    rng = stream(seed, "sampling")
    for k in range(1, episodes + 1):
        pair = learner.policies()
        trajectory = rollout(game, pair.explore_max, pair.explore_min, rng, learner)
        yield EpisodeRecord(k, pair, trajectory, learner)
