"""Model-based upper/lower confidence bound planning (Strategic and Optimistic ULCB)."""

from __future__ import annotations

import numpy as np

from ..game import MAX, MIN, MarkovGame, Policy, PolicyPair, Transition
from .bonus import BonusSchedule
from .decisions import OPTIMISTIC, check_variant, decide_step, pessimistic_state
from .model import LearnerModel


def _empty_pair(model: LearnerModel) -> PolicyPair:
    def make(side):
        ptrs = [lay.max_ptr if side == MAX else lay.min_ptr for lay in model.layouts]
        return Policy(side, [np.zeros(int(p[-1])) for p in ptrs], ptrs)
    return PolicyPair(make(MAX), make(MIN), make(MAX), make(MIN))


def ulcb_plan(model: LearnerModel, variant: str, bonus: BonusSchedule,
              pessimistic_eval: bool = False) -> PolicyPair:
    """Backward sweep recomputing Q-bar, Q-underbar, V-bar, V-underbar in place.

    Returns the exploration pair ``(mu, nu)`` and evaluation pair ``(mu~, nu~)``.
    With ``pessimistic_eval`` the optimistic variant's evaluation pair comes
    from the zero-sum games on the bounds instead of the joint equilibrium.
    """
    check_variant(variant)
    H = model.horizon
    coef = bonus.coefficient(H, *model.sizes)
    pair = _empty_pair(model)
    for h in reversed(range(H)):
        lay = model.layouts[h]
        n = model.counts[h]
        visited = n > 0
        if h < H - 1:
            up_next = model.expected_next(h, model.upper_v[h + 1])
            low_next = model.expected_next(h, model.lower_v[h + 1])
        else:
            up_next = low_next = 0.0
        beta = bonus.betas(n, coef)
        r = model.reward_hat[h]
        with np.errstate(invalid="ignore"):
            upper_q = np.where(visited, np.minimum(r + up_next + beta, H), float(H))
            lower_q = np.where(visited, np.maximum(r + low_next - beta, 0.0), 0.0)
        model.upper_q[h] = upper_q
        model.lower_q[h] = lower_q
        out = (pair.explore_max.probs[h], pair.explore_min.probs[h],
               pair.eval_max.probs[h], pair.eval_min.probs[h])
        model.upper_v[h], model.lower_v[h] = decide_step(lay, upper_q, lower_q, variant,
                                                         pessimistic_eval, out)
    return pair


def ulcb_update(model: LearnerModel, transition: Transition) -> bool:
    """Record one transition; True when the empirical model changed."""
    return model.record(transition)


def pessimistic_eval(model: LearnerModel) -> tuple[Policy, Policy]:
    """Worst-case evaluation pair: ``nu~`` from Q-bar, ``mu~`` from Q-underbar."""
    pair = _empty_pair(model)
    mu, nu = pair.eval_max, pair.eval_min
    for h, lay in enumerate(model.layouts):
        for s in range(lay.n_states):
            shape = (int(lay.n_max[s]), int(lay.n_min[s]))
            span = lay.entries_of(s)
            mu[h, s], nu[h, s] = pessimistic_state(model.upper_q[h][span].reshape(shape),
                                                   model.lower_q[h][span].reshape(shape))
    return mu, nu


class ULCB:
    """Episodic ULCB learner.

    Planning is skipped when nothing it depends on has changed since the last
    sweep (no new entry, no change of the empirical model and a zero bonus);
    the cached plan is then exactly what a fresh sweep would return.
    """

    def __init__(self, game: MarkovGame, variant: str = "strategic", bonus: BonusSchedule | None = None,
                 pessimistic_eval: bool | None = None):
        self.variant = check_variant(variant)
        self.bonus = bonus or BonusSchedule()
        self.pessimistic_eval = variant == OPTIMISTIC if pessimistic_eval is None else pessimistic_eval
        self.model = LearnerModel(game)
        self._plan: PolicyPair | None = None
        self.sweeps = 0

    def policies(self) -> PolicyPair:
        if self._plan is None:
            self._plan = ulcb_plan(self.model, self.variant, self.bonus, self.pessimistic_eval)
            self.sweeps += 1
        return self._plan

    def observe(self, transition: Transition) -> None:
        changed = ulcb_update(self.model, transition)
        if changed or self.bonus.depends_on_counts:
            self._plan = None
