"""Model-free counterparts: Strategic and Optimistic Nash-Q."""

from __future__ import annotations

from ..game import MAX, MIN, MarkovGame, PolicyPair, Transition, uniform_policy
from .bonus import BonusSchedule, learning_rate_alpha
from .decisions import OPTIMISTIC, check_variant, decide_state
from .model import LearnerModel


def nash_q_step(model: LearnerModel, variant: str, transition: Transition, bonus: BonusSchedule,
                pair: PolicyPair, pessimistic_eval: bool = True) -> None:
    """Online update of the visited entry, then a policy and value refresh at its state.

    ``pair`` is modified in place.
    """
    check_variant(variant)
    H = model.horizon
    h, s = transition.h, transition.s
    lay = model.layouts[h]
    e = lay.entry(s, transition.a, transition.b)
    model.record(transition)
    t = int(model.counts[h][e])
    alpha = learning_rate_alpha(t, H)
    beta = bonus.beta(t, bonus.coefficient(H, *model.sizes)) if bonus.depends_on_counts else 0.0
    r = transition.r
    up_target = r + model.next_upper(h, transition.s_next) + beta
    low_target = r + model.next_lower(h, transition.s_next) - beta
    model.upper_q[h][e] = min((1 - alpha) * model.upper_q[h][e] + alpha * up_target, H)
    model.lower_q[h][e] = max((1 - alpha) * model.lower_q[h][e] + alpha * low_target, 0.0)
    refresh_state(model, variant, pair, h, s, pessimistic_eval)


def refresh_state(model: LearnerModel, variant: str, pair: PolicyPair, h: int, s: int,
                  pessimistic_eval: bool) -> None:
    lay = model.layouts[h]
    shape = (int(lay.n_max[s]), int(lay.n_min[s]))
    span = lay.entries_of(s)
    d = decide_state(model.upper_q[h][span].reshape(shape), model.lower_q[h][span].reshape(shape),
                     variant, pessimistic_eval)
    pair.explore_max[h, s], pair.explore_min[h, s] = d.mu, d.nu
    pair.eval_max[h, s], pair.eval_min[h, s] = d.mu_eval, d.nu_eval
    model.upper_v[h][s], model.lower_v[h][s] = d.upper, d.lower


class NashQ:
    """Nash-Q learner with upper and lower tables, starting from uniform policies."""

    def __init__(self, game: MarkovGame, variant: str = "strategic", bonus: BonusSchedule | None = None,
                 pessimistic_eval: bool | None = None):
        self.variant = check_variant(variant)
        self.bonus = bonus or BonusSchedule()
        self.pessimistic_eval = variant == OPTIMISTIC if pessimistic_eval is None else pessimistic_eval
        self.model = LearnerModel(game)
        mu, nu = uniform_policy(game, MAX), uniform_policy(game, MIN)
        self.pair = PolicyPair(mu, nu, mu.copy(), nu.copy())
        self._snapshot: PolicyPair | None = None

    def policies(self) -> PolicyPair:
        """Snapshot of the current tables' policies (same object while unchanged)."""
        if self._snapshot is None:
            self._snapshot = self.pair.copy()
        return self._snapshot

    def observe(self, transition: Transition) -> None:
        nash_q_step(self.model, self.variant, transition, self.bonus, self.pair, self.pessimistic_eval)
        self._snapshot = None
