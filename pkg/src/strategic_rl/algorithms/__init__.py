from .bonus import BonusSchedule, bonus_beta, learning_rate_alpha, log_term
from .decisions import OPTIMISTIC, STRATEGIC, StateDecision, decide_state, decide_step
from .iql import IndependentQ, QLearner, iql_step
from .model import LearnerModel
from .nash_q import NashQ, nash_q_step
from .runner import ALGORITHMS, EpisodeRecord, LearnerSpec, make_learner, rollout, run_learner
from .ulcb import ULCB, pessimistic_eval, ulcb_plan, ulcb_update

__all__ = [
    "ALGORITHMS", "OPTIMISTIC", "STRATEGIC", "BonusSchedule", "EpisodeRecord", "IndependentQ",
    "LearnerModel", "LearnerSpec", "NashQ", "QLearner", "StateDecision", "ULCB", "bonus_beta",
    "decide_state", "decide_step", "iql_step", "learning_rate_alpha", "log_term", "make_learner",
    "nash_q_step", "pessimistic_eval", "rollout", "run_learner", "ulcb_plan", "ulcb_update",
]
