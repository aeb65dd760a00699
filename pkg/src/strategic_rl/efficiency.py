"""Strategic-efficiency audit for deterministic games.

The set of games exactly consistent with the observations so far is never
enumerated. Instead it is represented by an :class:`ObservationHistory` plus
two witness games: every unobserved joint action leads to an absorbing sink
``s*`` with reward ``H`` (upper witness) or 0 (lower witness). The upper
witness is the most favourable consistent game for the max player and the
lower witness the least favourable one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from .algorithms.runner import LearnerSpec, run_learner
from .game import BOTH, MAX, MIN, MarkovGame, Policy, StepLayout, Transition
from .game.oracles import _minimax, best_response_values

TOL = 1e-9
UPPER, LOWER = "upper", "lower"
SINK = "s*"


class InconsistentHistoryError(ValueError):
    pass


def _shape_key(game: MarkovGame):
    return [(lay.names, tuple(lay.n_max), tuple(lay.n_min)) for lay in game.layouts]


class ObservationHistory:
    """Ordered set of observed ``(h, s, a, b, r, s')`` tuples over a game's shape."""

    def __init__(self, shape: MarkovGame, transitions: Iterable[Transition] = ()):
        self.shape = shape
        self.horizon = shape.horizon
        self.layouts = shape.layouts
        self.observed = [np.zeros(lay.n_entries, dtype=bool) for lay in shape.layouts]
        self.rewards = [np.zeros(lay.n_entries) for lay in shape.layouts]
        self.successors = [np.full(lay.n_entries, -1, dtype=np.int64) for lay in shape.layouts]
        self._tuples: list[Transition] = []
        self.extend(transitions)

    def add(self, tr: Transition) -> bool:
        """Record ``tr``; returns True if it was new. Conflicts raise."""
        h = tr.h
        e = self.layouts[h].entry(tr.s, tr.a, tr.b)
        succ = -1 if tr.s_next is None else int(tr.s_next)
        if self.observed[h][e]:
            if self.rewards[h][e] != tr.r or self.successors[h][e] != succ:
                prev = (self.rewards[h][e], self.successors[h][e])
                raise InconsistentHistoryError(
                    f"observation {tuple(tr)} contradicts earlier (r, s') = {prev} "
                    f"at step {h + 1}, state {self.layouts[h].names[tr.s]!r}")
            return False
        self.observed[h][e] = True
        self.rewards[h][e] = tr.r
        self.successors[h][e] = succ
        self._tuples.append(Transition(*tr))
        return True

    def extend(self, transitions: Iterable[Transition]) -> int:
        return sum(self.add(tr) for tr in transitions)

    def copy(self) -> "ObservationHistory":
        return ObservationHistory(self.shape, self._tuples)

    def __len__(self) -> int:
        return len(self._tuples)

    def __iter__(self) -> Iterator[Transition]:
        return iter(self._tuples)

    def __contains__(self, tr) -> bool:
        return Transition(*tr) in set(self._tuples)

    def visited_states(self) -> list[np.ndarray]:
        """Per step, indices of states with at least one observed joint action."""
        return [np.unique(lay.entry_state[obs]) for lay, obs in zip(self.layouts, self.observed)]

    @cached_property
    def extended_layouts(self) -> list[StepLayout]:
        out = []
        for lay in self.layouts:
            sink = SINK
            while sink in lay.index:
                sink += "*"
            out.append(StepLayout(tuple(lay.names) + (sink,), np.append(lay.n_max, 1),
                                  np.append(lay.n_min, 1), tuple(lay.active) + (BOTH,)))
        return out


def membership(candidate: MarkovGame, history: ObservationHistory) -> bool:
    """Whether a deterministic ``candidate`` reproduces every observed ``(r, s')``."""
    if _shape_key(candidate) != _shape_key(history.shape) or candidate.horizon != history.horizon:
        raise ValueError("candidate game and history have different shapes")
    if not candidate.is_deterministic:
        raise ValueError("membership is defined for deterministic candidates only")
    for h in range(candidate.horizon):
        obs = history.observed[h]
        if not np.array_equal(candidate.rewards[h][obs], history.rewards[h][obs]):
            return False
        P = candidate.transitions[h]
        if P is not None:
            succ = P.indices[P.indptr[:-1]]  # one successor per row
            if not np.array_equal(succ[obs], history.successors[h][obs]):
                return False
    return True


def witness_game(history: ObservationHistory, bound: str) -> MarkovGame:
    """Consistent game sending every unobserved joint action to the sink.

    Unobserved actions pay ``H`` under the upper witness and 0 under the lower
    one; the sink itself pays 0. Observed actions keep their ``(r, s')``.
    """
    if bound not in (UPPER, LOWER):
        raise ValueError(f"bound must be 'upper' or 'lower', got {bound!r}")
    H = history.horizon
    free_reward = float(H) if bound == UPPER else 0.0
    layouts = history.extended_layouts
    rewards, transitions = [], []
    for h, lay in enumerate(history.layouts):
        obs = history.observed[h]
        rewards.append(np.append(np.where(obs, history.rewards[h], free_reward), 0.0))
        if h == H - 1:
            transitions.append(None)
            continue
        sink_next = history.layouts[h + 1].n_states
        cols = np.append(np.where(obs, history.successors[h], sink_next), sink_next)
        n_rows = lay.n_entries + 1
        transitions.append(sp.csr_matrix((np.ones(n_rows), cols, np.arange(n_rows + 1)),
                                         shape=(n_rows, sink_next + 1)))
    return MarkovGame(H, layouts, rewards, transitions, history.shape.initial_state,
                      {"witness": bound})


def extend_policy(policy: Policy, history: ObservationHistory) -> Policy:
    """Same policy on the witness shape (the sink's single action gets mass 1)."""
    layouts = history.extended_layouts
    ptrs = [lay.max_ptr if policy.side == MAX else lay.min_ptr for lay in layouts]
    return Policy(policy.side, [np.append(p, 1.0) for p in policy.probs], ptrs)


@dataclass
class AuditResult:
    """Verdict on one exploration pair.

    ``upper_value``/``lower_value`` are the witnesses' minimax values at s1;
    ``max_guarantee`` is ``inf_nu V^{mu_k, nu}`` in the upper witness and
    ``min_guarantee`` is ``sup_mu V^{mu, nu_k}`` in the lower witness.
    """

    passed: bool
    upper_value: float
    max_guarantee: float
    lower_value: float
    min_guarantee: float
    witnesses: dict[str, MarkovGame] = field(repr=False, default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def audit_step(history: ObservationHistory, mu_k: Policy, nu_k: Policy) -> AuditResult:
    upper, lower = witness_game(history, UPPER), witness_game(history, LOWER)
    s1 = upper.initial_index
    upper_value = float(_minimax(upper)[0][0][s1])
    lower_value = float(_minimax(lower)[0][0][s1])
    max_guarantee = float(best_response_values(upper, extend_policy(mu_k, history), MAX)[0][0][s1])
    min_guarantee = float(best_response_values(lower, extend_policy(nu_k, history), MIN)[0][0][s1])
    passed = max_guarantee >= upper_value - TOL and min_guarantee <= lower_value + TOL
    return AuditResult(passed, upper_value, max_guarantee, lower_value, min_guarantee,
                       {UPPER: upper, LOWER: lower})


def bound_gaps(history: ObservationHistory, upper_v: list[np.ndarray],
               lower_v: list[np.ndarray]) -> tuple[float, float]:
    """Largest deviation between the witnesses' minimax values and given bounds,
    over visited states."""
    up_values = _minimax(witness_game(history, UPPER))[0]
    low_values = _minimax(witness_game(history, LOWER))[0]
    up_gap = low_gap = 0.0
    for h, states in enumerate(history.visited_states()):
        if states.size:
            up_gap = max(up_gap, float(np.abs(up_values[h][states] - upper_v[h][states]).max()))
            low_gap = max(low_gap, float(np.abs(low_values[h][states] - lower_v[h][states]).max()))
    return up_gap, low_gap


@dataclass
class AuditRecord:
    episode: int
    result: AuditResult
    upper_gap: float | None = None
    lower_gap: float | None = None


def run_audited(game: MarkovGame, spec: LearnerSpec, episodes: int, seed: int,
                check_bounds: bool = False) -> list[AuditRecord]:
    """Audit every planned exploration pair against the history preceding it.

    With ``check_bounds`` (model-based learners only) the learner's current
    bounds are compared with the witnesses' minimax values as well. Audits
    are recomputed only when the history or the pair changed.
    """
    if not game.is_deterministic:
        raise ValueError("the audit applies to deterministic games only")
    history = ObservationHistory(game)
    records = []
    last_size, last_pair, last = -1, None, None
    for rec in run_learner(game, spec, episodes, seed):
        if len(history) != last_size or rec.policies is not last_pair:
            pair = rec.policies
            result = audit_step(history, pair.explore_max, pair.explore_min)
            gaps = (None, None)
            if check_bounds:
                model = rec.learner.model
                gaps = bound_gaps(history, model.upper_v, model.lower_v)
            last_size, last_pair, last = len(history), rec.policies, (result, gaps)
        records.append(AuditRecord(rec.episode, last[0], *last[1]))
        history.extend(rec.trajectory)
    return records
