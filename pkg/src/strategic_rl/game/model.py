"""Layered finite-horizon two-player zero-sum Markov games.

Steps are 0-based in code (``h = 0 .. H-1``). Every state lives in exactly one
step layer, and joint-action outcomes are stored as flat "entry" arrays per
step, ordered by ``(state, a, b)``. Rewards are the max player's payoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, NamedTuple

import numpy as np
import scipy.sparse as sp

MAX = "max"
MIN = "min"
BOTH = "both"
PLAYERS = (MAX, MIN, BOTH)

ROW_SUM_TOL = 1e-12


class GameValidationError(ValueError):
    """Raised when an operation needs a well-formed game and gets a broken one."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations[:10])
        more = "" if len(self.violations) <= 10 else f"\n  ... {len(self.violations) - 10} more"
        super().__init__(f"invalid game ({len(self.violations)} violations):\n{lines}{more}")


@dataclass(eq=False)
class StepLayout:
    """Index structure of one step layer.

    ``max_ptr``/``min_ptr``/``entry_ptr`` are CSR-style offsets: the state ``s``
    owns max-action slots ``max_ptr[s]:max_ptr[s+1]`` and so on.
    """

    names: tuple[str, ...]
    n_max: np.ndarray
    n_min: np.ndarray
    active: tuple[str, ...]

    def __post_init__(self):
        self.n_max = np.asarray(self.n_max, dtype=np.int64)
        self.n_min = np.asarray(self.n_min, dtype=np.int64)
        self.index = {name: i for i, name in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("duplicate state names within a step")
        n_joint = self.n_max * self.n_min
        self.max_ptr = np.concatenate([[0], np.cumsum(self.n_max)])
        self.min_ptr = np.concatenate([[0], np.cumsum(self.n_min)])
        self.entry_ptr = np.concatenate([[0], np.cumsum(n_joint)])
        states = np.repeat(np.arange(len(self.names)), n_joint)
        local = np.arange(self.entry_ptr[-1]) - self.entry_ptr[states]
        nb = self.n_min[states]
        self.entry_state = states
        self.entry_a = local // np.maximum(nb, 1)
        self.entry_b = local % np.maximum(nb, 1)
        self.entry_max_slot = self.max_ptr[states] + self.entry_a
        self.entry_min_slot = self.min_ptr[states] + self.entry_b

    @property
    def n_states(self) -> int:
        return len(self.names)

    @property
    def n_entries(self) -> int:
        return int(self.entry_ptr[-1])

    @property
    def n_max_slots(self) -> int:
        return int(self.max_ptr[-1])

    @property
    def n_min_slots(self) -> int:
        return int(self.min_ptr[-1])

    def entry(self, s: int, a: int, b: int) -> int:
        return int(self.entry_ptr[s] + a * self.n_min[s] + b)

    def entries_of(self, s: int) -> slice:
        return slice(int(self.entry_ptr[s]), int(self.entry_ptr[s + 1]))

    @cached_property
    def slot_groups(self) -> dict[str, list[tuple[np.ndarray, np.ndarray]]]:
        """States grouped by action count, per side: ``(states, slot matrix)``."""
        groups = {}
        for side, counts, ptr in ((MAX, self.n_max, self.max_ptr), (MIN, self.n_min, self.min_ptr)):
            side_groups = []
            for m in np.unique(counts):
                if m < 1:
                    continue
                states = np.flatnonzero(counts == m)
                side_groups.append((states, ptr[states][:, None] + np.arange(m)))
            groups[side] = side_groups
        return groups

    @cached_property
    def decision_groups(self) -> tuple[list, list, np.ndarray]:
        """Partition states for the turn-based reduction.

        Returns ``(max_groups, min_groups, simultaneous)``; each group is
        ``(states, entry matrix)`` where row ``i`` lists the entries of
        ``states[i]`` in the decider's action order. States with a single
        joint action land in the max groups.
        """
        max_groups, min_groups = [], []
        max_decides = self.n_min == 1
        min_decides = (self.n_max == 1) & ~max_decides
        for mask, counts, out in ((max_decides, self.n_max, max_groups), (min_decides, self.n_min, min_groups)):
            for m in np.unique(counts[mask]):
                states = np.flatnonzero(mask & (counts == m))
                out.append((states, self.entry_ptr[states][:, None] + np.arange(m)))
        simultaneous = np.flatnonzero(~max_decides & ~min_decides)
        return max_groups, min_groups, simultaneous


class Transition(NamedTuple):
    """One observed step ``(h, s, a, b, r, s')``; ``s_next`` is None at the horizon."""

    h: int
    s: int
    a: int
    b: int
    r: float
    s_next: int | None


@dataclass(frozen=True)
class Violation:
    h: int
    state: str
    a: int | None
    b: int | None
    message: str

    def __str__(self):
        where = f"step {self.h + 1}, state {self.state!r}"
        if self.a is not None:
            where += f", a={self.a}, b={self.b}"
        return f"{where}: {self.message}"


@dataclass(eq=False)
class MarkovGame:
    """Explicit layered game. ``transitions[h]`` is a CSR matrix of shape
    ``(E_h, S_{h+1})`` and is ``None`` on the last step."""

    horizon: int
    layouts: list[StepLayout]
    rewards: list[np.ndarray]
    transitions: list[sp.csr_matrix | None]
    initial_state: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon < 1 or len(self.layouts) != self.horizon:
            raise ValueError("horizon must equal the number of step layers")
        if self.initial_state not in self.layouts[0].index:
            raise ValueError(f"initial state {self.initial_state!r} is not in step 1")

    @property
    def initial_index(self) -> int:
        return self.layouts[0].index[self.initial_state]

    @property
    def max_layer_size(self) -> int:
        return max(layout.n_states for layout in self.layouts)

    @property
    def max_actions(self) -> tuple[int, int]:
        return (
            int(max(layout.n_max.max() for layout in self.layouts)),
            int(max(layout.n_min.max() for layout in self.layouts)),
        )

    def state_index(self, h: int, name: str) -> int:
        try:
            return self.layouts[h].index[name]
        except KeyError:
            raise KeyError(f"no state {name!r} at step {h + 1}") from None

    def state_name(self, h: int, s: int) -> str:
        return self.layouts[h].names[s]

    def reward(self, h: int, s: int, a: int, b: int) -> float:
        return float(self.rewards[h][self.layouts[h].entry(s, a, b)])

    def successors(self, h: int, s: int, a: int, b: int) -> dict[int, float]:
        P = self.transitions[h]
        if P is None:
            return {}
        e = self.layouts[h].entry(s, a, b)
        lo, hi = P.indptr[e], P.indptr[e + 1]
        return {int(j): float(p) for j, p in zip(P.indices[lo:hi], P.data[lo:hi])}

    @cached_property
    def is_deterministic(self) -> bool:
        for P in self.transitions:
            if P is None:
                continue
            if np.any(np.diff(P.indptr) != 1) or not np.all(P.data == 1.0):
                return False
        return True

    @cached_property
    def _cum_rows(self) -> list[np.ndarray | None]:
        return [None if P is None else np.cumsum(P.data) for P in self.transitions]

    @cached_property
    def reachable(self) -> list[np.ndarray]:
        """Boolean masks of states reachable from s1 under some joint play."""
        masks = [np.zeros(layout.n_states, dtype=bool) for layout in self.layouts]
        masks[0][self.initial_index] = True
        for h in range(self.horizon - 1):
            layout, P = self.layouts[h], self.transitions[h]
            live = masks[h][layout.entry_state]
            hit = P[np.flatnonzero(live)]
            masks[h + 1][np.unique(hit.indices[hit.data > 0])] = True
        return masks


class GameBuilder:
    """Incremental construction of a :class:`MarkovGame` from named states.

    Structural mistakes (unknown states, bad indices) raise immediately;
    numerical problems (row sums, reward ranges, missing outcomes) are left for
    :func:`validate_game` to report.
    """

    def __init__(self, horizon: int, initial_state: str):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.horizon = horizon
        self.initial_state = initial_state
        self._states: list[dict[str, tuple[int, int, str]]] = [{} for _ in range(horizon)]
        self._rewards: list[dict[tuple[str, int, int], float]] = [{} for _ in range(horizon)]
        self._succ: list[dict[tuple[str, int, int], dict[str, float]]] = [{} for _ in range(horizon)]

    def add_state(self, h: int, name: str, n_max: int, n_min: int, active: str | None = None) -> "GameBuilder":
        if name in self._states[h]:
            raise ValueError(f"state {name!r} already defined at step {h + 1}")
        if active is None:
            active = MIN if n_max == 1 and n_min > 1 else MAX if n_min == 1 and n_max > 1 else BOTH
        if active not in PLAYERS:
            raise ValueError(f"unknown active player tag {active!r}")
        self._states[h][name] = (int(n_max), int(n_min), active)
        return self

    def set_outcome(self, h: int, name: str, a: int, b: int, reward: float,
                    successors: str | Mapping[str, float] | None = None) -> "GameBuilder":
        n_max, n_min, _ = self._states[h][name]
        if not (0 <= a < n_max and 0 <= b < n_min):
            raise IndexError(f"action ({a}, {b}) out of range for state {name!r} at step {h + 1}")
        self._rewards[h][(name, a, b)] = float(reward)
        if successors is None:
            return self
        if h == self.horizon - 1:
            raise ValueError(f"step {h + 1} is the last step and cannot have successors")
        if isinstance(successors, str):
            successors = {successors: 1.0}
        self._succ[h][(name, a, b)] = {k: float(v) for k, v in successors.items()}
        return self

    def build(self, metadata: dict | None = None) -> MarkovGame:
        layouts = []
        for h, states in enumerate(self._states):
            names = tuple(states)
            layouts.append(StepLayout(
                names=names,
                n_max=[states[n][0] for n in names],
                n_min=[states[n][1] for n in names],
                active=tuple(states[n][2] for n in names),
            ))
        rewards, transitions = [], []
        for h, layout in enumerate(layouts):
            r = np.full(layout.n_entries, np.nan)
            rows, cols, vals = [], [], []
            for e in range(layout.n_entries):
                s = layout.entry_state[e]
                key = (layout.names[s], int(layout.entry_a[e]), int(layout.entry_b[e]))
                if key in self._rewards[h]:
                    r[e] = self._rewards[h][key]
                if h < self.horizon - 1:
                    for succ, p in self._succ[h].get(key, {}).items():
                        if succ not in layouts[h + 1].index:
                            raise KeyError(f"successor {succ!r} of {key} is not a state at step {h + 2}")
                        rows.append(e)
                        cols.append(layouts[h + 1].index[succ])
                        vals.append(p)
            rewards.append(r)
            if h < self.horizon - 1:
                P = sp.csr_matrix((vals, (rows, cols)), shape=(layout.n_entries, layouts[h + 1].n_states))
                P.sort_indices()
                transitions.append(P)
            else:
                transitions.append(None)
        return MarkovGame(self.horizon, layouts, rewards, transitions, self.initial_state, dict(metadata or {}))


def validate_game(game: MarkovGame, reward_range: tuple[float, float] = (0.0, 1.0)) -> list[Violation]:
    """Check every structural and numerical invariant; return the violations."""
    report: list[Violation] = []
    lo, hi = reward_range
    for h, layout in enumerate(game.layouts):
        for s, name in enumerate(layout.names):
            n_max, n_min, active = int(layout.n_max[s]), int(layout.n_min[s]), layout.active[s]
            if n_max < 1 or n_min < 1:
                report.append(Violation(h, name, None, None, "empty action set"))
            if active == MAX and n_min != 1:
                report.append(Violation(h, name, None, None, "tagged max-active but min player has several actions"))
            if active == MIN and n_max != 1:
                report.append(Violation(h, name, None, None, "tagged min-active but max player has several actions"))
        R = game.rewards[h]
        P = game.transitions[h]
        for e in range(layout.n_entries):
            s, a, b = int(layout.entry_state[e]), int(layout.entry_a[e]), int(layout.entry_b[e])
            name = layout.names[s]
            if not np.isfinite(R[e]):
                report.append(Violation(h, name, a, b, "reward not set"))
            elif not lo <= R[e] <= hi:
                report.append(Violation(h, name, a, b, f"reward {R[e]!r} outside [{lo}, {hi}]"))
            if P is None:
                continue
            row = P.data[P.indptr[e]:P.indptr[e + 1]]
            if row.size == 0:
                report.append(Violation(h, name, a, b, "missing transition row"))
                continue
            if np.any(row < 0):
                report.append(Violation(h, name, a, b, "negative transition probability"))
            total = row.sum()
            if abs(total - 1.0) > ROW_SUM_TOL:
                report.append(Violation(h, name, a, b, f"transition row sums to {total!r}, not 1"))
    return report


def require_valid(game: MarkovGame, reward_range: tuple[float, float] = (0.0, 1.0)) -> None:
    report = validate_game(game, reward_range)
    if report:
        raise GameValidationError(report)


def sample_step(game: MarkovGame, h: int, s: int, a: int, b: int,
                rng: np.random.Generator) -> tuple[float, int | None]:
    """Play ``(a, b)`` in state ``s`` at step ``h``; returns ``(reward, next state)``.

    The next state is ``None`` after the last step.
    """
    if not 0 <= h < game.horizon:
        raise IndexError(f"step index h={h} outside [0, {game.horizon})")
    layout = game.layouts[h]
    if not 0 <= s < layout.n_states:
        raise IndexError(f"state index s={s} outside [0, {layout.n_states}) at step {h + 1}")
    if not 0 <= a < layout.n_max[s]:
        raise IndexError(f"max action a={a} outside [0, {layout.n_max[s]}) at step {h + 1}, state {s}")
    if not 0 <= b < layout.n_min[s]:
        raise IndexError(f"min action b={b} outside [0, {layout.n_min[s]}) at step {h + 1}, state {s}")
    e = layout.entry_ptr[s] + a * layout.n_min[s] + b
    r = float(game.rewards[h][e])
    P = game.transitions[h]
    if P is None:
        return r, None
    lo, hi = P.indptr[e], P.indptr[e + 1]
    if hi - lo == 1:
        return r, int(P.indices[lo])
    cum = game._cum_rows[h][lo:hi]
    base = cum[0] - P.data[lo]
    u = base + rng.random() * (cum[-1] - base)
    k = min(int(np.searchsorted(cum, u, side="right")), hi - lo - 1)
    return r, int(P.indices[lo + k])
