"""Exploration bonuses and learning rates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MODES = ("theoretical", "scaled", "zero")


def log_term(K: int, H: int, S_size: int, A_size: int, B_size: int, delta: float) -> float:
    if K <= 0:
        raise ValueError(f"episode count K must be positive, got {K}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return math.log(K * H * S_size * A_size * B_size / delta)


def bonus_beta(t: int, H: int, S_size: int, A_size: int, B_size: int, K: int, delta: float) -> float:
    """Hoeffding-style bonus ``H * sqrt(2 |S| l / t)``; infinite for ``t = 0``."""
    ell = log_term(K, H, S_size, A_size, B_size, delta)
    if t < 0:
        raise ValueError(f"visit count must be >= 0, got {t}")
    if t == 0:
        return math.inf
    return H * math.sqrt(2 * S_size * ell / t)


def learning_rate_alpha(t: int, H: int) -> float:
    if t < 1:
        raise ValueError(f"learning rate needs t >= 1, got {t}")
    return (H + 1) / (H + t)


@dataclass(frozen=True)
class BonusSchedule:
    """``mode`` is one of ``theoretical`` (needs ``episodes``), ``scaled``
    (``scale / sqrt(t)``) or ``zero``."""

    mode: str = "zero"
    delta: float = 0.1
    episodes: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"bonus mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "theoretical":
            if self.episodes is None or self.episodes <= 0:
                raise ValueError("theoretical bonus needs a positive episode count")
            if not 0 < self.delta <= 1:
                raise ValueError(f"delta must lie in (0, 1], got {self.delta}")

    @property
    def depends_on_counts(self) -> bool:
        return self.mode != "zero"

    def coefficient(self, H: int, S_size: int, A_size: int, B_size: int) -> float:
        """``c`` such that ``beta_t = c / sqrt(t)`` for ``t >= 1``."""
        if self.mode == "zero":
            return 0.0
        if self.mode == "scaled":
            return self.scale
        return H * math.sqrt(2 * S_size * log_term(self.episodes, H, S_size, A_size, B_size, self.delta))

    def beta(self, t: int, coefficient: float) -> float:
        if self.mode == "zero":
            return 0.0
        return math.inf if t == 0 else coefficient / math.sqrt(t)

    def betas(self, t: np.ndarray, coefficient: float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.mode == "zero":
            return np.zeros_like(t)
        with np.errstate(divide="ignore"):
            return np.where(t > 0, coefficient / np.sqrt(np.maximum(t, 1.0)), np.inf)
