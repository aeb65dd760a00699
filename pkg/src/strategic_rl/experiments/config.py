"""Plain-text experiment configs: ``key = value`` lines, ``#`` comments."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..algorithms import ALGORITHMS, BonusSchedule, LearnerSpec
from ..algorithms.bonus import MODES

ENVIRONMENTS = ("deep_sea", "decoy", "tree", "zspd", "stochastic", "file")


class ConfigError(ValueError):
    def __init__(self, key: str | None, message: str):
        self.key = key
        super().__init__(f"config key {key!r}: {message}" if key else message)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Comma list; ``a-b`` means the inclusive range."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if any(seed < 0 for seed in seeds):
        raise ValueError("seeds must be non-negative")
    return tuple(seeds)


def _parse_optional_int(text: str) -> int | None:
    return None if text.lower() in ("", "none", "random") else int(text)


@dataclass(frozen=True)
class ExperimentConfig:
    environment: str = "decoy"
    algorithm: str = "strategic_ulcb"
    episodes: int = 1000
    seeds: tuple[int, ...] = (0,)
    # environment parameters
    n: int = 10
    decoy_count: int = 2
    subtask_size: int = 10
    target_index: int | None = None
    depth: int = 3
    branching: int = 2
    x: float = 1.0
    horizon: int = 3
    max_states: int = 4
    n_actions: int = 2
    game_path: str | None = None
    # learner
    bonus: str = "zero"
    delta: float = 0.1
    scale: float = 1.0
    epsilon: float = 0.05
    pessimistic_eval: bool = True
    # harness
    eval_every: int = 10
    audit: bool = False
    output: str | None = None
    name: str = field(default="experiment", compare=False)

    def __post_init__(self):
        if self.environment not in ENVIRONMENTS:
            raise ConfigError("environment", f"must be one of {ENVIRONMENTS}, got {self.environment!r}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError("algorithm", f"must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.bonus not in MODES:
            raise ConfigError("bonus", f"must be one of {MODES}, got {self.bonus!r}")
        if self.episodes < 1:
            raise ConfigError("episodes", f"must be >= 1, got {self.episodes}")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed is required")
        if self.eval_every < 1:
            raise ConfigError("eval_every", f"must be >= 1, got {self.eval_every}")
        if not 0 < self.delta <= 1:
            raise ConfigError("delta", f"must lie in (0, 1], got {self.delta}")
        if not 0 <= self.epsilon <= 1:
            raise ConfigError("epsilon", f"must lie in [0, 1], got {self.epsilon}")
        if self.environment == "file" and not self.game_path:
            raise ConfigError("game_path", "required when environment = file")

    def learner_spec(self) -> LearnerSpec:
        bonus = BonusSchedule(self.bonus, self.delta, self.episodes, self.scale)
        return LearnerSpec(self.algorithm, bonus, self.epsilon, self.pessimistic_eval)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["seeds"] = list(self.seeds)
        return d

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig) if f.name != "name"}
_PARSERS = {
    "seeds": _parse_seeds,
    "target_index": _parse_optional_int,
    "game_path": lambda t: t or None,
    "output": lambda t: t or None,
    "pessimistic_eval": _parse_bool,
    "audit": _parse_bool,
}


def parse_config(text: str, name: str = "experiment") -> ExperimentConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(None, f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, f"line {lineno}: duplicate key")
        parser = _PARSERS.get(key)
        if parser is None:
            kind = type(_FIELDS[key].default)
            parser = kind if kind in (int, float) else str
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(key, f"line {lineno}: cannot parse {value!r} ({exc})") from None
    return ExperimentConfig(name=name, **values)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), name=path.stem)
