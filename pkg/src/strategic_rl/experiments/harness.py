"""Per-seed runs and CSV output."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..algorithms import run_learner
from ..efficiency import ObservationHistory, audit_step
from ..envs import (DecoyGameSpec, TreeGameSpec, build_decoy_game, build_deep_sea, build_random_stochastic,
                    build_random_tree, build_zero_sum_pd)
from ..game import MarkovGame, load, nash_conv
from .config import ConfigError, ExperimentConfig

HEADER = ("seed", "episode", "nashconv", "regret_cum", "target_visit", "audit")
AUDIT_HEADER = ("seed", "episode", "verdict", "upper_value", "max_guarantee", "lower_value", "min_guarantee")
OUT_ENV = "STRATEGIC_RL_OUT"


def build_environment(config: ExperimentConfig, seed: int) -> MarkovGame:
    """Game instance for one seed (random families draw from the seed's stream)."""
    env = config.environment
    if env == "deep_sea":
        return build_deep_sea(config.n)
    if env == "decoy":
        return build_decoy_game(DecoyGameSpec(config.decoy_count, config.subtask_size, config.target_index, seed))
    if env == "tree":
        return build_random_tree(TreeGameSpec(config.depth, config.branching, seed))
    if env == "zspd":
        return build_zero_sum_pd(config.x)
    if env == "stochastic":
        return build_random_stochastic(config.horizon, config.max_states, config.n_actions, seed)
    return load(config.game_path)


def evaluated_episodes(episodes: int, eval_every: int) -> set[int]:
    """Episodes 1, 1 + eval_every, 1 + 2 eval_every, ... and always the last one."""
    return set(range(1, episodes + 1, eval_every)) | {episodes}


@dataclass
class MetricsRecord:
    seed: int
    episode: int
    nashconv: float
    regret_cum: float
    target_visit: int | None = None
    audit: str | None = None

    def row(self) -> list[str]:
        return [str(self.seed), str(self.episode), repr(self.nashconv), repr(self.regret_cum),
                "" if self.target_visit is None else str(self.target_visit),
                "" if self.audit is None else self.audit]


def _same_eval(a, b) -> bool:
    if a is None:
        return False
    return a.eval_max.same_as(b.eval_max) and a.eval_min.same_as(b.eval_min)


def run_seed(config: ExperimentConfig, seed: int, audit: bool = False,
             game: MarkovGame | None = None) -> tuple[list[MetricsRecord], list[list[str]]]:
    """Metrics rows for one seed plus, when auditing, audit rows for every episode."""
    game = game if game is not None else build_environment(config, seed)
    if audit and not game.is_deterministic:
        raise ConfigError("audit", "the audit applies to deterministic games only")
    target = None
    if config.environment == "decoy":
        h, name = game.metadata["target_state"]
        target = (h, game.state_index(h, name))
    evaluate = evaluated_episodes(config.episodes, config.eval_every)
    history = ObservationHistory(game) if audit else None
    records, audit_rows = [], []
    regret = 0.0
    last_pair, last_nc = None, 0.0
    last_audit_key, verdict = None, None
    for rec in run_learner(game, config.learner_spec(), config.episodes, seed):
        pair = rec.policies
        if audit:
            key = (len(history), pair)
            if last_audit_key is None or key[0] != last_audit_key[0] or key[1] is not last_audit_key[1]:
                res = audit_step(history, pair.explore_max, pair.explore_min)
                last_audit_key = key
                verdict = res.verdict
                values = [repr(res.upper_value), repr(res.max_guarantee),
                          repr(res.lower_value), repr(res.min_guarantee)]
            audit_rows.append([str(seed), str(rec.episode), verdict, *values])
            history.extend(rec.trajectory)
        if rec.episode not in evaluate:
            continue
        if pair is not last_pair and not _same_eval(last_pair, pair):
            # tiny negative values from cancellation are rounded up to zero
            last_nc = max(nash_conv(game, pair.eval_max, pair.eval_min), 0.0)
        last_pair = pair
        regret += last_nc
        visit = None
        if target is not None:
            visit = int(any(tr.h == target[0] and tr.s == target[1] for tr in rec.trajectory))
        records.append(MetricsRecord(seed, rec.episode, last_nc, regret, visit,
                                     verdict if audit else None))
    return records, audit_rows


def default_output(config: ExperimentConfig) -> Path:
    if config.output:
        return Path(config.output)
    return Path(os.environ.get(OUT_ENV, ".")) / f"{config.name}.csv"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def run_experiment(config: ExperimentConfig, out: str | Path | None = None,
                   audit: bool | None = None) -> Path:
    """Run every seed in order and write ``<out>``, ``<out>.json`` metadata and,
    when auditing, ``<out stem>_audit.csv``. Returns the CSV path."""
    audit = config.audit if audit is None else audit
    path = Path(out) if out is not None else default_output(config)
    if path.parent and not path.parent.exists():
        raise OSError(f"output directory {str(path.parent)!r} does not exist")
    rows, audit_rows, instances = [], [], []
    for seed in config.seeds:
        game = build_environment(config, seed)
        records, arows = run_seed(config, seed, audit, game)
        rows.extend(r.row() for r in records)
        audit_rows.extend(arows)
        instances.append({"seed": seed, **{k: v for k, v in game.metadata.items()}})
    write_csv(path, HEADER, rows)
    meta = {"version": __version__, "config": config.to_dict(), "instances": instances}
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if audit:
        write_csv(path.with_name(path.stem + "_audit.csv"), AUDIT_HEADER, audit_rows)
    return path


def read_metrics(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != HEADER:
            raise ValueError(f"{path}: expected header {','.join(HEADER)}, got {header}")
        return [dict(zip(HEADER, row)) for row in reader]


def target_visit_fraction(records, bucket: int = 100) -> list[tuple[int, float]]:
    """Per bucket of ``bucket`` consecutive episodes: ``(first episode, fraction)``.

    ``records`` are :class:`MetricsRecord` objects or CSV row dicts of one seed.
    """
    if bucket < 1:
        raise ValueError(f"bucket width must be >= 1, got {bucket}")
    visits: dict[int, list[int]] = {}
    for rec in records:
        episode = int(rec["episode"] if isinstance(rec, dict) else rec.episode)
        v = rec["target_visit"] if isinstance(rec, dict) else rec.target_visit
        if v is None or v == "":
            raise ValueError(f"episode {episode} has no target_visit value (not a decoy-game record)")
        visits.setdefault((episode - 1) // bucket, []).append(int(v))
    return [(k * bucket + 1, float(np.mean(v))) for k, v in sorted(visits.items())]
