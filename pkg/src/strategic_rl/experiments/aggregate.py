"""Multi-seed summaries: per-episode mean/sd and episodes-to-solve."""

from __future__ import annotations

import json
import math
import statistics
from pathlib import Path

from .harness import read_metrics, write_csv

SOLVED_TOL = 1e-9
UNSOLVED = "unsolved"
SUMMARY_HEADER = ("algorithm", "environment", "episode", "runs",
                  "nashconv_mean", "nashconv_std", "regret_mean", "regret_std")
SOLVE_HEADER = ("algorithm", "environment", "seed", "episodes_to_solve")


def mean_std(values: list[float]) -> tuple[float, float]:
    """Mean and population standard deviation, independent of input order."""
    values = sorted(values)
    mu = math.fsum(values) / len(values)
    var = math.fsum((v - mu) ** 2 for v in values) / len(values)
    return mu, math.sqrt(var)


def episodes_to_solve(rows: list[dict], tol: float = SOLVED_TOL) -> int | None:
    """First evaluated episode from which NashConv stays ``<= tol``; None if never."""
    rows = sorted(rows, key=lambda r: int(r["episode"]))
    first = None
    for r in rows:
        if float(r["nashconv"]) <= tol:
            first = int(r["episode"]) if first is None else first
        else:
            first = None
    return first


def median_solve(per_seed: list[int | None]) -> float | None:
    """Median with unsolved runs counted as infinitely slow."""
    med = statistics.median(math.inf if v is None else v for v in per_seed)
    return None if math.isinf(med) else med


def _labels(path: Path) -> tuple[str, str]:
    meta = path.with_suffix(".json")
    if meta.exists():
        cfg = json.loads(meta.read_text()).get("config", {})
        return cfg.get("algorithm", "unknown"), cfg.get("environment", "unknown")
    return "unknown", "unknown"


def aggregate(paths, out: str | Path) -> tuple[Path, Path]:
    """Write ``out`` (per-episode summary) and ``<out stem>_solve.csv``."""
    groups: dict[tuple[str, str], dict[int, list[dict]]] = {}
    for p in paths:
        p = Path(p)
        label = _labels(p)
        for row in read_metrics(p):
            groups.setdefault(label, {}).setdefault(int(row["seed"]), []).append(row)
    if not groups:
        raise ValueError("no input rows")
    summary, solve = [], []
    for (alg, env) in sorted(groups):
        by_seed = groups[(alg, env)]
        by_episode: dict[int, list[dict]] = {}
        for rows in by_seed.values():
            for r in rows:
                by_episode.setdefault(int(r["episode"]), []).append(r)
        for ep in sorted(by_episode):
            rows = by_episode[ep]
            nc = mean_std([float(r["nashconv"]) for r in rows])
            rg = mean_std([float(r["regret_cum"]) for r in rows])
            summary.append([alg, env, str(ep), str(len(rows)), repr(nc[0]), repr(nc[1]), repr(rg[0]), repr(rg[1])])
        per_seed = []
        for seed in sorted(by_seed):
            k = episodes_to_solve(by_seed[seed])
            per_seed.append(k)
            solve.append([alg, env, str(seed), UNSOLVED if k is None else str(k)])
        med = median_solve(per_seed)
        solve.append([alg, env, "median", UNSOLVED if med is None else repr(float(med))])
    out = Path(out)
    solve_path = out.with_name(out.stem + "_solve.csv")
    write_csv(out, SUMMARY_HEADER, summary)
    write_csv(solve_path, SOLVE_HEADER, solve)
    return out, solve_path
