import csv
import json
import math

import pytest

from strategic_rl.envs import TreeGameSpec, build_random_tree
from strategic_rl.experiments import (HEADER, UNSOLVED, ConfigError, ExperimentConfig, aggregate,
                                      episodes_to_solve, evaluated_episodes, mean_std, parse_config,
                                      read_metrics, run_experiment, run_seed, target_visit_fraction)
from strategic_rl.experiments.cli import main
from strategic_rl.game import save

DECOY_CFG = """
# small decoy run
environment = decoy
decoy_count = 2
subtask_size = 4
algorithm = strategic_ulcb
episodes = 60
seeds = 0-2
eval_every = 5
"""


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_config():
    cfg = parse_config(DECOY_CFG)
    assert cfg.seeds == (0, 1, 2) and cfg.decoy_count == 2 and cfg.eval_every == 5
    assert parse_config("seeds = 3, 5,7\naudit = yes").seeds == (3, 5, 7)


@pytest.mark.parametrize("text,key", [
    ("colour = red", "colour"),
    ("episodes = 0", "episodes"),
    ("episodes = many", "episodes"),
    ("eval_every = 0", "eval_every"),
    ("algorithm = sarsa", "algorithm"),
    ("seeds = ", "seeds"),
    ("episodes = 3\nepisodes = 4", "episodes"),
])
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key and key in str(info.value)


def test_evaluated_episodes():
    assert evaluated_episodes(1, 10) == {1}
    assert evaluated_episodes(25, 10) == {1, 11, 21, 25}


def test_single_episode_single_row(tmp_path):
    out = run_experiment(ExperimentConfig(environment="zspd", episodes=1, seeds=(0,)), tmp_path / "a.csv")
    data = rows(out)
    assert len(data) == 1 and data[0]["episode"] == "1"
    assert data[0]["target_visit"] == "" and data[0]["audit"] == ""


def test_run_is_deterministic_and_consistent(tmp_path):
    cfg = parse_config(DECOY_CFG)
    a = run_experiment(cfg, tmp_path / "a.csv", audit=True)
    b = run_experiment(cfg, tmp_path / "b.csv", audit=True)
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a_audit.csv").read_bytes() == (tmp_path / "b_audit.csv").read_bytes()
    data = read_metrics(a)
    meta = json.loads(a.with_suffix(".json").read_text())
    assert meta["config"]["algorithm"] == "strategic_ulcb" and len(meta["instances"]) == 3
    assert [(int(r["seed"]), int(r["episode"])) for r in data] == sorted((int(r["seed"]), int(r["episode"])) for r in data)
    for seed in "012":
        mine = [r for r in data if r["seed"] == seed]
        total = math.fsum(float(r["nashconv"]) for r in mine)
        assert float(mine[-1]["regret_cum"]) == pytest.approx(total, abs=1e-9)
        regrets = [float(r["regret_cum"]) for r in mine]
        assert regrets == sorted(regrets)
        assert all(float(r["nashconv"]) >= 0 for r in mine)
        assert all(r["audit"] == "pass" for r in mine)
        assert all(r["target_visit"] in ("0", "1") for r in mine)


def test_audit_rejects_stochastic():
    cfg = ExperimentConfig(environment="stochastic", episodes=3, seeds=(0,))
    with pytest.raises(ConfigError):
        run_seed(cfg, 1, audit=True)


def test_target_visit_fraction():
    recs = [{"episode": k, "target_visit": 1} for k in range(1, 201)]
    assert target_visit_fraction(recs) == [(1, 1.0), (101, 1.0)]
    alternating = [{"episode": k, "target_visit": k % 2} for k in range(1, 5)]
    assert target_visit_fraction(alternating, 2) == [(1, 0.5), (3, 0.5)]
    with pytest.raises(ValueError):
        target_visit_fraction([{"episode": 1, "target_visit": ""}])


def write_metrics(path, seed_rows, algorithm="a", environment="e"):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for seed, episode, nc in seed_rows:
            w.writerow([seed, episode, repr(nc), repr(nc), "", ""])
    path.with_suffix(".json").write_text(json.dumps({"config": {"algorithm": algorithm, "environment": environment}}))


def test_aggregate_statistics(tmp_path):
    write_metrics(tmp_path / "x.csv", [(0, 1, 0.2), (0, 2, 0.0)])
    write_metrics(tmp_path / "y.csv", [(1, 1, 0.4), (1, 2, 0.3)])
    summary, solve = aggregate([tmp_path / "x.csv", tmp_path / "y.csv"], tmp_path / "s.csv")
    s = rows(summary)
    assert float(s[0]["nashconv_mean"]) == pytest.approx(0.3)
    assert float(s[0]["nashconv_std"]) == pytest.approx(0.1)
    sv = rows(solve)
    assert [r["episodes_to_solve"] for r in sv] == ["2", UNSOLVED, UNSOLVED]
    # order of inputs does not matter
    aggregate([tmp_path / "y.csv", tmp_path / "x.csv"], tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_bytes() == summary.read_bytes()
    assert (tmp_path / "t_solve.csv").read_bytes() == solve.read_bytes()


def test_aggregate_single_input(tmp_path):
    write_metrics(tmp_path / "x.csv", [(0, 1, 0.2), (0, 2, 0.1)])
    summary, _ = aggregate([tmp_path / "x.csv"], tmp_path / "s.csv")
    for r in rows(summary):
        assert float(r["nashconv_std"]) == 0.0
    assert [float(r["nashconv_mean"]) for r in rows(summary)] == [0.2, 0.1]


def test_aggregate_schema_mismatch(tmp_path):
    (tmp_path / "bad.csv").write_text("seed,episode,value\n0,1,2\n")
    with pytest.raises(ValueError):
        aggregate([tmp_path / "bad.csv"], tmp_path / "s.csv")


def test_episodes_to_solve_sustained():
    r = [{"episode": e, "nashconv": v} for e, v in [(1, 0.5), (2, 0.0), (3, 0.1), (4, 0.0), (5, 0.0)]]
    assert episodes_to_solve(r) == 4
    assert episodes_to_solve(r[:3]) is None


def test_mean_std():
    assert mean_std([0.2, 0.4]) == (pytest.approx(0.3), pytest.approx(0.1))


def test_cli_run_aggregate_solve(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "small.cfg"
    cfg.write_text(DECOY_CFG)
    monkeypatch.setenv("STRATEGIC_RL_OUT", str(tmp_path))
    assert main(["run", "--config", str(cfg)]) == 0
    assert (tmp_path / "small.csv").exists()
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o.csv"), "--audit"]) == 0
    assert (tmp_path / "o_audit.csv").exists()
    assert main(["aggregate", str(tmp_path / "small.csv"), "--out", str(tmp_path / "agg.csv")]) == 0
    game = tmp_path / "tree.game"
    save(build_random_tree(TreeGameSpec(2, 2, 0)), game)
    capsys.readouterr()
    assert main(["solve", "--game", str(game)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("value ")


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("bogus = 1\n")
    assert main(["run", "--config", str(bad)]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    good = tmp_path / "good.cfg"
    good.write_text("environment = zspd\nepisodes = 2\n")
    assert main(["run", "--config", str(good), "--out", str(tmp_path / "no" / "x.csv")]) == 2


def test_file_environment(tmp_path):
    game = tmp_path / "t.game"
    save(build_random_tree(TreeGameSpec(2, 3, 1)), game)
    cfg = ExperimentConfig(environment="file", game_path=str(game), episodes=30, seeds=(0,), eval_every=1)
    recs, _ = run_seed(cfg, 0)
    assert len(recs) == 30
