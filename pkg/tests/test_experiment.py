import json
import math

import numpy as np
import pytest

from gaitevo.cli import main as cli_main
from gaitevo.evolution import MODE_EVOLUTION, MODE_EVOLUTION_LEARNING
from gaitevo.experiment import (
    ExperimentSpec,
    bootstrap_ci,
    make_spec,
    preset_configs,
    read_runs_csv,
    run_experiment,
    runs_csv_path,
    summarize,
)

TINY_OVERRIDES = {
    "evo": {"population": 4, "offspring": 2, "generations": 3},
    "learner": {"population": 4, "budget": 8, "k_neighbors": 2},
    "sim": {"eval_time": 2.0},
    "repetitions": 2,
}


def tiny_spec(mode, out_dir, seed=0, reps=None):
    return make_spec(mode, "desk", seed, out_dir, repetitions=reps, overrides=TINY_OVERRIDES)


def test_paper_preset_matches_reported_parameters():
    evo, learner, sim, reps = preset_configs("paper")
    assert (evo.population, evo.offspring, evo.generations) == (50, 25, 30)
    assert (evo.mutation_p, evo.crossover_p, evo.tournament) == (0.8, 0.8, 2)
    assert (learner.population, learner.scale_factor) == (25, 0.5)
    assert (learner.crossover_p, learner.k_neighbors, learner.budget) == (0.9, 3, 250)
    assert sim.eval_time == 30.0
    assert reps == 10


def test_desk_preset_shrinks_budgets():
    evo, learner, sim, reps = preset_configs("desk")
    assert (evo.population, evo.offspring, evo.generations) == (10, 10, 10)
    assert learner.budget == 50
    assert reps == 3
    with pytest.raises(ValueError):
        preset_configs("galactic")


def test_spec_validation():
    with pytest.raises(ValueError):
        make_spec("warp", "desk", 0, "/tmp/x")
    with pytest.raises(ValueError):
        tiny_spec(MODE_EVOLUTION, "/tmp/x", reps=0)


def test_run_experiment_writes_versioned_csv(tmp_path):
    spec = tiny_spec(MODE_EVOLUTION, tmp_path)
    log = run_experiment(spec)
    path = runs_csv_path(tmp_path, MODE_EVOLUTION)
    lines = path.read_text().splitlines()
    assert lines[0] == "# schema: gaitevo-runs v1"
    assert lines[1].startswith("run,generation,mode,")
    # row count = repetitions x generations
    assert len(lines) == 2 + 2 * 3
    assert len(log.stats) == 6
    assert len(log.run_summaries) == 2
    rows = read_runs_csv(path)
    assert [r["generation"] for r in rows] == [1, 2, 3, 1, 2, 3]
    assert all(r["mode"] == MODE_EVOLUTION for r in rows)
    # budget formula: population + offspring * generation, cumulative
    assert rows[0]["true_evaluations"] == 4 + 2
    assert rows[2]["true_evaluations"] == 4 + 2 * 3


def test_learning_csv_written_in_learning_mode(tmp_path):
    run_experiment(tiny_spec(MODE_EVOLUTION_LEARNING, tmp_path))
    learn_path = tmp_path / "learning_evo_learn.csv"
    lines = learn_path.read_text().splitlines()
    assert lines[0] == "# schema: gaitevo-learning v1"
    assert lines[1] == "run,generation,individual,round,best_true,mean_true,archive_size,true_evaluations"
    assert len(lines) > 2
    # first logged learning belongs to run 0's initial population, round 0
    first = lines[2].split(",")
    assert first[0] == "0" and first[1] == "0" and first[3] == "0"

    evo_dir = tmp_path / "evo"
    run_experiment(tiny_spec(MODE_EVOLUTION, evo_dir))
    assert not (evo_dir / "learning_evo.csv").exists()


def test_rerun_same_seed_is_byte_identical(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    run_experiment(tiny_spec(MODE_EVOLUTION_LEARNING, a_dir, seed=5))
    run_experiment(tiny_spec(MODE_EVOLUTION_LEARNING, b_dir, seed=5))
    names = sorted(p.name for p in a_dir.glob("*.csv"))
    assert names == ["learning_evo_learn.csv", "runs_evo_learn.csv"]
    for name in names:
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes()


def test_different_seed_changes_log(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    run_experiment(tiny_spec(MODE_EVOLUTION, a_dir, seed=1))
    run_experiment(tiny_spec(MODE_EVOLUTION, b_dir, seed=2))
    a = runs_csv_path(a_dir, MODE_EVOLUTION).read_bytes()
    b = runs_csv_path(b_dir, MODE_EVOLUTION).read_bytes()
    assert a != b


def test_read_runs_csv_rejects_wrong_schema(tmp_path):
    bad = tmp_path / "runs_evo.csv"
    bad.write_text("# schema: gaitevo-runs v999\nrun,generation\n")
    with pytest.raises(ValueError, match="v1"):
        read_runs_csv(bad)
    bad.write_text("run,generation\n")
    with pytest.raises(ValueError, match="schema"):
        read_runs_csv(bad)


def test_bootstrap_ci_degenerate_cases():
    mean, lo, hi = bootstrap_ci(np.array([2.0, 2.0, 2.0]), rng=np.random.default_rng(0))
    assert (mean, lo, hi) == (2.0, 2.0, 2.0)
    mean, lo, hi = bootstrap_ci(np.array([7.0]), rng=np.random.default_rng(0))
    assert (mean, lo, hi) == (7.0, 7.0, 7.0)
    mean, lo, hi = bootstrap_ci(np.array([]))
    assert math.isnan(mean)


def test_bootstrap_ci_reproducible():
    values = np.random.default_rng(3).normal(size=10)
    a = bootstrap_ci(values, rng=np.random.default_rng(42))
    b = bootstrap_ci(values, rng=np.random.default_rng(42))
    assert a == b
    assert a[1] <= a[0] <= a[2]


def test_summarize_writes_all_files(tmp_path):
    run_experiment(tiny_spec(MODE_EVOLUTION, tmp_path, seed=3))
    run_experiment(tiny_spec(MODE_EVOLUTION_LEARNING, tmp_path, seed=3))
    summary = summarize(tmp_path)
    for name in ("summary.csv", "final_fitness.csv", "significance.csv"):
        assert (tmp_path / name).exists()
    head = (tmp_path / "summary.csv").read_text().splitlines()[0]
    assert head == "# schema: gaitevo-summary v1"
    modes = {e["mode"] for e in summary.per_generation}
    assert modes == {MODE_EVOLUTION, MODE_EVOLUTION_LEARNING}
    # 2 modes x 3 generations
    assert len(summary.per_generation) == 6
    # 2 modes x 2 runs
    assert len(summary.final_rows) == 4
    assert len(summary.significance) == 2
    for row in summary.significance:
        assert 0.0 <= row["p_value"] <= 1.0


def test_summarize_single_run_ci_collapses(tmp_path):
    run_experiment(tiny_spec(MODE_EVOLUTION, tmp_path, seed=9, reps=1))
    summary = summarize(tmp_path)
    for entry in summary.per_generation:
        mean, lo, hi = entry["fitness_mean"]
        assert mean == lo == hi


def test_summarize_deterministic(tmp_path):
    run_experiment(tiny_spec(MODE_EVOLUTION, tmp_path, seed=4))
    summarize(tmp_path, bootstrap_seed=1)
    first = (tmp_path / "summary.csv").read_bytes()
    summarize(tmp_path, bootstrap_seed=1)
    assert (tmp_path / "summary.csv").read_bytes() == first


def test_summarize_requires_runs(tmp_path):
    with pytest.raises(FileNotFoundError):
        summarize(tmp_path)


def test_cli_run_and_summarize(tmp_path):
    cfg_path = tmp_path / "tiny.json"
    cfg_path.write_text(json.dumps(TINY_OVERRIDES))
    out = tmp_path / "out"
    rc = cli_main(
        [
            "run",
            "--mode",
            "evo",
            "--preset",
            "desk",
            "--seed",
            "0",
            "--out",
            str(out),
            "--config",
            str(cfg_path),
            "--trajectories",
        ]
    )
    assert rc == 0
    assert runs_csv_path(out, "evo").exists()
    assert (out / "best_evo_run0_trajectory.txt").exists()
    assert (out / "best_evo_run0_body.txt").exists()
    rc = cli_main(["summarize", "--in", str(out)])
    assert rc == 0
    assert (out / "summary.csv").exists()
