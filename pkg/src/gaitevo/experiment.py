"""Batch experiment harness: seeded repetitions, versioned CSV logs, summaries.

Run i of an experiment uses seed master_seed + i.  All output files carry a
schema line so downstream consumers can refuse anything they do not
understand.  Wall-clock times go to the log only; file contents are a pure
function of the spec and seed.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy import stats as scipy_stats

from .evolution import (
    DESCRIPTOR_FIELDS,
    EvoConfig,
    EvolutionRun,
    GenerationStats,
    MODES,
    best_individual,
)
from .learner import LearnerConfig
from .locomotion_sim import SimConfig, format_trajectory, simulate
from .morphology import format_body

log = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"
RUNS_SCHEMA = "gaitevo-runs"
SUMMARY_SCHEMA = "gaitevo-summary"
FINAL_SCHEMA = "gaitevo-final-fitness"
SIGNIFICANCE_SCHEMA = "gaitevo-significance"
LEARNING_SCHEMA = "gaitevo-learning"

LEARNING_COLUMNS = (
    "run",
    "generation",
    "individual",
    "round",
    "best_true",
    "mean_true",
    "archive_size",
    "true_evaluations",
)

RUNS_COLUMNS = (
    "run",
    "generation",
    "mode",
    "fitness_mean",
    "fitness_max",
    "fitness_min",
    "learning_delta_mean",
    "absolute_size_mean",
    "width_mean",
    "proportion_mean",
    "n_bricks_mean",
    "rel_limbs_mean",
    "n_active_hinges_mean",
    "true_evaluations",
)

SUMMARY_METRICS = (
    "fitness_mean",
    "fitness_max",
    "learning_delta",
    "absolute_size",
    "width",
    "proportion",
    "n_bricks",
    "rel_limbs",
    "n_active_hinges",
)

PRESET_NAMES = ("paper", "desk")


@dataclass(frozen=True)
class ExperimentSpec:
    mode: str
    evo: EvoConfig
    learner: LearnerConfig
    sim: SimConfig
    repetitions: int
    master_seed: int
    out_dir: Path
    preset: str = "custom"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")


def preset_configs(name: str) -> tuple[EvoConfig, LearnerConfig, SimConfig, int]:
    """(evo, learner, sim, repetitions) for a named scale preset."""
    if name == "paper":
        return EvoConfig(), LearnerConfig(), SimConfig(), 10
    if name == "desk":
        return (
            EvoConfig(population=10, offspring=10, generations=10),
            LearnerConfig(budget=50),
            SimConfig(),
            3,
        )
    raise ValueError(f"unknown preset {name!r}")


def make_spec(
    mode: str,
    preset: str,
    master_seed: int,
    out_dir,
    repetitions: int | None = None,
    overrides: dict | None = None,
) -> ExperimentSpec:
    evo, learner, sim, reps = preset_configs(preset)
    if overrides:
        evo = replace(evo, **overrides.get("evo", {}))
        learner = replace(learner, **overrides.get("learner", {}))
        sim = replace(sim, **overrides.get("sim", {}))
        reps = overrides.get("repetitions", reps)
    if repetitions is not None:
        reps = repetitions
    return ExperimentSpec(
        mode=mode,
        evo=evo,
        learner=learner,
        sim=sim,
        repetitions=reps,
        master_seed=master_seed,
        out_dir=Path(out_dir),
        preset=preset,
    )


@dataclass
class RunSummary:
    run: int
    final_fitness_mean: float
    final_fitness_max: float
    true_evaluations: int
    wall_time_s: float


@dataclass
class ExperimentLog:
    spec: ExperimentSpec
    stats: list[GenerationStats]
    run_summaries: list[RunSummary]


def mode_slug(mode: str) -> str:
    return mode.replace("+", "_")


def runs_csv_path(out_dir, mode: str) -> Path:
    return Path(out_dir) / f"runs_{mode_slug(mode)}.csv"


def _schema_line(kind: str) -> str:
    return f"# schema: {kind} {SCHEMA_VERSION}\n"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    return format(v, ".10g")


def _runs_row(row: GenerationStats) -> str:
    fields = [
        str(row.run_id),
        str(row.generation),
        row.mode,
        _fmt(row.fitness_mean),
        _fmt(row.fitness_max),
        _fmt(row.fitness_min),
        _fmt(row.learning_delta_mean),
    ]
    fields.extend(_fmt(row.descriptor_means[name]) for name in DESCRIPTOR_FIELDS)
    fields.append(str(row.true_evaluations))
    return ",".join(fields) + "\n"


def run_experiment(spec: ExperimentSpec, trajectories: bool = False) -> ExperimentLog:
    """Execute all repetitions, appending one CSV row per generation as it completes."""
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    path = runs_csv_path(spec.out_dir, spec.mode)
    all_stats: list[GenerationStats] = []
    summaries: list[RunSummary] = []
    fh = open(path, "w")
    learn_fh = None
    if spec.mode == "evo+learn":
        learn_fh = open(spec.out_dir / f"learning_{mode_slug(spec.mode)}.csv", "w")
        learn_fh.write(_schema_line(LEARNING_SCHEMA))
        learn_fh.write(",".join(LEARNING_COLUMNS) + "\n")
    try:
        fh.write(_schema_line(RUNS_SCHEMA))
        fh.write(",".join(RUNS_COLUMNS) + "\n")

        def on_generation(row: GenerationStats) -> None:
            all_stats.append(row)
            fh.write(_runs_row(row))
            fh.flush()

        def on_learning(run_id, generation, individual, history) -> None:
            for row in history:
                learn_fh.write(
                    f"{run_id},{generation},{individual},{row.round},"
                    f"{_fmt(row.best_true)},{_fmt(row.mean_true)},"
                    f"{row.archive_size},{row.true_evaluations}\n"
                )

        for i in range(spec.repetitions):
            t0 = time.perf_counter()
            run = EvolutionRun(
                spec.mode,
                spec.evo,
                spec.learner,
                spec.sim,
                seed=spec.master_seed + i,
                run_id=i,
                on_learning=on_learning if learn_fh is not None else None,
            )
            result = run.run(on_generation=on_generation)
            wall = time.perf_counter() - t0
            final = result.stats[-1]
            summaries.append(
                RunSummary(i, final.fitness_mean, final.fitness_max, result.true_evaluations, wall)
            )
            log.info(
                "run %d/%d (%s, seed %d): best %.4f cm/s, %d evaluations, %.1f s",
                i + 1,
                spec.repetitions,
                spec.mode,
                spec.master_seed + i,
                final.fitness_max,
                result.true_evaluations,
                wall,
            )
            if trajectories:
                _dump_best(spec, i, result.population)
    except OSError:
        try:
            fh.write("# partial-log: run aborted\n")
        except OSError:
            pass
        raise
    finally:
        fh.close()
        if learn_fh is not None:
            learn_fh.close()
    mean_best = float(np.mean([s.final_fitness_max for s in summaries]))
    log.info(
        "%s: mean best fitness %.4f cm/s averaged over %d repetitions",
        spec.mode,
        mean_best,
        spec.repetitions,
    )
    return ExperimentLog(spec, all_stats, summaries)


def _dump_best(spec: ExperimentSpec, run_index: int, population) -> None:
    best = best_individual(population)
    fitness, traj = simulate(best.body, best.weights, spec.sim)
    slug = mode_slug(spec.mode)
    traj_path = spec.out_dir / f"best_{slug}_run{run_index}_trajectory.txt"
    traj_path.write_text(format_trajectory(traj, spec.sim.dt))
    body_path = spec.out_dir / f"best_{slug}_run{run_index}_body.txt"
    body_path.write_text(format_body(best.body))
    log.info("run %d best robot: %.4f cm/s, artifacts in %s", run_index, fitness, spec.out_dir)


def read_runs_csv(path) -> list[dict]:
    """Parse a runs CSV back into row dicts (floats where applicable)."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# schema: "):
        raise ValueError(f"{path}: missing schema line")
    schema = lines[0][len("# schema: "):].strip()
    expected = f"{RUNS_SCHEMA} {SCHEMA_VERSION}"
    if schema != expected:
        raise ValueError(f"{path}: schema {schema!r} does not match expected {expected!r}")
    header = lines[1].split(",")
    rows = []
    for line in lines[2:]:
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        row: dict = {}
        for name, value in zip(header, parts):
            if name in ("run", "generation", "true_evaluations"):
                row[name] = int(value)
            elif name == "mode":
                row[name] = value
            else:
                row[name] = float(value) if value else math.nan
        rows.append(row)
    return rows


def bootstrap_ci(
    values: np.ndarray,
    n_resamples: int = 1000,
    rng: np.random.Generator | None = None,
) -> tuple[float, float, float]:
    """(mean, lo, hi): percentile bootstrap 95% interval of the mean."""
    values = np.asarray(values, dtype=float)
    if values.size == 0 or np.all(np.isnan(values)):
        return math.nan, math.nan, math.nan
    if rng is None:
        rng = np.random.default_rng(0)
    mean = float(values.mean())
    idx = rng.integers(0, values.size, (n_resamples, values.size))
    means = values[idx].mean(axis=1)
    lo, hi = np.percentile(means, [2.5, 97.5])
    return mean, float(lo), float(hi)


_RUNS_METRIC_COLUMN = {
    "fitness_mean": "fitness_mean",
    "fitness_max": "fitness_max",
    "learning_delta": "learning_delta_mean",
    "absolute_size": "absolute_size_mean",
    "width": "width_mean",
    "proportion": "proportion_mean",
    "n_bricks": "n_bricks_mean",
    "rel_limbs": "rel_limbs_mean",
    "n_active_hinges": "n_active_hinges_mean",
}


@dataclass
class Summary:
    per_generation: list[dict]  # mode, generation, n_runs, metric -> (mean, lo, hi)
    final_rows: list[dict]  # mode, run, fitness_mean, fitness_max
    significance: list[dict]


def summarize(
    in_dir,
    out_dir=None,
    bootstrap_samples: int = 1000,
    bootstrap_seed: int = 0,
) -> Summary:
    """Aggregate every runs CSV in a directory and write the summary files."""
    in_dir = Path(in_dir)
    out_dir = Path(out_dir) if out_dir is not None else in_dir
    files = sorted(in_dir.glob("runs_*.csv"))
    if not files:
        raise FileNotFoundError(f"no runs_*.csv files in {in_dir}")
    rng = np.random.default_rng(bootstrap_seed)
    per_generation = []
    final_rows = []
    mode_final: dict[str, dict[str, np.ndarray]] = {}
    for path in files:
        rows = read_runs_csv(path)
        if not rows:
            continue
        mode = rows[0]["mode"]
        generations = sorted({r["generation"] for r in rows})
        runs = sorted({r["run"] for r in rows})
        for gen in generations:
            at_gen = [r for r in rows if r["generation"] == gen]
            entry: dict = {"mode": mode, "generation": gen, "n_runs": len(at_gen)}
            for metric in SUMMARY_METRICS:
                col = _RUNS_METRIC_COLUMN[metric]
                vals = np.array([r[col] for r in at_gen])
                entry[metric] = bootstrap_ci(vals, bootstrap_samples, rng)
            per_generation.append(entry)
        last = max(generations)
        finals_mean = []
        finals_max = []
        for run in runs:
            final = next(r for r in rows if r["run"] == run and r["generation"] == last)
            final_rows.append(
                {
                    "mode": mode,
                    "run": run,
                    "fitness_mean": final["fitness_mean"],
                    "fitness_max": final["fitness_max"],
                }
            )
            finals_mean.append(final["fitness_mean"])
            finals_max.append(final["fitness_max"])
        mode_final[mode] = {
            "fitness_mean": np.array(finals_mean),
            "fitness_max": np.array(finals_max),
        }
    significance = []
    modes = sorted(mode_final)
    for i in range(len(modes)):
        for j in range(i + 1, len(modes)):
            a, b = modes[i], modes[j]
            for metric in ("fitness_mean", "fitness_max"):
                res = scipy_stats.mannwhitneyu(
                    mode_final[a][metric],
                    mode_final[b][metric],
                    alternative="two-sided",
                    method="exact",
                )
                significance.append(
                    {
                        "metric": metric,
                        "mode_a": a,
                        "mode_b": b,
                        "n_a": mode_final[a][metric].size,
                        "n_b": mode_final[b][metric].size,
                        "u_statistic": float(res.statistic),
                        "p_value": float(res.pvalue),
                    }
                )
    summary = Summary(per_generation, final_rows, significance)
    _write_summary_files(summary, out_dir)
    return summary


def _write_summary_files(summary: Summary, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [_schema_line(SUMMARY_SCHEMA)]
    cols = ["mode", "generation", "n_runs"]
    for metric in SUMMARY_METRICS:
        cols.extend([metric, f"{metric}_lo", f"{metric}_hi"])
    lines.append(",".join(cols) + "\n")
    for entry in summary.per_generation:
        fields = [entry["mode"], str(entry["generation"]), str(entry["n_runs"])]
        for metric in SUMMARY_METRICS:
            mean, lo, hi = entry[metric]
            fields.extend([_fmt(mean), _fmt(lo), _fmt(hi)])
        lines.append(",".join(fields) + "\n")
    (out_dir / "summary.csv").write_text("".join(lines))

    lines = [_schema_line(FINAL_SCHEMA), "mode,run,fitness_mean,fitness_max\n"]
    for row in summary.final_rows:
        lines.append(
            f"{row['mode']},{row['run']},{_fmt(row['fitness_mean'])},{_fmt(row['fitness_max'])}\n"
        )
    (out_dir / "final_fitness.csv").write_text("".join(lines))

    lines = [_schema_line(SIGNIFICANCE_SCHEMA), "metric,mode_a,mode_b,n_a,n_b,u_statistic,p_value\n"]
    for row in summary.significance:
        lines.append(
            f"{row['metric']},{row['mode_a']},{row['mode_b']},{row['n_a']},{row['n_b']},"
            f"{_fmt(row['u_statistic'])},{_fmt(row['p_value'])}\n"
        )
    (out_dir / "significance.csv").write_text("".join(lines))
