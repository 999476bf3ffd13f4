"""Render gaitevo summary CSVs as the four standard figure families.

This package talks to the experiment harness only through its versioned CSV
files: anything with the wrong schema line is refused.  Rendering is pure and
repeatable; the same inputs produce byte-identical images.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEMA_VERSION = "v1"
SUMMARY_KIND = "gaitevo-summary"
FINAL_KIND = "gaitevo-final-fitness"

FIGURE_KINDS = ("progression", "boxplot", "delta", "descriptors")

DESCRIPTOR_METRICS = (
    ("absolute_size", "Absolute size"),
    ("width", "Width (cells)"),
    ("proportion", "Proportion"),
    ("n_bricks", "Bricks"),
    ("rel_limbs", "Relative limbs"),
    ("n_active_hinges", "Active hinges"),
)

DEFAULT_STYLE = {
    "colors": {"evo": "tab:blue", "evo+learn": "tab:purple"},
    "fallback_colors": ["tab:green", "tab:orange", "tab:red"],
    "dpi": 120,
    "band_alpha": 0.2,
}


class SchemaMismatch(ValueError):
    """Input CSV does not carry the expected schema line."""


def _read_rows(path: Path, kind: str) -> list[dict[str, str]]:
    expected = f"{kind} {SCHEMA_VERSION}"
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# schema: "):
        raise SchemaMismatch(f"{path}: missing schema line, expected '# schema: {expected}'")
    schema = lines[0][len("# schema: "):].strip()
    if schema != expected:
        raise SchemaMismatch(f"{path}: schema {schema!r} does not match expected {expected!r}")
    header = lines[1].split(",")
    rows = []
    for line in lines[2:]:
        if not line or line.startswith("#"):
            continue
        rows.append(dict(zip(header, line.split(","))))
    return rows


def _num(value: str) -> float:
    return float(value) if value else math.nan


def load_summary(in_dir) -> list[dict]:
    rows = _read_rows(Path(in_dir) / "summary.csv", SUMMARY_KIND)
    parsed = []
    for row in rows:
        entry: dict = {"mode": row["mode"], "generation": int(row["generation"])}
        for key, value in row.items():
            if key not in ("mode", "generation", "n_runs"):
                entry[key] = _num(value)
        parsed.append(entry)
    return parsed


def load_final(in_dir) -> list[dict]:
    rows = _read_rows(Path(in_dir) / "final_fitness.csv", FINAL_KIND)
    return [
        {
            "mode": row["mode"],
            "run": int(row["run"]),
            "fitness_mean": _num(row["fitness_mean"]),
            "fitness_max": _num(row["fitness_max"]),
        }
        for row in rows
    ]


def _style(overrides: dict | None) -> dict:
    style = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DEFAULT_STYLE.items()}
    if overrides:
        for key, value in overrides.items():
            if isinstance(value, dict) and isinstance(style.get(key), dict):
                style[key].update(value)
            else:
                style[key] = value
    return style


def _mode_color(style: dict, mode: str, index: int) -> str:
    colors = style["colors"]
    if mode in colors:
        return colors[mode]
    fallback = style["fallback_colors"]
    return fallback[index % len(fallback)]


def _modes(rows) -> list[str]:
    return sorted({r["mode"] for r in rows})


def _series(rows, mode: str, metric: str):
    sub = sorted((r for r in rows if r["mode"] == mode), key=lambda r: r["generation"])
    gens = np.array([r["generation"] for r in sub])
    mean = np.array([r[metric] for r in sub])
    lo = np.array([r[f"{metric}_lo"] for r in sub])
    hi = np.array([r[f"{metric}_hi"] for r in sub])
    return gens, mean, lo, hi


def _generation_ticks(ax, rows) -> None:
    gens = sorted({r["generation"] for r in rows})
    if 0 < len(gens) <= 15:
        ax.set_xticks(gens)


def _metric_lines(ax, rows, metric: str, style: dict, max_metric: str | None = None) -> None:
    for i, mode in enumerate(_modes(rows)):
        color = _mode_color(style, mode, i)
        gens, mean, lo, hi = _series(rows, mode, metric)
        if np.all(np.isnan(mean)):
            continue
        ax.plot(gens, mean, color=color, linestyle="-", label=f"{mode} mean")
        ax.fill_between(gens, lo, hi, color=color, alpha=style["band_alpha"], linewidth=0)
        if max_metric is not None:
            _, max_mean, _, _ = _series(rows, mode, max_metric)
            ax.plot(gens, max_mean, color=color, linestyle=":", label=f"{mode} max")
    if ax.get_lines():
        ax.legend(fontsize=8)
    _generation_ticks(ax, rows)
    ax.set_xlabel("generation")


def build_progression(in_dir, style: dict) -> plt.Figure:
    rows = load_summary(in_dir)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    _metric_lines(ax, rows, "fitness_mean", style, max_metric="fitness_max")
    ax.set_ylabel("fitness (cm/s)")
    ax.set_title("Fitness progression (mean solid, max dotted, 95% CI shaded)")
    fig.tight_layout()
    return fig


def build_boxplot(in_dir, style: dict) -> plt.Figure:
    rows = load_final(in_dir)
    modes = _modes(rows)
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 4.0))
    for ax, metric, title in zip(axes, ("fitness_mean", "fitness_max"), ("final mean fitness", "final max fitness")):
        data = [[r[metric] for r in rows if r["mode"] == m] for m in modes]
        if modes:
            ax.boxplot(data, tick_labels=modes, showmeans=True)
        ax.set_title(title)
        ax.set_ylabel("fitness (cm/s)")
    fig.tight_layout()
    return fig


def build_delta(in_dir, style: dict) -> plt.Figure:
    rows = load_summary(in_dir)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    _metric_lines(ax, rows, "learning_delta", style)
    ax.set_ylabel("learning delta (cm/s)")
    ax.set_title("Learning delta progression (95% CI shaded)")
    fig.tight_layout()
    return fig


def build_descriptors(in_dir, style: dict) -> plt.Figure:
    rows = load_summary(in_dir)
    fig, axes = plt.subplots(2, 3, figsize=(12.0, 6.5))
    for ax, (metric, label) in zip(axes.ravel(), DESCRIPTOR_METRICS):
        _metric_lines(ax, rows, metric, style)
        ax.set_ylabel(label)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "progression": build_progression,
    "boxplot": build_boxplot,
    "delta": build_delta,
    "descriptors": build_descriptors,
}


def build_figure(kind: str, in_dir, style: dict | None = None) -> plt.Figure:
    if kind not in _BUILDERS:
        raise ValueError(f"unknown figure kind {kind!r}; choose from {FIGURE_KINDS}")
    return _BUILDERS[kind](in_dir, _style(style))


def render(kind: str, in_dir, out_file, style: dict | None = None) -> Path:
    """Build one figure kind from a results directory and write the image."""
    merged = _style(style)
    fig = build_figure(kind, in_dir, style)
    out_file = Path(out_file)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_file, dpi=merged["dpi"])
    plt.close(fig)
    return out_file
