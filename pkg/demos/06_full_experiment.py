"""
A complete miniature experiment
===============================

Both modes end to end on a shrunken configuration: seeded repetitions,
incremental CSV logging, bootstrap summaries, and (if gaitevo-plots is
installed) the four standard figures.
"""

import logging
from pathlib import Path

from gaitevo import make_spec, run_experiment, summarize

logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

out = Path("demo_results")
overrides = {
    "evo": {"population": 6, "offspring": 3, "generations": 5},
    "learner": {"population": 5, "budget": 15, "k_neighbors": 2},
    "sim": {"eval_time": 5.0},
    "repetitions": 2,
}

for mode in ("evo", "evo+learn"):
    spec = make_spec(mode, "desk", master_seed=11, out_dir=out, overrides=overrides)
    run_experiment(spec)

summary = summarize(out)
print("\nfinal-generation fitness per run:")
for row in summary.final_rows:
    print(f"  {row['mode']:10s} run {row['run']}: mean {row['fitness_mean']:.5f} cm/s")

try:
    from gaitevo_plots import render

    for kind in ("progression", "boxplot", "delta", "descriptors"):
        path = render(kind, out, out / f"{kind}.png")
        print(f"wrote {path}")
except ImportError:
    print("gaitevo-plots not installed; skipping figures")
