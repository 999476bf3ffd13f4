"""
Gait learning on a fixed body
=============================

Reversible differential evolution triples the population into candidates,
a K-nearest-neighbor surrogate predicts their fitness from everything seen
so far, and only the most promising quarter earns real simulator time.
"""

import numpy as np

from gaitevo import LearnerConfig, SimConfig, evaluate, evaluate_batch, learn
from gaitevo.evolution import EvoConfig, develop, inherited_weights
from gaitevo.lsystem import random_genotype

sim = SimConfig()
genotype = random_genotype(np.random.default_rng(2))
body = develop(genotype, EvoConfig())
inherited = inherited_weights(genotype, body.n_joints)
print(f"body: {len(body.modules)} modules, {body.n_joints} joints")

before = evaluate(body, inherited, sim)
result = learn(
    inherited,
    lambda batch: evaluate_batch(body, batch, sim),
    LearnerConfig(),
    np.random.default_rng(0),
)
print(f"inherited brain: {before:.5f} cm/s")
print(f"learned brain:   {result.fitness:.5f} cm/s")
print(f"budget: {result.report.generated} candidates generated, "
      f"{result.report.truly_evaluated} truly evaluated")
print("\nper-round progress:")
for row in result.history:
    print(
        f"  round {row.round:2d}: best {row.best_true:.5f}  mean {row.mean_true:.5f}  "
        f"archive {row.archive_size:3d}  true evals {row.true_evaluations}"
    )
