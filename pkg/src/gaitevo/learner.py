"""Reversible differential evolution over CPG weights, screened by a K-NN surrogate.

Each round triples the population into 3X candidates, predicts their fitness
from the archive of everything truly evaluated so far, and spends simulator
time only on the X most promising.  The true-evaluation budget includes the
initial population, so a budget of X*g buys g-1 evaluated rounds plus one
final screening-only round.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ArchiveTooSmall(ValueError):
    """Fewer archived evaluations than neighbors requested."""


@dataclass(frozen=True)
class LearnerConfig:
    population: int = 25  # X: vectors kept between rounds
    scale_factor: float = 0.5  # F
    crossover_p: float = 0.9
    k_neighbors: int = 3
    budget: int = 250  # true evaluations, initial population included
    init_sigma: float = 0.2
    bound: float = 1.0

    def __post_init__(self):
        if self.scale_factor <= 0:
            raise ValueError("scale factor must be positive")
        if not 0.0 <= self.crossover_p <= 1.0:
            raise ValueError("crossover probability must be in [0, 1]")
        if self.k_neighbors < 1:
            raise ValueError("need at least one neighbor")
        if self.population < 4:
            raise ValueError("population must be at least 4")
        if self.budget < self.population or self.budget % self.population != 0:
            raise ValueError("budget must be a positive multiple of the population size")

    @property
    def rounds(self) -> int:
        return self.budget // self.population


@dataclass
class EvaluationRecord:
    weights: np.ndarray
    fitness: float
    is_true: bool = True


class Archive:
    """Append-only store of truly evaluated weight vectors; exact duplicates are dropped."""

    def __init__(self):
        self.records: list[EvaluationRecord] = []
        self._seen: set[bytes] = set()

    def __len__(self) -> int:
        return len(self.records)

    def add(self, weights: np.ndarray, fitness: float) -> None:
        key = np.ascontiguousarray(weights).tobytes()
        if key in self._seen:
            return
        self._seen.add(key)
        self.records.append(EvaluationRecord(np.array(weights, dtype=float), float(fitness)))

    def matrix(self) -> np.ndarray:
        return np.array([r.weights for r in self.records])

    def fitnesses(self) -> np.ndarray:
        return np.array([r.fitness for r in self.records])

    def best(self) -> EvaluationRecord:
        if not self.records:
            raise ValueError("archive is empty")
        best = self.records[0]
        for r in self.records[1:]:
            if r.fitness > best.fitness:
                best = r
        return best


def de_mutation(x_i, x_j, x_k, scale_factor: float) -> np.ndarray:
    """Classic differential perturbation: x_i + F (x_j - x_k)."""
    x_i = np.asarray(x_i, dtype=float)
    x_j = np.asarray(x_j, dtype=float)
    x_k = np.asarray(x_k, dtype=float)
    if not x_i.shape == x_j.shape == x_k.shape:
        raise ValueError("vectors must share a dimension")
    return x_i + scale_factor * (x_j - x_k)


def uniform_crossover(y, x_i, p: float, rng: np.random.Generator) -> np.ndarray:
    """Per-dimension Bernoulli(p) mask picks from y, else from x_i."""
    y = np.asarray(y, dtype=float)
    x_i = np.asarray(x_i, dtype=float)
    if y.shape != x_i.shape:
        raise ValueError("vectors must share a dimension")
    mask = rng.random(y.shape) < p
    return np.where(mask, y, x_i)


def revde_triple(x1, x2, x3, scale_factor: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Three chained perturbations from one triplet; y1 and y2 feed the later ones."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x3 = np.asarray(x3, dtype=float)
    y1 = x1 + scale_factor * (x2 - x3)
    y2 = x2 + scale_factor * (x3 - y1)
    y3 = x3 + scale_factor * (y1 - y2)
    return y1, y2, y3


def revde_matrix(scale_factor: float) -> np.ndarray:
    """The 3x3 linear map sending (x1, x2, x3) to (y1, y2, y3) per dimension."""
    if scale_factor <= 0:
        raise ValueError("scale factor must be positive")
    f = scale_factor
    return np.array(
        [
            [1.0, f, -f],
            [-f, 1.0 - f**2, f + f**2],
            [f + f**2, f**3 + f**2 - f, 1.0 - 2.0 * f**2 - f**3],
        ]
    )


def knn_predict(archive: Archive, query, k: int) -> float:
    """Mean true fitness of the k nearest archived vectors; ties keep insertion order."""
    if len(archive) < k:
        raise ArchiveTooSmall(f"archive holds {len(archive)} records, need {k}")
    query = np.asarray(query, dtype=float)
    dists = np.linalg.norm(archive.matrix() - query, axis=1)
    nearest = np.argsort(dists, kind="stable")[:k]
    return float(archive.fitnesses()[nearest].mean())


@dataclass
class BudgetReport:
    generated: int = 0
    truly_evaluated: int = 0


@dataclass
class LearnHistoryRow:
    round: int
    best_true: float
    mean_true: float
    archive_size: int
    true_evaluations: int


@dataclass
class LearnResult:
    weights: np.ndarray
    fitness: float
    report: BudgetReport
    history: list[LearnHistoryRow] = field(default_factory=list)


def learn(initial_weights, evaluator, cfg: LearnerConfig, rng: np.random.Generator) -> LearnResult:
    """Optimize a weight vector starting from the inherited brain.

    evaluator maps a (n, D) matrix to n true fitness values.  The population
    seeds from the inherited vector plus Gaussian perturbations; every round
    generates 3X candidates, surrogate-ranks them, truly evaluates the top X
    while budget remains, and keeps the best X of old and new by true fitness.
    Returns the archive's best.
    """
    w0 = np.clip(np.asarray(initial_weights, dtype=float).ravel(), -cfg.bound, cfg.bound)
    dim = w0.size
    if dim == 0:
        raise ValueError("cannot learn a zero-dimensional weight vector")
    x = cfg.population
    pop = np.empty((x, dim))
    pop[0] = w0
    pop[1:] = np.clip(w0 + rng.normal(0.0, cfg.init_sigma, (x - 1, dim)), -cfg.bound, cfg.bound)
    fit = np.asarray(evaluator(pop), dtype=float)
    archive = Archive()
    for row, f in zip(pop, fit):
        archive.add(row, f)
    report = BudgetReport(generated=0, truly_evaluated=x)
    history = [LearnHistoryRow(0, float(fit.max()), float(fit.mean()), len(archive), report.truly_evaluated)]
    for rnd in range(1, cfg.rounds + 1):
        x2 = pop[rng.permutation(x)]
        x3 = pop[rng.permutation(x)]
        y1, y2, y3 = revde_triple(pop, x2, x3, cfg.scale_factor)
        blocks = []
        for y, base in ((y1, pop), (y2, x2), (y3, x3)):
            mask = rng.random((x, dim)) < cfg.crossover_p
            blocks.append(np.where(mask, y, base))
        candidates = np.clip(np.concatenate(blocks, axis=0), -cfg.bound, cfg.bound)
        report.generated += candidates.shape[0]
        preds = np.array([knn_predict(archive, c, cfg.k_neighbors) for c in candidates])
        n_eval = min(x, cfg.budget - report.truly_evaluated)
        if n_eval > 0:
            chosen = candidates[np.argsort(-preds, kind="stable")[:n_eval]]
            new_fit = np.asarray(evaluator(chosen), dtype=float)
            report.truly_evaluated += n_eval
            for row, f in zip(chosen, new_fit):
                archive.add(row, f)
            pool = np.concatenate([pop, chosen], axis=0)
            pool_fit = np.concatenate([fit, new_fit])
            keep = np.argsort(-pool_fit, kind="stable")[:x]
            pop = pool[keep]
            fit = pool_fit[keep]
        history.append(
            LearnHistoryRow(rnd, float(fit.max()), float(fit.mean()), len(archive), report.truly_evaluated)
        )
    best = archive.best()
    return LearnResult(best.weights.copy(), best.fitness, report, history)
