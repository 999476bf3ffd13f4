"""Outer evolutionary loop over robot bodies and brains.

Two modes: evolution only (offspring keep their inherited brain) and
evolution plus learning (each newborn's brain is optimized before it can
reproduce, and the fitness gain over the inherited brain is its learning
delta).  Every offspring draws its own rng stream from the master seed, so
offspring could be produced in parallel without changing any result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import locomotion_sim
from .learner import LearnerConfig, learn
from .locomotion_sim import SimConfig
from .lsystem import Genotype, crossover, mutate, random_genotype, rewrite
from .morphology import BodyPlan, DescriptorVector, EmptyBody, core_only_body, decode, descriptors

MODE_EVOLUTION = "evo"
MODE_EVOLUTION_LEARNING = "evo+learn"
MODES = (MODE_EVOLUTION, MODE_EVOLUTION_LEARNING)

POLICY_MU_PLUS_LAMBDA = "parents+offspring"
POLICY_TOP_PARENTS = "top-parents+offspring"


class MissingBaseline(ValueError):
    """Learning delta requested for an individual that never learned."""


@dataclass(frozen=True)
class EvoConfig:
    population: int = 50
    offspring: int = 25
    generations: int = 30
    mutation_p: float = 0.8
    crossover_p: float = 0.8
    tournament: int = 2
    survivor_policy: str = POLICY_MU_PLUS_LAMBDA
    rewrite_iterations: int = 3
    max_symbols: int = 30
    max_modules: int = 15
    learn_initial_population: bool = True

    def __post_init__(self):
        if min(self.population, self.offspring, self.generations, self.tournament) < 1:
            raise ValueError("population, offspring, generations, tournament must be positive")
        if self.tournament > self.population:
            raise ValueError("tournament cannot exceed the population size")
        if self.survivor_policy not in (POLICY_MU_PLUS_LAMBDA, POLICY_TOP_PARENTS):
            raise ValueError(f"unknown survivor policy {self.survivor_policy!r}")


@dataclass
class Individual:
    id: int
    genotype: Genotype
    body: BodyPlan
    weights: np.ndarray
    descriptors: DescriptorVector
    fitness: float = math.nan
    pre_learning_fitness: float | None = None
    parents: tuple[int, ...] = ()
    born: int = 0


class SimEvaluator:
    """Simulator front-end counting every true fitness evaluation."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.count = 0

    def evaluate(self, body: BodyPlan, weights) -> float:
        self.count += 1
        return locomotion_sim.evaluate(body, weights, self.cfg)

    def evaluate_batch(self, body: BodyPlan, weights) -> np.ndarray:
        weights = np.atleast_2d(np.asarray(weights, dtype=float))
        self.count += weights.shape[0]
        return locomotion_sim.evaluate_batch(body, weights, self.cfg)


def binary_tournament(population: list[Individual], rng: np.random.Generator, size: int = 2) -> Individual:
    """Sample `size` with replacement, return the fittest; ties go to the earlier draw."""
    if not population:
        raise ValueError("population is empty")
    picks = rng.integers(0, len(population), size)
    best = population[picks[0]]
    for i in picks[1:]:
        if population[i].fitness > best.fitness:
            best = population[i]
    return best


def inherited_weights(genotype: Genotype, n_joints: int) -> np.ndarray:
    """Brain inherited by a body: genotype weight triples flattened in canonical
    order, assigned joint by joint, zero-padded or truncated to 3N."""
    out = np.zeros(3 * n_joints)
    triples = genotype.weight_triples()
    if triples:
        flat = np.concatenate(triples)
        take = min(flat.size, out.size)
        out[:take] = flat[:take]
    return out


def develop(genotype: Genotype, cfg: EvoConfig) -> BodyPlan:
    """Genotype to body; a degenerate decode collapses to the bare core."""
    symbols = rewrite(genotype.grammar, cfg.rewrite_iterations, cfg.max_symbols)
    try:
        return decode(symbols, cfg.max_modules)
    except EmptyBody:
        return core_only_body()


def reproduce(
    a: Individual,
    b: Individual,
    cfg: EvoConfig,
    rng: np.random.Generator,
    child_id: int = 0,
    born: int = 0,
) -> Individual:
    """Create one unevaluated child from two parents."""
    if rng.random() < cfg.crossover_p:
        genotype = crossover(a.genotype, b.genotype, rng)
    else:
        genotype = a.genotype.copy()
    if rng.random() < cfg.mutation_p:
        genotype = mutate(genotype, rng)
    body = develop(genotype, cfg)
    return Individual(
        id=child_id,
        genotype=genotype,
        body=body,
        weights=inherited_weights(genotype, body.n_joints),
        descriptors=descriptors(body),
        parents=(a.id, b.id),
        born=born,
    )


def learning_delta(ind: Individual) -> float:
    """Post-learning minus pre-learning fitness of the same body."""
    if ind.pre_learning_fitness is None:
        raise MissingBaseline(f"individual {ind.id} has no pre-learning baseline")
    return ind.fitness - ind.pre_learning_fitness


@dataclass
class GenerationStats:
    run_id: int
    generation: int
    mode: str
    fitness_mean: float
    fitness_max: float
    fitness_min: float
    learning_delta_mean: float  # nan in evolution-only mode
    descriptor_means: dict[str, float]
    true_evaluations: int
    offspring_deltas: tuple[float, ...] = ()


DESCRIPTOR_FIELDS = ("absolute_size", "width", "proportion", "n_bricks", "rel_limbs", "n_active_hinges")


def _population_stats(
    run_id: int,
    generation: int,
    mode: str,
    population: list[Individual],
    deltas: tuple[float, ...],
    true_evaluations: int,
) -> GenerationStats:
    fits = np.array([ind.fitness for ind in population])
    desc = {
        name: float(np.mean([getattr(ind.descriptors, name) for ind in population]))
        for name in DESCRIPTOR_FIELDS
    }
    delta_mean = float(np.mean(deltas)) if deltas else math.nan
    return GenerationStats(
        run_id=run_id,
        generation=generation,
        mode=mode,
        fitness_mean=float(fits.mean()),
        fitness_max=float(fits.max()),
        fitness_min=float(fits.min()),
        learning_delta_mean=delta_mean,
        descriptor_means=desc,
        true_evaluations=true_evaluations,
        offspring_deltas=deltas,
    )


@dataclass
class RunResult:
    stats: list[GenerationStats]
    population: list[Individual]
    true_evaluations: int
    learned_count: int = 0
    created_count: int = 0


class EvolutionRun:
    """One seeded evolutionary run."""

    def __init__(
        self,
        mode: str,
        evo_cfg: EvoConfig,
        learner_cfg: LearnerConfig,
        sim_cfg: SimConfig,
        seed: int,
        run_id: int = 0,
        on_learning=None,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.evo_cfg = evo_cfg
        self.learner_cfg = learner_cfg
        self.evaluator = SimEvaluator(sim_cfg)
        self.seed = seed
        self.run_id = run_id
        # on_learning(run_id, generation, individual_id, history rows)
        self.on_learning = on_learning
        self.population: list[Individual] = []
        self.learned_count = 0
        self._next_id = 0

    def _stream(self, generation: int, slot: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(generation, slot)))

    def _assign_fitness(self, ind: Individual, rng: np.random.Generator, do_learn: bool) -> None:
        if self.mode == MODE_EVOLUTION or not do_learn:
            ind.fitness = self.evaluator.evaluate(ind.body, ind.weights)
            return
        pre = self.evaluator.evaluate(ind.body, ind.weights)
        ind.pre_learning_fitness = pre
        if ind.body.n_joints == 0:
            # nothing to learn: degenerate or jointless bodies keep fitness 0
            ind.fitness = pre
            return
        body = ind.body
        self.learned_count += 1
        result = learn(
            ind.weights,
            lambda w: self.evaluator.evaluate_batch(body, w),
            self.learner_cfg,
            rng,
        )
        if self.on_learning is not None:
            self.on_learning(self.run_id, ind.born, ind.id, result.history)
        if result.fitness >= pre:
            ind.weights = result.weights
            ind.fitness = result.fitness
        else:  # unreachable in exact arithmetic; guards the delta >= 0 contract
            ind.fitness = pre

    def initialize(self) -> None:
        learn_now = self.evo_cfg.learn_initial_population
        for i in range(self.evo_cfg.population):
            rng = self._stream(0, i)
            genotype = random_genotype(rng)
            body = develop(genotype, self.evo_cfg)
            ind = Individual(
                id=self._next_id,
                genotype=genotype,
                body=body,
                weights=inherited_weights(genotype, body.n_joints),
                descriptors=descriptors(body),
                born=0,
            )
            self._next_id += 1
            self._assign_fitness(ind, rng, do_learn=learn_now)
            self.population.append(ind)

    def _select_survivors(self, parents: list[Individual], offspring: list[Individual]) -> list[Individual]:
        key = lambda ind: (-ind.fitness, -ind.born, ind.id)
        if self.evo_cfg.survivor_policy == POLICY_MU_PLUS_LAMBDA:
            pool = sorted(parents + offspring, key=key)
            return pool[: self.evo_cfg.population]
        n_top = max(0, self.evo_cfg.population - len(offspring))
        top_parents = sorted(parents, key=key)[:n_top]
        return sorted(top_parents + offspring, key=key)[: self.evo_cfg.population]

    def run_generation(self, generation: int) -> GenerationStats:
        offspring = []
        for j in range(self.evo_cfg.offspring):
            rng = self._stream(generation, j)
            a = binary_tournament(self.population, rng, self.evo_cfg.tournament)
            b = binary_tournament(self.population, rng, self.evo_cfg.tournament)
            child = reproduce(a, b, self.evo_cfg, rng, child_id=self._next_id, born=generation)
            self._next_id += 1
            self._assign_fitness(child, rng, do_learn=True)
            offspring.append(child)
        self.population = self._select_survivors(self.population, offspring)
        deltas = ()
        if self.mode == MODE_EVOLUTION_LEARNING:
            deltas = tuple(learning_delta(child) for child in offspring)
        return _population_stats(
            self.run_id, generation, self.mode, self.population, deltas, self.evaluator.count
        )

    def run(self, on_generation=None) -> RunResult:
        self.initialize()
        stats = []
        for g in range(1, self.evo_cfg.generations + 1):
            row = self.run_generation(g)
            stats.append(row)
            if on_generation is not None:
                on_generation(row)
        return RunResult(
            stats, self.population, self.evaluator.count, self.learned_count, self._next_id
        )


def best_individual(population: list[Individual]) -> Individual:
    return min(population, key=lambda ind: (-ind.fitness, -ind.born, ind.id))
