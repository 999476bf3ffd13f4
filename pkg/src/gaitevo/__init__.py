"""gaitevo: joint evolution of planar modular robot bodies and CPG brains.

L-system genotypes grow into grid bodies whose active hinges are driven by
per-joint oscillators; a deterministic least-slip crawling model scores gaits
in cm/s.  Evolution can run alone or wrap a surrogate-screened differential
evolution learner around every newborn's brain.
"""

from .controller import CpgNetwork, DimensionMismatch, init_network, integrate_outputs
from .evolution import (
    EvoConfig,
    EvolutionRun,
    Individual,
    MODE_EVOLUTION,
    MODE_EVOLUTION_LEARNING,
    MissingBaseline,
    binary_tournament,
    best_individual,
    inherited_weights,
    learning_delta,
    reproduce,
)
from .experiment import ExperimentSpec, make_spec, run_experiment, summarize
from .learner import (
    Archive,
    ArchiveTooSmall,
    EvaluationRecord,
    LearnerConfig,
    de_mutation,
    knn_predict,
    learn,
    revde_matrix,
    revde_triple,
    uniform_crossover,
)
from .locomotion_sim import (
    SimConfig,
    Trajectory,
    crawl_step,
    evaluate,
    evaluate_batch,
    forward_kinematics,
    simulate,
)
from .lsystem import (
    Genotype,
    Grammar,
    crossover,
    format_genotype,
    mutate,
    parse_genotype,
    random_genotype,
    rewrite,
)
from .morphology import (
    BodyPlan,
    DescriptorVector,
    EmptyBody,
    Module,
    ModuleKind,
    decode,
    descriptors,
    format_body,
)

__version__ = "0.1.0"
