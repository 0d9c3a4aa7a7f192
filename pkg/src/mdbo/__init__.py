"""Military Dog Based Optimizer, baseline metaheuristics, benchmark suite,
evaluation harness and centroid clustering."""

__version__ = "0.1.0"

from .baselines import (  # noqa: E402
    OPTIMIZERS,
    EvolutionStrategy,
    GeneticAlgorithm,
    ParticleSwarmOptimizer,
    PBILOptimizer,
    make_optimizer,
)
from .benchmarks import evaluate, get_benchmark, list_benchmarks  # noqa: E402
from .clustering import CentroidClustering  # noqa: E402
from .core import MdboParams, MilitaryDogOptimizer, RunTrace, SearchSpace, mdbo_run  # noqa: E402
from .rng import RngStream  # noqa: E402

__all__ = [
    "OPTIMIZERS",
    "CentroidClustering",
    "EvolutionStrategy",
    "GeneticAlgorithm",
    "MdboParams",
    "MilitaryDogOptimizer",
    "ParticleSwarmOptimizer",
    "PBILOptimizer",
    "RngStream",
    "RunTrace",
    "SearchSpace",
    "evaluate",
    "get_benchmark",
    "list_benchmarks",
    "make_optimizer",
    "mdbo_run",
]
