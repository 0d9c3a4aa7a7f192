"""Comparison optimizers: PSO, GA, real-coded PBIL and a (mu + lambda) ES.

All four share the ``minimize`` interface of :class:`~mdbo.core.BaseOptimizer`
and the same elitist bookkeeping as MDBO, so any of them can be swapped in by
name.
"""

import numpy as np

from .core import BaseOptimizer, MilitaryDogOptimizer, Squad, _Tracker, apply_elitism, clamp

__all__ = [
    "ParticleSwarmOptimizer",
    "GeneticAlgorithm",
    "PBILOptimizer",
    "EvolutionStrategy",
    "OPTIMIZERS",
    "make_optimizer",
]


def _check_common(m, iterations, keep):
    if m < 2:
        raise ValueError("population size must be at least 2")
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if not 0 <= keep < m:
        raise ValueError("keep must satisfy 0 <= keep < m")


def _check_probability(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1]")


class ParticleSwarmOptimizer(BaseOptimizer):
    """Global-best PSO with velocities clamped to half the box width.

    The personal-best archive already keeps every particle's best point, so
    ``keep`` is validated but positions are never overwritten by elites;
    doing so would desynchronize positions from their velocities.
    """

    name = "pso"

    def __init__(self, m=50, iterations=500, w=1.0, c1=1.0, c2=1.0, keep=2,
                 random_state=None):
        self.m = m
        self.iterations = iterations
        self.w = w
        self.c1 = c1
        self.c2 = c2
        self.keep = keep
        self.random_state = random_state

    def _run(self, space, evaluate, rng, callback):
        _check_common(self.m, self.iterations, self.keep)
        m, d = self.m, space.dim
        vmax = 0.5 * space.width
        x = space.sample(rng, m)
        v = (2.0 * rng.uniform((m, d)) - 1.0) * vmax
        f = evaluate(x)
        pbest, pbest_f = x.copy(), f.copy()
        tracker = _Tracker(self.iterations, callback)
        tracker.offer(x, f)

        for t in range(self.iterations):
            g = pbest[np.argmin(pbest_f)]
            r1 = rng.uniform((m, d))
            r2 = rng.uniform((m, d))
            v = self.w * v + self.c1 * r1 * (pbest - x) + self.c2 * r2 * (g - x)
            v = np.clip(v, -vmax, vmax)
            x = clamp(x + v, space)
            f = evaluate(x)

            better = f < pbest_f
            pbest[better] = x[better]
            pbest_f[better] = f[better]
            tracker.record(t, x, f)
        return tracker.trace(evaluate.count)


class GeneticAlgorithm(BaseOptimizer):
    """Real-coded GA: binary tournaments, uniform crossover, Gaussian mutation.

    Each gene mutates with probability ``mutation_probability`` by a normal
    step whose scale is ``mutation_scale`` times the box width.
    """

    name = "ga"

    def __init__(self, m=50, iterations=500, mutation_probability=0.1,
                 mutation_scale=0.1, keep=2, random_state=None):
        self.m = m
        self.iterations = iterations
        self.mutation_probability = mutation_probability
        self.mutation_scale = mutation_scale
        self.keep = keep
        self.random_state = random_state

    def _tournament(self, fitness, rng, n):
        a = rng.integers(0, fitness.size, size=n)
        b = rng.integers(0, fitness.size, size=n)
        return np.where(fitness[a] <= fitness[b], a, b)

    def _run(self, space, evaluate, rng, callback):
        _check_common(self.m, self.iterations, self.keep)
        _check_probability("mutation_probability", self.mutation_probability)
        m, d = self.m, space.dim
        sigma = self.mutation_scale * space.width
        x = space.sample(rng, m)
        f = evaluate(x)
        tracker = _Tracker(self.iterations, callback)
        tracker.offer(x, f)

        for t in range(self.iterations):
            mothers = x[self._tournament(f, rng, m)]
            fathers = x[self._tournament(f, rng, m)]
            children = np.where(rng.uniform((m, d)) < 0.5, mothers, fathers)
            mutate = rng.uniform((m, d)) < self.mutation_probability
            children = children + mutate * rng.normal((m, d)) * sigma
            children = clamp(children, space)

            squad = apply_elitism(Squad(x, f), Squad(children, evaluate(children)), self.keep)
            x, f = squad.positions, squad.fitness
            tracker.record(t, x, f)
        return tracker.trace(evaluate.count)


class PBILOptimizer(BaseOptimizer):
    """Continuous PBIL with an independent Gaussian per dimension.

    Every generation samples ``m`` points from the model, then moves the model
    mean toward the generation's best point by ``learning_rate``. The model
    spread starts at ``initial_scale`` times the box width and shrinks
    linearly over the run.
    """

    name = "pbil"

    def __init__(self, m=50, iterations=500, learning_rate=0.3, initial_scale=0.25,
                 keep=2, random_state=None):
        self.m = m
        self.iterations = iterations
        self.learning_rate = learning_rate
        self.initial_scale = initial_scale
        self.keep = keep
        self.random_state = random_state

    def _run(self, space, evaluate, rng, callback):
        _check_common(self.m, self.iterations, self.keep)
        _check_probability("learning_rate", self.learning_rate)
        m, d = self.m, space.dim
        x = space.sample(rng, m)
        f = evaluate(x)
        mean = x[np.argmin(f)].copy()
        sigma0 = self.initial_scale * space.width
        tracker = _Tracker(self.iterations, callback)
        tracker.offer(x, f)
        self.model_means_ = []

        for t in range(self.iterations):
            sigma = sigma0 * (1.0 - t / max(self.iterations, 1))
            samples = clamp(mean + rng.normal((m, d)) * sigma, space)
            squad = apply_elitism(Squad(x, f), Squad(samples, evaluate(samples)), self.keep)
            x, f = squad.positions, squad.fitness

            best = x[np.argmin(f)]
            mean = clamp((1.0 - self.learning_rate) * mean + self.learning_rate * best, space)
            self.model_means_.append(mean.copy())
            tracker.record(t, x, f)
        return tracker.trace(evaluate.count)


class EvolutionStrategy(BaseOptimizer):
    """(mu + lambda) ES with ``mu = m // 2`` parents and ``lambda = m`` offspring.

    Each child is the mean of three distinct random parents, then each gene
    mutates with probability ``mutation_probability`` by a normal step of
    ``mutation_scale`` times the box width.
    """

    name = "es"

    def __init__(self, m=50, iterations=500, mutation_probability=0.1,
                 mutation_scale=0.1, n_parents=3, keep=2, random_state=None):
        self.m = m
        self.iterations = iterations
        self.mutation_probability = mutation_probability
        self.mutation_scale = mutation_scale
        self.n_parents = n_parents
        self.keep = keep
        self.random_state = random_state

    def _run(self, space, evaluate, rng, callback):
        _check_common(self.m, self.iterations, self.keep)
        _check_probability("mutation_probability", self.mutation_probability)
        mu, lam, d = max(self.m // 2, 1), self.m, space.dim
        rho = min(self.n_parents, mu)
        sigma = self.mutation_scale * space.width
        x = space.sample(rng, mu)
        f = evaluate(x)
        tracker = _Tracker(self.iterations, callback)
        tracker.offer(x, f)

        for t in range(self.iterations):
            # rho distinct parents per child: argsort of uniform keys is a random permutation
            picks = np.argsort(rng.uniform((lam, mu)), axis=1)[:, :rho]
            children = x[picks].mean(axis=1)
            mutate = rng.uniform((lam, d)) < self.mutation_probability
            children = clamp(children + mutate * rng.normal((lam, d)) * sigma, space)

            pool_x = np.vstack([x, children])
            pool_f = np.concatenate([f, evaluate(children)])
            survivors = np.argsort(pool_f, kind="stable")[:mu]
            x, f = pool_x[survivors], pool_f[survivors]
            tracker.record(t, x, f)
        return tracker.trace(evaluate.count)


OPTIMIZERS = {
    cls.name: cls
    for cls in [
        MilitaryDogOptimizer,
        ParticleSwarmOptimizer,
        GeneticAlgorithm,
        PBILOptimizer,
        EvolutionStrategy,
    ]
}


def make_optimizer(name, **params):
    """Instantiate an optimizer by its short name (``mdbo``, ``pso``, ...)."""
    try:
        cls = OPTIMIZERS[name.lower()]
    except KeyError:
        raise KeyError(
            f"unknown optimizer {name!r}; valid names: {', '.join(OPTIMIZERS)}"
        ) from None
    return cls(**params)
