"""Military Dog Based Optimizer (MDBO) and the population plumbing it shares
with the baseline optimizers.

A squad of ``m`` dogs lives in a box-bounded search space. Every iteration
applies the sniffing move (exploitation around the loudest dog), then the
barking move (exploration along the difference between the loudest dog and a
random squad mate), then elitist reinsertion of the previous generation's
best members. All objectives are minimized; the loudest dog is the one with
the lowest fitness.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator

from .rng import check_rng

__all__ = [
    "SearchSpace",
    "Dog",
    "Squad",
    "MdboParams",
    "RunTrace",
    "Evaluator",
    "clamp",
    "initialize_squad",
    "sniff_step",
    "bark_step",
    "apply_elitism",
    "mdbo_run",
    "BaseOptimizer",
    "MilitaryDogOptimizer",
]


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if lower.size < 1:
            raise ValueError("search space needs at least one dimension")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if np.any(lower >= upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, dim, low, high):
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self):
        return self.lower.size

    @property
    def width(self):
        return self.upper - self.lower

    def sample(self, rng, n):
        """``n`` points drawn uniformly from the box."""
        return self.lower + rng.uniform((n, self.dim)) * self.width

    def contains(self, X):
        X = np.asarray(X)
        return bool(np.all((X >= self.lower) & (X <= self.upper)))


def check_space(space):
    if isinstance(space, SearchSpace):
        return space
    if hasattr(space, "space") and callable(space.space):
        raise TypeError("pass benchmark.space(dim) rather than the benchmark itself")
    lower, upper = space
    return SearchSpace(lower, upper)


def clamp(fsv, space):
    """Project positions (a vector or a stack of row vectors) onto the box."""
    return np.clip(fsv, space.lower, space.upper)


class Dog(NamedTuple):
    fsv: np.ndarray
    mdsi: float


@dataclass
class Squad:
    """Fixed-size population stored as a position matrix and a fitness vector."""

    positions: np.ndarray
    fitness: np.ndarray
    generation: int = 0

    @property
    def size(self):
        return self.fitness.shape[0]

    @property
    def loudest_index(self):
        # argmin breaks ties toward the lowest index
        return int(np.argmin(self.fitness))

    @property
    def loudest(self):
        i = self.loudest_index
        return Dog(self.positions[i].copy(), float(self.fitness[i]))

    @property
    def dogs(self):
        return [Dog(p.copy(), float(f)) for p, f in zip(self.positions, self.fitness)]

    def copy(self):
        return Squad(self.positions.copy(), self.fitness.copy(), self.generation)


@dataclass
class MdboParams:
    m: int = 50
    iterations: int = 500
    p_m: float = 0.5
    alpha: float = 0.25
    w: float = 0.25
    keep: int = 2

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("squad size m must be at least 1")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError("p_m must lie in [0, 1]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.w < 0:
            raise ValueError("wind constant w must be non-negative")
        if not 0 <= self.keep < self.m:
            raise ValueError("keep must satisfy 0 <= keep < m")


@dataclass
class RunTrace:
    best_per_iteration: np.ndarray
    best_fsv: np.ndarray
    best_mdsi: float
    evaluations: int


class Evaluator:
    """Counts objective calls and maps non-finite fitness to ``+inf``.

    Objectives take a 1-D vector and return a float. An objective carrying a
    true ``vectorized`` attribute is instead called once with a 2-D array of
    row vectors and must return one value per row.
    """

    def __init__(self, objective):
        if isinstance(objective, Evaluator):
            objective = objective.objective
        self.objective = objective
        self.vectorized = bool(getattr(objective, "vectorized", False))
        self.count = 0

    def __call__(self, X):
        X = np.atleast_2d(X)
        if X.shape[0] == 0:
            return np.empty(0)
        if self.vectorized:
            values = np.asarray(self.objective(X), dtype=float).reshape(X.shape[0])
        else:
            values = np.fromiter(
                (self.objective(row) for row in X), dtype=float, count=X.shape[0]
            )
        self.count += X.shape[0]
        return np.where(np.isfinite(values), values, np.inf)


def _as_evaluator(objective):
    return objective if isinstance(objective, Evaluator) else Evaluator(objective)


def initialize_squad(space, params, objective, rng):
    """Uniform random squad inside the box, with fitness evaluated."""
    space = check_space(space)
    if params.m < 1:
        raise ValueError("squad size m must be at least 1")
    evaluate = _as_evaluator(objective)
    positions = space.sample(rng, params.m)
    return Squad(positions, evaluate(positions), generation=0)


def sniff_step(squad, space, params, objective, rng):
    """Exploitation move around the loudest dog.

    Per dog and per dimension, with ``p ~ U[0, 1)``: when ``p <= p_m`` the
    coordinate is copied from the loudest dog, otherwise it moves by
    ``R * w * K * (x - x_loudest)`` with fresh ``R, K ~ U[0, 1)``. The loudest
    dog itself is left untouched.
    """
    evaluate = _as_evaluator(objective)
    m, d = squad.positions.shape
    best = squad.loudest_index
    leader = squad.positions[best]

    p = rng.uniform((m, d))
    k = rng.uniform((m, d))
    r = rng.uniform((m, d))
    step = params.w * k * (squad.positions - leader)
    moved = np.where(p <= params.p_m, leader, squad.positions + r * step)
    moved = clamp(moved, space)

    movers = np.arange(m) != best
    positions = squad.positions.copy()
    fitness = squad.fitness.copy()
    positions[movers] = moved[movers]
    fitness[movers] = evaluate(positions[movers])
    return Squad(positions, fitness, squad.generation)


def bark_step(squad, space, params, objective, rng):
    """Exploration move along ``x_loudest - x_q`` for a random mate ``q != i``.

    Per dog, with ``p ~ U[0, 1)``: when ``p <= alpha`` the dog stays put,
    otherwise ``x += (x_loudest - x_q) * R`` with ``R`` drawn per dimension.
    """
    evaluate = _as_evaluator(objective)
    m, d = squad.positions.shape
    if m < 2:
        raise ValueError("barking needs a squad of at least two dogs")
    leader = squad.positions[squad.loudest_index]

    p = rng.uniform(m)
    q = np.asarray(rng.integers(0, m - 1, size=m))
    q = q + (q >= np.arange(m))
    r = rng.uniform((m, d))

    movers = p > params.alpha
    positions = squad.positions.copy()
    fitness = squad.fitness.copy()
    displaced = positions + (leader - positions[q]) * r
    positions[movers] = clamp(displaced[movers], space)
    fitness[movers] = evaluate(positions[movers])
    return Squad(positions, fitness, squad.generation)


def apply_elitism(previous, current, keep):
    """Reinsert up to ``keep`` of the previous generation's best members.

    The r-th best of ``previous`` replaces the r-th worst of ``current`` when
    it is strictly better.
    """
    if previous.size != current.size:
        raise ValueError("squads must have the same size")
    result = current.copy()
    if keep <= 0:
        return result
    elite = np.argsort(previous.fitness, kind="stable")[:keep]
    worst = np.argsort(-current.fitness, kind="stable")[:keep]
    for e, w in zip(elite, worst):
        if previous.fitness[e] < current.fitness[w]:
            result.positions[w] = previous.positions[e]
            result.fitness[w] = previous.fitness[e]
    return result


class _Tracker:
    """Best-so-far bookkeeping shared by every optimizer loop."""

    def __init__(self, iterations, callback=None):
        self.curve = np.empty(iterations)
        self.best_x = None
        self.best_f = np.inf
        self.callback = callback

    def offer(self, positions, fitness):
        i = int(np.argmin(fitness))
        if self.best_x is None or fitness[i] < self.best_f:
            self.best_f = float(fitness[i])
            self.best_x = positions[i].copy()

    def record(self, t, positions, fitness):
        self.offer(positions, fitness)
        self.curve[t] = self.best_f
        if self.callback is not None:
            self.callback(t, positions, fitness)

    def trace(self, evaluations):
        return RunTrace(self.curve, self.best_x, self.best_f, evaluations)


def mdbo_run(space, params, objective, rng, callback=None):
    """Full MDBO loop over a fixed iteration budget.

    ``callback(t, positions, fitness)``, when given, is called after every
    iteration with the post-elitism squad.
    """
    space = check_space(space)
    if params.m < 2 and params.iterations > 0:
        raise ValueError("MDBO needs a squad of at least two dogs")
    evaluate = _as_evaluator(objective)
    squad = initialize_squad(space, params, evaluate, rng)
    tracker = _Tracker(params.iterations, callback)
    tracker.offer(squad.positions, squad.fitness)
    for t in range(params.iterations):
        previous = squad
        squad = sniff_step(previous, space, params, evaluate, rng)
        squad = bark_step(squad, space, params, evaluate, rng)
        squad = apply_elitism(previous, squad, params.keep)
        squad.generation = t + 1
        tracker.record(t, squad.positions, squad.fitness)
    return tracker.trace(evaluate.count)


class BaseOptimizer(BaseEstimator):
    """Common ``minimize`` entry point for every optimizer in the package.

    Subclasses implement ``_run(space, evaluate, rng, callback)`` returning a
    :class:`RunTrace`. After :meth:`minimize`, the fitted attributes
    ``trace_``, ``best_x_``, ``best_fitness_`` and ``n_evaluations_`` are set.
    """

    name = None

    def minimize(self, objective, space, callback=None):
        space = check_space(space)
        rng = check_rng(self.random_state)
        trace = self._run(space, Evaluator(objective), rng, callback)
        self.trace_ = trace
        self.best_x_ = trace.best_fsv
        self.best_fitness_ = trace.best_mdsi
        self.n_evaluations_ = trace.evaluations
        return trace

    def _run(self, space, evaluate, rng, callback):
        raise NotImplementedError


class MilitaryDogOptimizer(BaseOptimizer):
    """Military Dog Based Optimizer.

    Parameters
    ----------
    m : int, default=50
        Squad (population) size.
    iterations : int, default=500
        Fixed iteration budget.
    p_m : float, default=0.5
        Probability that a sniffing dog copies a coordinate of the loudest dog.
    alpha : float, default=0.25
        Smog/vegetation constant: probability that a bark is not heard.
    w : float, default=0.25
        Wind constant scaling the sniffing step.
    keep : int, default=2
        Elite members carried over from the previous generation.
    random_state : int, RngStream or None
        Seed of the run.
    """

    name = "mdbo"

    def __init__(self, m=50, iterations=500, p_m=0.5, alpha=0.25, w=0.25, keep=2,
                 random_state=None):
        self.m = m
        self.iterations = iterations
        self.p_m = p_m
        self.alpha = alpha
        self.w = w
        self.keep = keep
        self.random_state = random_state

    def _params(self):
        return MdboParams(self.m, self.iterations, self.p_m, self.alpha, self.w, self.keep)

    def _run(self, space, evaluate, rng, callback):
        return mdbo_run(space, self._params(), evaluate, rng, callback)
