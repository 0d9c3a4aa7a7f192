"""The seventeen benchmark objectives F1..F17.

Every function is vectorized over the last axis: a 1-D input returns a float,
an ``(n, d)`` input returns ``n`` values. All are minimized with optimum
value 0.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import SearchSpace

__all__ = ["Benchmark", "BENCHMARKS", "get_benchmark", "list_benchmarks", "evaluate"]

UNIMODAL = "unimodal"
MULTIMODAL = "multimodal"

# max of x*sin(sqrt(x)) on [0, 500], attained at SCHWEFEL_ARGMAX
SCHWEFEL_SHIFT = 418.98288727243370627
SCHWEFEL_ARGMAX = 420.96874635998202731


def ackley(x, a=20.0, b=0.02, c=2 * np.pi):
    # b = 0.02 as tabulated, not the more common 0.2
    d = x.shape[-1]
    rms = np.sqrt(np.sum(x**2, axis=-1) / d)
    return -a * np.exp(-b * rms) - np.exp(np.sum(np.cos(c * x), axis=-1) / d) + a + np.e


def alpine(x):
    return np.sum(np.abs(x * np.sin(x) + 0.1 * x), axis=-1)


def dixon_price(x):
    i = np.arange(2, x.shape[-1] + 1)
    head = (x[..., 0] - 1.0) ** 2
    return head + np.sum(i * (2.0 * x[..., 1:] ** 2 - x[..., :-1]) ** 2, axis=-1)


def griewank(x):
    i = np.arange(1, x.shape[-1] + 1)
    return 1.0 + np.sum(x**2, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1)


def levy(x):
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[..., 0]) ** 2
    body = np.sum(
        (w[..., :-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[..., :-1] + 1.0) ** 2),
        axis=-1,
    )
    tail = (w[..., -1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[..., -1]) ** 2)
    return head + body + tail


def pathological(x):
    a, b = x[..., :-1], x[..., 1:]
    num = np.sin(np.sqrt(100.0 * a**2 + b**2)) ** 2 - 0.5
    den = 1.0 + 0.001 * (a**2 - 2.0 * a * b + b**2) ** 2
    return np.sum(0.5 + num / den, axis=-1)


def perm(x, beta=0.5):
    d = x.shape[-1]
    j = np.arange(1, d + 1, dtype=float)
    # powers[..., i-1, j-1] = x_j ** i, built by repeated multiplication
    powers = np.cumprod(np.broadcast_to(x[..., None, :], x.shape[:-1] + (d, d)), axis=-2)
    inner = (j + beta) * (powers - j ** (-j[:, None]))
    return np.sum(np.sum(inner, axis=-1) ** 2, axis=-1)


def powell(x):
    # trailing coordinates beyond the last full group of four are ignored
    g = x.shape[-1] // 4
    q = x[..., : 4 * g].reshape(x.shape[:-1] + (g, 4))
    a, b, c, e = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    terms = (a + 10 * b) ** 2 + 5 * (c - e) ** 2 + (a + 2 * b) ** 4 + 10 * (a + e) ** 4
    return np.sum(terms, axis=-1)


def powell_sum(x):
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(np.abs(x) ** (i + 1), axis=-1)


def rastrigin(x):
    d = x.shape[-1]
    return 10.0 * d + np.sum(x**2 - 10.0 * np.cos(2 * np.pi * x), axis=-1)


def rosenbrock(x):
    a, b = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (b - a**2) ** 2 + (a - 1.0) ** 2, axis=-1)


def rotated_hyper_ellipsoid(x):
    return np.sum(np.cumsum(x**2, axis=-1), axis=-1)


def schumer_steiglitz(x):
    return np.sum(x**4, axis=-1)


def schwefel(x):
    d = x.shape[-1]
    return SCHWEFEL_SHIFT * d - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1)


def sphere(x):
    return np.sum(x**2, axis=-1)


def step(x):
    return np.sum(np.floor(np.abs(x)), axis=-1)


def trigonometric(x):
    d = x.shape[-1]
    i = np.arange(1, d + 1)
    shared = d - np.sum(np.cos(x), axis=-1, keepdims=True)
    return np.sum((shared + i * (1.0 - np.cos(x) - np.sin(x))) ** 2, axis=-1)


def _zeros(d):
    return np.zeros(d)


def _ones(d):
    return np.ones(d)


def _dixon_price_optimum(d):
    i = np.arange(1, d + 1, dtype=float)
    return 2.0 ** (-(2.0**i - 2.0) / 2.0**i)


def _perm_optimum(d):
    return 1.0 / np.arange(1, d + 1)


def _schwefel_optimum(d):
    return np.full(d, SCHWEFEL_ARGMAX)


@dataclass(frozen=True)
class Benchmark:
    """One test objective with its box, category and known optimum.

    Instances are callable and flagged ``vectorized`` so optimizers evaluate
    a whole population in one call.
    """

    id: str
    name: str
    function: Callable = field(repr=False)
    low: float
    high: float
    modality: str
    optimum_value: float = 0.0
    optimum: Callable = field(default=_zeros, repr=False)
    params: dict = field(default_factory=dict)

    vectorized = True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] < 1:
            raise ValueError(f"{self.id} needs at least one coordinate")
        with np.errstate(over="ignore", invalid="ignore"):
            value = self.function(x, **self.params)
        return float(value) if np.ndim(value) == 0 else value

    def space(self, dim):
        return SearchSpace.box(dim, self.low, self.high)

    def optimum_point(self, dim):
        return self.optimum(dim)

    @property
    def bounds(self):
        return (self.low, self.high)


BENCHMARKS = {
    b.id: b
    for b in [
        Benchmark("F1", "Ackley", ackley, -32.0, 32.0, MULTIMODAL),
        Benchmark("F2", "Alpine", alpine, -100.0, 100.0, MULTIMODAL),
        Benchmark("F3", "Dixon and Price", dixon_price, -100.0, 100.0, UNIMODAL,
                  optimum=_dixon_price_optimum),
        Benchmark("F4", "Griewank", griewank, -20.0, 20.0, MULTIMODAL),
        Benchmark("F5", "Levy", levy, -50.0, 50.0, MULTIMODAL, optimum=_ones),
        Benchmark("F6", "Pathological", pathological, -100.0, 100.0, MULTIMODAL),
        Benchmark("F7", "Perm", perm, -100.0, 100.0, MULTIMODAL,
                  optimum=_perm_optimum, params={"beta": 0.5}),
        Benchmark("F8", "Powell", powell, -10.0, 10.0, UNIMODAL),
        Benchmark("F9", "PowellSum", powell_sum, -100.0, 100.0, UNIMODAL),
        Benchmark("F10", "Rastrigin", rastrigin, -5.12, 5.12, UNIMODAL),
        Benchmark("F11", "Rosenbrock", rosenbrock, -30.0, 30.0, MULTIMODAL, optimum=_ones),
        Benchmark("F12", "Rotated Hyper-Ellipsoid", rotated_hyper_ellipsoid,
                  -65.536, 65.536, UNIMODAL),
        Benchmark("F13", "Schumer Steiglitz", schumer_steiglitz, -100.0, 100.0, UNIMODAL),
        Benchmark("F14", "Schwefel", schwefel, -500.0, 500.0, MULTIMODAL,
                  optimum=_schwefel_optimum),
        Benchmark("F15", "Sphere", sphere, -100.0, 100.0, UNIMODAL),
        Benchmark("F16", "Step", step, -100.0, 100.0, UNIMODAL),
        Benchmark("F17", "Trigonometric", trigonometric, 0.0, 3.14, UNIMODAL),
    ]
}


def get_benchmark(benchmark_id):
    try:
        return BENCHMARKS[str(benchmark_id).upper()]
    except KeyError:
        valid = ", ".join(BENCHMARKS)
        raise KeyError(f"unknown benchmark {benchmark_id!r}; valid ids: {valid}") from None


def list_benchmarks():
    return list(BENCHMARKS.values())


def evaluate(benchmark_id, x, dim=None):
    """Value of benchmark ``benchmark_id`` at ``x``.

    When ``dim`` is given, the last axis of ``x`` must have that length.
    """
    x = np.asarray(x, dtype=float)
    if dim is not None and (x.ndim == 0 or x.shape[-1] != dim):
        raise ValueError(f"expected vectors of length {dim}, got shape {x.shape}")
    return get_benchmark(benchmark_id)(x)
