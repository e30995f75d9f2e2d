"""Benchmark objectives and the uniform evaluation interface.

Six classic minimization test functions (f1..f6) with their standard search
ranges, each exposed both as a plain function and as an ObjectiveSpec carrying
dimension, bounds and a stochastic flag. Further objectives (the filter-design
cost) register themselves into the same registry so the optimizer can address
any objective by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ObjectiveSpec",
    "sphere",
    "rosenbrock",
    "quartic_noise",
    "ackley",
    "rastrigin",
    "griewank",
    "register_objective",
    "get_objective",
    "objective_names",
    "DEFAULT_BENCHMARK_DIM",
]

DEFAULT_BENCHMARK_DIM = 30


@dataclass(frozen=True)
class ObjectiveSpec:
    """A named minimization objective with box bounds.

    evaluate(x, rng) returns the fitness of one position; rng is consumed only
    by stochastic objectives (one seeded stream per optimization run, so noisy
    evaluations are reproducible). evaluate_batch, when available, evaluates a
    (rows, dim) matrix of positions and is bitwise-consistent with evaluate on
    each row; stochastic objectives never provide it.
    """

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    stochastic: bool = False
    _scalar: Callable[[np.ndarray, np.random.Generator | None], float] = field(
        default=None, repr=False
    )
    _batch: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if not np.all(self.lower < self.upper):
            raise ValueError("lower bounds must be strictly below upper bounds")

    def evaluate(self, x: np.ndarray, rng: np.random.Generator | None = None) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"{self.name} expects a vector of length {self.dim}, got shape {x.shape}")
        if self.stochastic and rng is None:
            raise ValueError(f"{self.name} is stochastic and needs the run's rng")
        return float(self._scalar(x, rng))

    @property
    def supports_batch(self) -> bool:
        return self._batch is not None

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        if self._batch is None:
            raise ValueError(f"{self.name} has no batch evaluation")
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.dim:
            raise ValueError(f"{self.name} expects (rows, {self.dim}) positions, got shape {xs.shape}")
        return self._batch(xs)


def sphere(x: np.ndarray) -> float:
    return float(np.sum(x * x))


def rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def quartic_noise(
    x: np.ndarray, rng: np.random.Generator, per_term: bool = True
) -> float:
    """Weighted quartic with additive uniform noise.

    sum_i i*x_i^4 plus, by default, one independent Uniform[0,1) draw per term,
    drawn in index order from the caller's stream. With per_term=False a single
    draw is added per evaluation instead (sensitivity-check variant).
    """
    d = len(x)
    base = np.sum(np.arange(1, d + 1) * x ** 4)
    noise = np.sum(rng.random(d)) if per_term else rng.random()
    return float(base + noise)


def ackley(x: np.ndarray) -> float:
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.mean(x * x)))
        - np.exp(np.mean(np.cos(2.0 * np.pi * x)))
        + 20.0
        + math.e
    )


def rastrigin(x: np.ndarray) -> float:
    return float(np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0))


def griewank(x: np.ndarray) -> float:
    d = len(x)
    return float(
        np.sum(x * x) / 4000.0
        - np.prod(np.cos(x / np.sqrt(np.arange(1.0, d + 1.0))))
        + 1.0
    )


def _sphere_batch(xs: np.ndarray) -> np.ndarray:
    return np.sum(xs * xs, axis=1)


def _rosenbrock_batch(xs: np.ndarray) -> np.ndarray:
    return np.sum(100.0 * (xs[:, 1:] - xs[:, :-1] ** 2) ** 2 + (xs[:, :-1] - 1.0) ** 2, axis=1)


def _ackley_batch(xs: np.ndarray) -> np.ndarray:
    return (
        -20.0 * np.exp(-0.2 * np.sqrt(np.mean(xs * xs, axis=1)))
        - np.exp(np.mean(np.cos(2.0 * np.pi * xs), axis=1))
        + 20.0
        + math.e
    )


def _rastrigin_batch(xs: np.ndarray) -> np.ndarray:
    return np.sum(xs * xs - 10.0 * np.cos(2.0 * np.pi * xs) + 10.0, axis=1)


def _griewank_batch(xs: np.ndarray) -> np.ndarray:
    d = xs.shape[1]
    return (
        np.sum(xs * xs, axis=1) / 4000.0
        - np.prod(np.cos(xs / np.sqrt(np.arange(1.0, d + 1.0))), axis=1)
        + 1.0
    )


def _box(dim: int, half_width: float) -> tuple[np.ndarray, np.ndarray]:
    return np.full(dim, -half_width), np.full(dim, half_width)


def _make_deterministic(name, half_width, scalar, batch, dim, min_dim=1):
    if dim < min_dim:
        raise ValueError(f"{name} needs dimension >= {min_dim}, got {dim}")
    lower, upper = _box(dim, half_width)
    return ObjectiveSpec(
        name=name,
        dim=dim,
        lower=lower,
        upper=upper,
        stochastic=False,
        _scalar=lambda x, rng: scalar(x),
        _batch=batch,
    )


def _make_quartic_noise(dim: int, noise_mode: str) -> ObjectiveSpec:
    if noise_mode not in ("per-term", "per-eval"):
        raise ValueError(f"noise_mode must be 'per-term' or 'per-eval', got {noise_mode!r}")
    per_term = noise_mode == "per-term"
    lower, upper = _box(dim, 1.28)
    return ObjectiveSpec(
        name="f3",
        dim=dim,
        lower=lower,
        upper=upper,
        stochastic=True,
        _scalar=lambda x, rng: quartic_noise(x, rng, per_term=per_term),
        _batch=None,
    )


_FACTORIES: dict[str, Callable[[int, str], ObjectiveSpec]] = {
    "f1": lambda dim, nm: _make_deterministic("f1", 100.0, sphere, _sphere_batch, dim),
    "f2": lambda dim, nm: _make_deterministic("f2", 30.0, rosenbrock, _rosenbrock_batch, dim, min_dim=2),
    "f3": lambda dim, nm: _make_quartic_noise(dim, nm),
    "f4": lambda dim, nm: _make_deterministic("f4", 32.0, ackley, _ackley_batch, dim),
    "f5": lambda dim, nm: _make_deterministic("f5", 5.12, rastrigin, _rastrigin_batch, dim),
    "f6": lambda dim, nm: _make_deterministic("f6", 600.0, griewank, _griewank_batch, dim),
}


def register_objective(name: str, factory: Callable[[int | None, str], ObjectiveSpec]) -> None:
    """Register an objective factory: factory(dim, noise_mode) -> ObjectiveSpec."""
    _FACTORIES[name] = factory


def objective_names() -> list[str]:
    return sorted(_FACTORIES)


def get_objective(
    name: str, dim: int | None = None, noise_mode: str = "per-term"
) -> ObjectiveSpec:
    """Build the named objective; dim defaults per objective (30 for f1..f6)."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown objective {name!r}; known: {objective_names()}") from None
    if name.startswith("f") and name in ("f1", "f2", "f3", "f4", "f5", "f6"):
        return factory(DEFAULT_BENCHMARK_DIM if dim is None else dim, noise_mode)
    return factory(dim, noise_mode)
