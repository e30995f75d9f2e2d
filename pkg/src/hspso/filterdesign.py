"""2-D recursive lowpass filter design as a swarm objective.

The filter is a second-order 2-D recursive section pair with transfer function

    H(z1, z2) = H0 * sum_{i,j=0..2} a_ij z1^i z2^j
                / prod_{l=1,2} (1 + b_l z1 + c_l z2 + d_l z1 z2),   a00 = 1,

evaluated at z = e^{-j omega} on a uniform lattice over [0, pi]^2. The design
cost is the p-th power deviation of the amplitude |H| from a circularly
symmetric ideal lowpass (passband radius 0.08*pi, transition band to 0.12*pi),
summed over the lattice, subject to per-section stability triangle conditions
on (b_l, c_l, d_l). Fifteen coefficients are free; they are optimized directly
by the swarm through a static-penalty objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .objectives import ObjectiveSpec, register_objective

__all__ = [
    "COEFFICIENT_NAMES",
    "FILTER_DIM",
    "COEFFICIENT_RANGE",
    "INFEASIBLE_PENALTY",
    "DENOMINATOR_FLOOR",
    "UnstablePointError",
    "FilterParams",
    "FrequencyGrid",
    "default_grid",
    "amplitude",
    "amplitude_grid",
    "desired_response",
    "filter_cost",
    "stability_feasible",
    "stability_violation",
    "filter_objective",
    "compensated_sum",
    "PUBLISHED_DESIGNS",
]

COEFFICIENT_NAMES = (
    "a01", "a02", "a10", "a11", "a12", "a20", "a21", "a22",
    "b1", "b2", "c1", "c2", "d1", "d2", "H0",
)
FILTER_DIM = 15
COEFFICIENT_RANGE = 3.0
INFEASIBLE_PENALTY = 1.0e6
DENOMINATOR_FLOOR = 1.0e-12


class UnstablePointError(ArithmeticError):
    """Denominator magnitude fell to the floor at some evaluation point."""


@dataclass(frozen=True)
class FilterParams:
    """The 15 free coefficients; the numerator constant a00 is fixed at 1."""

    a01: float
    a02: float
    a10: float
    a11: float
    a12: float
    a20: float
    a21: float
    a22: float
    b1: float
    b2: float
    c1: float
    c2: float
    d1: float
    d2: float
    H0: float

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in COEFFICIENT_NAMES], dtype=float)

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "FilterParams":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (FILTER_DIM,):
            raise ValueError(f"coefficient vector must have shape ({FILTER_DIM},), got {vec.shape}")
        return cls(**{name: float(v) for name, v in zip(COEFFICIENT_NAMES, vec)})

    def to_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in COEFFICIENT_NAMES}

    @classmethod
    def from_dict(cls, record: dict) -> "FilterParams":
        missing = [name for name in COEFFICIENT_NAMES if name not in record]
        if missing:
            raise ValueError(f"coefficient record is missing {missing}")
        return cls(**{name: float(record[name]) for name in COEFFICIENT_NAMES})

    def numerator_matrix(self) -> np.ndarray:
        """3x3 numerator coefficients: entry (i, j) multiplies z1^i z2^j."""
        return np.array(
            [
                [1.0, self.a01, self.a02],
                [self.a10, self.a11, self.a12],
                [self.a20, self.a21, self.a22],
            ]
        )


def desired_response(omega1: float, omega2: float) -> float:
    """Ideal circularly symmetric lowpass amplitude: 1 in the passband
    (radius <= 0.08*pi), 0.5 in the transition ring (radius <= 0.12*pi), else 0."""
    radius = math.hypot(omega1, omega2)
    if radius <= 0.08 * math.pi:
        return 1.0
    if radius <= 0.12 * math.pi:
        return 0.5
    return 0.0


class FrequencyGrid:
    """Uniform evaluation lattice omega = (pi*l1/n1, pi*l2/n2), l inclusive.

    Holds the precomputed z-plane basis shared by every amplitude/cost
    evaluation on the lattice: (n1+1)*(n2+1) points in total.
    """

    def __init__(self, n1: int = 50, n2: int = 50):
        if n1 < 1 or n2 < 1:
            raise ValueError(f"grid resolutions must be >= 1, got ({n1}, {n2})")
        self.n1 = n1
        self.n2 = n2
        self.omega1 = np.pi * np.arange(n1 + 1) / n1
        self.omega2 = np.pi * np.arange(n2 + 1) / n2
        z1 = np.exp(-1j * self.omega1)
        z2 = np.exp(-1j * self.omega2)
        self._z1_pow = np.stack([np.ones_like(z1), z1, z1 * z1], axis=1)  # (n1+1, 3)
        self._z2_pow = np.stack([np.ones_like(z2), z2, z2 * z2], axis=1)
        self._g1 = z1[:, None]
        self._g2 = z2[None, :]
        self._g12 = z1[:, None] * z2[None, :]
        self.desired = np.array(
            [[desired_response(w1, w2) for w2 in self.omega2] for w1 in self.omega1]
        )

    @property
    def point_count(self) -> int:
        return (self.n1 + 1) * (self.n2 + 1)


_DEFAULT_GRID: FrequencyGrid | None = None


def default_grid() -> FrequencyGrid:
    """The shared 51x51 lattice used by the design cost."""
    global _DEFAULT_GRID
    if _DEFAULT_GRID is None:
        _DEFAULT_GRID = FrequencyGrid(50, 50)
    return _DEFAULT_GRID


def compensated_sum(values: np.ndarray, axis: int = -1):
    """Compensated summation along an axis via a pairwise two-sum tree.

    Each pairwise add is an error-free transformation; the rounding errors are
    recycled into the total, so the result is far below 1e-12 of the exactly
    rounded sum for any traversal order of the inputs. Returns a float for 1-D
    input, otherwise an array with the axis reduced.
    """
    arr = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    if arr.shape[-1] == 0:
        out = np.zeros(arr.shape[:-1])
        return float(out) if out.ndim == 0 else out
    err_total = np.zeros(arr.shape[:-1])
    while arr.shape[-1] > 1:
        carry = None
        if arr.shape[-1] % 2 == 1:
            carry = arr[..., -1:]
            arr = arr[..., :-1]
        a = arr[..., 0::2]
        b = arr[..., 1::2]
        s = a + b
        bb = s - a
        err = (a - (s - bb)) + (b - bb)
        err_total = err_total + np.sum(err, axis=-1)
        arr = s if carry is None else np.concatenate([s, carry], axis=-1)
    out = arr[..., 0] + err_total
    return float(out) if out.ndim == 0 else out


def _stability_terms(b1, b2, c1, c2, d1, d2):
    """Feasibility flag and total violation magnitude of the per-section
    stability triangles |b+c| - 1 < d < 1 - |b-c| (strict)."""
    lo1 = np.abs(b1 + c1) - 1.0
    hi1 = 1.0 - np.abs(b1 - c1)
    lo2 = np.abs(b2 + c2) - 1.0
    hi2 = 1.0 - np.abs(b2 - c2)
    feasible = (lo1 < d1) & (d1 < hi1) & (lo2 < d2) & (d2 < hi2)
    violation = (
        np.maximum(0.0, lo1 - d1)
        + np.maximum(0.0, d1 - hi1)
        + np.maximum(0.0, lo2 - d2)
        + np.maximum(0.0, d2 - hi2)
    )
    return feasible, violation


def stability_feasible(params: FilterParams) -> bool:
    """True iff both recursive sections satisfy their stability triangle strictly."""
    feasible, _ = _stability_terms(
        params.b1, params.b2, params.c1, params.c2, params.d1, params.d2
    )
    return bool(feasible)


def stability_violation(params: FilterParams) -> float:
    """Total magnitude by which the stability triangle conditions are violated."""
    _, violation = _stability_terms(
        params.b1, params.b2, params.c1, params.c2, params.d1, params.d2
    )
    return float(violation)


def _response_batch(vecs: np.ndarray, grid: FrequencyGrid):
    """Amplitude matrices for a (rows, 15) coefficient batch.

    Returns (magnitudes (rows, n1+1, n2+1), unstable (rows,) bool); unstable
    rows have a denominator magnitude at or below the floor somewhere on the
    lattice and their magnitude entries are not meaningful.
    """
    vecs = np.asarray(vecs, dtype=float)
    rows = vecs.shape[0]
    a = np.empty((rows, 3, 3))
    a[:, 0, 0] = 1.0
    a[:, 0, 1] = vecs[:, 0]
    a[:, 0, 2] = vecs[:, 1]
    a[:, 1, 0] = vecs[:, 2]
    a[:, 1, 1] = vecs[:, 3]
    a[:, 1, 2] = vecs[:, 4]
    a[:, 2, 0] = vecs[:, 5]
    a[:, 2, 1] = vecs[:, 6]
    a[:, 2, 2] = vecs[:, 7]
    b1 = vecs[:, 8][:, None, None]
    b2 = vecs[:, 9][:, None, None]
    c1 = vecs[:, 10][:, None, None]
    c2 = vecs[:, 11][:, None, None]
    d1 = vecs[:, 12][:, None, None]
    d2 = vecs[:, 13][:, None, None]
    h0 = vecs[:, 14][:, None, None]
    numerator = np.matmul(np.matmul(grid._z1_pow, a.astype(complex)), grid._z2_pow.T)
    denominator = (1.0 + b1 * grid._g1 + c1 * grid._g2 + d1 * grid._g12) * (
        1.0 + b2 * grid._g1 + c2 * grid._g2 + d2 * grid._g12
    )
    abs_den = np.abs(denominator)
    unstable = np.any(abs_den <= DENOMINATOR_FLOOR, axis=(1, 2))
    with np.errstate(divide="ignore", invalid="ignore"):
        magnitudes = np.abs(h0 * numerator / denominator)
    return magnitudes, unstable


def amplitude(params: FilterParams, omega1: float, omega2: float) -> float:
    """|H| at a single frequency pair, in complex arithmetic.

    Raises UnstablePointError when the denominator magnitude is at or below the
    floor (the objective wrapper maps that to the infeasibility penalty).
    """
    z1 = complex(np.exp(-1j * omega1))
    z2 = complex(np.exp(-1j * omega2))
    a = params.numerator_matrix()
    numerator = 0.0 + 0.0j
    for i in range(3):
        for j in range(3):
            numerator += a[i, j] * z1 ** i * z2 ** j
    denominator = (1.0 + params.b1 * z1 + params.c1 * z2 + params.d1 * z1 * z2) * (
        1.0 + params.b2 * z1 + params.c2 * z2 + params.d2 * z1 * z2
    )
    if abs(denominator) <= DENOMINATOR_FLOOR:
        raise UnstablePointError(
            f"denominator magnitude {abs(denominator):.3e} at omega=({omega1}, {omega2})"
        )
    return abs(params.H0 * numerator / denominator)


def amplitude_grid(params: FilterParams, grid: FrequencyGrid | None = None) -> np.ndarray:
    """Amplitude matrix over the lattice, rows indexed by omega1, columns by omega2."""
    grid = grid or default_grid()
    magnitudes, unstable = _response_batch(params.to_vector()[None, :], grid)
    if unstable[0]:
        raise UnstablePointError("denominator magnitude at the floor somewhere on the lattice")
    return magnitudes[0]


def filter_cost(
    params: FilterParams, grid: FrequencyGrid | None = None, exponent: float = 2
) -> float:
    """Design cost: sum over the lattice of |M - Md|^exponent.

    Accumulated with compensated summation in fixed row-major order, so the
    value is traversal-order invariant to well below 1e-12.
    """
    if exponent < 1:
        raise ValueError(f"exponent must be >= 1, got {exponent}")
    grid = grid or default_grid()
    magnitudes = amplitude_grid(params, grid)
    diff = np.abs(magnitudes - grid.desired)
    terms = diff * diff if exponent == 2 else diff ** exponent
    return float(compensated_sum(terms.ravel()))


def filter_objective(
    grid: FrequencyGrid | None = None,
    exponent: float = 2,
    penalty: float = INFEASIBLE_PENALTY,
) -> ObjectiveSpec:
    """The 15-dimensional design objective, pluggable into the optimizer.

    Returns the lattice cost for stable coefficient sets; coefficient sets that
    violate the stability triangles score penalty plus the violation magnitude,
    and stable sets whose denominator still collapses on the lattice score the
    bare penalty. Bounds are [-3, 3] on every coefficient.
    """
    if exponent < 1:
        raise ValueError(f"exponent must be >= 1, got {exponent}")
    grid = grid or default_grid()

    def evaluate_one(x: np.ndarray, rng=None) -> float:
        feasible, violation = _stability_terms(x[8], x[9], x[10], x[11], x[12], x[13])
        if not feasible:
            return float(penalty + violation)
        magnitudes, unstable = _response_batch(x[None, :], grid)
        if unstable[0]:
            return float(penalty)
        diff = np.abs(magnitudes[0] - grid.desired)
        terms = diff * diff if exponent == 2 else diff ** exponent
        return float(compensated_sum(terms.ravel()))

    def evaluate_batch(xs: np.ndarray) -> np.ndarray:
        feasible, violation = _stability_terms(
            xs[:, 8], xs[:, 9], xs[:, 10], xs[:, 11], xs[:, 12], xs[:, 13]
        )
        out = np.where(feasible, 0.0, penalty + violation)
        idx = np.flatnonzero(feasible)
        if idx.size:
            magnitudes, unstable = _response_batch(xs[idx], grid)
            diff = np.abs(magnitudes - grid.desired)
            terms = diff * diff if exponent == 2 else diff ** exponent
            costs = compensated_sum(terms.reshape(len(idx), -1), axis=-1)
            out[idx] = np.where(unstable, penalty, costs)
        return out

    return ObjectiveSpec(
        name="filter",
        dim=FILTER_DIM,
        lower=np.full(FILTER_DIM, -COEFFICIENT_RANGE),
        upper=np.full(FILTER_DIM, COEFFICIENT_RANGE),
        stochastic=False,
        _scalar=evaluate_one,
        _batch=evaluate_batch,
    )


def _filter_factory(dim: int | None, noise_mode: str) -> ObjectiveSpec:
    if dim not in (None, FILTER_DIM):
        raise ValueError(f"the filter objective is fixed at dimension {FILTER_DIM}")
    return filter_objective()


register_objective("filter", _filter_factory)

# Coefficient sets published for this lowpass specification by earlier studies
# (neural-network, genetic-algorithm and swarm designs). Used as evaluation
# inputs and regression anchors only.
PUBLISHED_DESIGNS: dict[str, FilterParams] = {
    "nn": FilterParams(
        a01=1.8922, a02=-1.2154, a10=0.0387, a11=-2.5298, a12=0.3879,
        a20=0.6115, a21=-1.4619, a22=2.5206,
        b1=-0.8707, b2=-0.8729, c1=-0.8705, c2=-0.8732,
        d1=0.7756, d2=0.7799, H0=0.0010,
    ),
    "ga": FilterParams(
        a01=1.8162, a02=-1.1060, a10=0.0712, a11=-2.5132, a12=0.4279,
        a20=0.5926, a21=-1.3690, a22=2.4326,
        b1=-0.8662, b2=-0.8907, c1=-0.8531, c2=-0.8388,
        d1=0.7346, d2=0.8025, H0=0.0009,
    ),
    "sipso": FilterParams(
        a01=0.3801, a02=0.2545, a10=-0.1083, a11=0.4721, a12=-0.8995,
        a20=0.5398, a21=-1.2448, a22=2.3634,
        b1=-0.7536, b2=-0.3749, c1=-0.7789, c2=-0.4028,
        d1=0.5816, d2=-0.1003, H0=0.0028,
    ),
    "fipso": FilterParams(
        a01=-0.0380, a02=0.5724, a10=0.6357, a11=-0.4270, a12=0.3376,
        a20=0.7397, a21=-0.0664, a22=1.2504,
        b1=-0.4355, b2=-0.4537, c1=-0.5386, c2=-0.3609,
        d1=0.0791, d2=-0.0694, H0=0.0039,
    ),
    "hspso": FilterParams(
        a01=-2.104, a02=-1.5145, a10=-2.2828, a11=2.7886, a12=1.5839,
        a20=-1.2061, a21=1.1080, a22=-2.7257,
        b1=-0.9260, b2=-0.4123, c1=-0.9376, c2=-0.2998,
        d1=0.8846, d2=-0.1859, H0=0.0007,
    ),
}
