"""Run records and cross-run statistics.

A RunResult is the immutable outcome of one optimization run: the per-iteration
global-best trajectory, the final fitness, and the improvement counters from
which the fully-informed discovery fraction is computed. Aggregation over
repeated seeded runs produces the mean/median/std summaries reported by the
harness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "RunResult",
    "AggregateStats",
    "SweepRow",
    "discovery_fraction",
    "aggregate",
    "lambda_sweep_summary",
]


@dataclass(frozen=True)
class RunResult:
    """Outcome of a single optimization run.

    trajectory has length iterations+1 (entry 0 is the post-initialization
    global best); final_fitness always equals its last entry. Improvement
    counters tally strict personal-best updates after iteration 0; the
    fi_* counter is the subset contributed by fully-informed particles.
    si_updates / fi_updates count velocity-rule applications and exist for
    instrumentation (endpoint-equivalence checks).
    """

    trajectory: np.ndarray
    final_fitness: float
    fi_improvements: int
    total_improvements: int
    iterations: int
    config_digest: dict = field(default_factory=dict)
    si_updates: int = 0
    fi_updates: int = 0

    def __post_init__(self):
        traj = np.asarray(self.trajectory, dtype=float)
        object.__setattr__(self, "trajectory", traj)
        if traj.ndim != 1 or len(traj) != self.iterations + 1:
            raise ValueError(
                f"trajectory must have length iterations+1={self.iterations + 1}, got {traj.shape}"
            )
        if traj[-1] != self.final_fitness:
            raise ValueError("final_fitness must equal the last trajectory entry")
        if not 0 <= self.fi_improvements <= self.total_improvements:
            raise ValueError("need 0 <= fi_improvements <= total_improvements")


def discovery_fraction(result: RunResult) -> float:
    """Fraction of all personal-best improvements found by FI particles (0 if none)."""
    if result.total_improvements == 0:
        return 0.0
    return result.fi_improvements / result.total_improvements


@dataclass(frozen=True)
class AggregateStats:
    """Statistics over repeated runs of one configuration cell."""

    run_count: int
    mean_final: float
    median_final: float
    std_final: float
    mean_discovery: float
    mean_trajectory: np.ndarray


def aggregate(results: Sequence[RunResult]) -> AggregateStats:
    """Mean/median/sample-std of final fitness, mean discovery fraction and the
    pointwise-mean trajectory over runs sharing one objective and budget."""
    if not results:
        raise ValueError("cannot aggregate zero runs")
    names = {r.config_digest.get("objective") for r in results}
    if len(names) > 1:
        raise ValueError(f"mixed objectives in aggregation: {sorted(map(str, names))}")
    lengths = {len(r.trajectory) for r in results}
    if len(lengths) > 1:
        raise ValueError(f"mixed trajectory lengths in aggregation: {sorted(lengths)}")
    finals = np.array([r.final_fitness for r in results], dtype=float)
    std = float(np.std(finals, ddof=1)) if len(finals) > 1 else 0.0
    return AggregateStats(
        run_count=len(results),
        mean_final=float(np.mean(finals)),
        median_final=float(np.median(finals)),
        std_final=std,
        mean_discovery=float(np.mean([discovery_fraction(r) for r in results])),
        mean_trajectory=np.mean(np.stack([r.trajectory for r in results]), axis=0),
    )


@dataclass(frozen=True)
class SweepRow:
    """One row of a fraction-sweep table; is_best flags the argmin of mean_final."""

    fi_fraction: float
    mean_final: float
    median_final: float
    std_final: float
    mean_discovery: float
    run_count: int
    is_best: bool


def lambda_sweep_summary(
    cells: Sequence[tuple[float, AggregateStats]]
) -> list[SweepRow]:
    """Order sweep cells by FI fraction and flag the one with lowest mean final
    fitness (ties broken toward the smaller fraction)."""
    if not cells:
        raise ValueError("sweep summary needs at least one cell")
    ordered = sorted(cells, key=lambda c: c[0])
    fractions = [frac for frac, _ in ordered]
    if len(set(fractions)) != len(fractions):
        raise ValueError("duplicate FI fractions in sweep cells")
    best = min(range(len(ordered)), key=lambda i: ordered[i][1].mean_final)
    return [
        SweepRow(
            fi_fraction=frac,
            mean_final=stats.mean_final,
            median_final=stats.median_final,
            std_final=stats.std_final,
            mean_discovery=stats.mean_discovery,
            run_count=stats.run_count,
            is_best=(i == best),
        )
        for i, (frac, stats) in enumerate(ordered)
    ]
