"""Batch execution of seeded runs and stable machine-readable outputs.

A batch executes `runs` independent runs of one configuration, run r seeded
with base_seed + r, so any single run can be reproduced in isolation. Batches
may execute across worker processes (the HSPSO_THREADS environment variable
caps the worker count; 0 forces sequential execution); outputs are sorted by
run id and are therefore independent of completion order.

All CSV output starts with the schema marker line ``# hspso-csv v1``, uses '.'
as the decimal separator regardless of locale (floats are rendered with
repr(), which also round-trips exactly) and ends with a trailing newline.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .core import HspsoConfig, TopologySpec, run
from .filterdesign import (
    FilterParams,
    amplitude_grid,
    default_grid,
    filter_objective,
    stability_feasible,
)
from .metrics import AggregateStats, RunResult, aggregate, lambda_sweep_summary

__all__ = [
    "THREADS_ENV_VAR",
    "CSV_HEADER",
    "derive_run_seed",
    "batch_configs",
    "run_batch",
    "BenchArtifacts",
    "run_bench",
    "SweepCell",
    "SweepArtifacts",
    "run_sweep",
    "FilterArtifacts",
    "run_filter_design",
    "evaluate_coefficients",
    "render_runs_csv",
    "render_summary_csv",
    "render_sweep_csv",
    "render_amplitude_csv",
    "render_coefficient_record",
]

THREADS_ENV_VAR = "HSPSO_THREADS"
CSV_HEADER = "# hspso-csv v1"


def derive_run_seed(base_seed: int, run_index: int) -> int:
    """Seed for run r of a batch: base_seed + r (documented in output headers)."""
    return base_seed + run_index


def batch_configs(config: HspsoConfig, runs: int, base_seed: int) -> list[HspsoConfig]:
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    return [replace(config, seed=derive_run_seed(base_seed, r)) for r in range(runs)]


def _worker_count(jobs: int) -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
        if cap <= 0:
            return 1
    return max(1, min(cap, jobs))


def run_batch(configs: Sequence[HspsoConfig]) -> list[RunResult]:
    """Execute runs, possibly across processes; results come back in input order."""
    workers = _worker_count(len(configs))
    picklable = all(isinstance(c.objective, str) for c in configs)
    if workers <= 1 or len(configs) <= 1 or not picklable:
        return [run(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, configs, chunksize=max(1, len(configs) // (4 * workers))))


# -- CSV / JSON rendering ----------------------------------------------------


def _fmt(value) -> str:
    return repr(float(value))


def render_runs_csv(results: Sequence[RunResult], base_seed: int, log_every: int = 1) -> str:
    """Per-run trajectories: columns run_id, iter, best_fitness.

    log_every thins the trajectory (every log_every-th iteration is kept,
    always including iteration 0 and the final iteration).
    """
    if log_every < 1:
        raise ValueError(f"log_every must be >= 1, got {log_every}")
    lines = [
        CSV_HEADER,
        f"# seed per run: base_seed + run_id (base_seed={base_seed}, rng=pcg64)",
        "run_id,iter,best_fitness",
    ]
    for run_id, result in enumerate(results):
        last = len(result.trajectory) - 1
        for it, best in enumerate(result.trajectory):
            if it % log_every == 0 or it == last:
                lines.append(f"{run_id},{it},{_fmt(best)}")
    return "\n".join(lines) + "\n"


def _summary_fields(
    objective: str, topology: TopologySpec, fi_fraction: float, stats: AggregateStats
) -> list[str]:
    return [
        objective,
        topology.kind,
        str(topology.nominal_degree),
        _fmt(fi_fraction),
        _fmt(stats.mean_final),
        _fmt(stats.median_final),
        _fmt(stats.std_final),
        _fmt(stats.mean_discovery),
        str(stats.run_count),
    ]


SUMMARY_COLUMNS = "objective,topology,k,lambda,mean_R,median_R,std_R,mean_p,runs"


def render_summary_csv(
    objective: str, topology: TopologySpec, fi_fraction: float, stats: AggregateStats
) -> str:
    lines = [
        CSV_HEADER,
        SUMMARY_COLUMNS,
        ",".join(_summary_fields(objective, topology, fi_fraction, stats)),
    ]
    return "\n".join(lines) + "\n"


def render_sweep_csv(cells: Sequence["SweepCell"]) -> str:
    """Sweep summary: one row per (topology, k, lambda) cell, sorted, with the
    argmin-mean_R lambda flagged within each (topology, k) group."""
    lines = [CSV_HEADER, SUMMARY_COLUMNS + ",is_argmin_lambda"]
    ordered = sorted(cells, key=lambda c: (c.topology.kind, c.topology.nominal_degree, c.fi_fraction))
    for cell in ordered:
        fields = _summary_fields(cell.objective, cell.topology, cell.fi_fraction, cell.stats)
        fields.append("1" if cell.is_best else "0")
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def render_amplitude_csv(matrix: np.ndarray) -> str:
    """51x51 (or grid-sized) amplitude matrix, row-major, one grid row per line."""
    lines = [
        CSV_HEADER,
        "# amplitude |H| on omega=(pi*l1/N1, pi*l2/N2); rows l1, columns l2",
    ]
    lines.extend(",".join(_fmt(v) for v in row) for row in np.asarray(matrix))
    return "\n".join(lines) + "\n"


def render_coefficient_record(
    params: FilterParams, cost: float, feasible: bool, config_digest: dict | None = None
) -> str:
    record: dict = dict(params.to_dict())
    record["J2"] = float(cost)
    record["feasible"] = bool(feasible)
    if config_digest is not None:
        record["config"] = config_digest
    return json.dumps(record, indent=2) + "\n"


# -- experiment drivers -------------------------------------------------------


@dataclass(frozen=True)
class BenchArtifacts:
    config: HspsoConfig
    base_seed: int
    results: list[RunResult]
    stats: AggregateStats
    runs_csv: str
    summary_csv: str


def run_bench(
    config: HspsoConfig, runs: int, base_seed: int, log_every: int = 1
) -> BenchArtifacts:
    """One (objective, lambda, topology) cell: `runs` seeded runs plus summaries."""
    config.validate()
    results = run_batch(batch_configs(config, runs, base_seed))
    stats = aggregate(results)
    objective_name = results[0].config_digest["objective"]
    return BenchArtifacts(
        config=config,
        base_seed=base_seed,
        results=results,
        stats=stats,
        runs_csv=render_runs_csv(results, base_seed, log_every),
        summary_csv=render_summary_csv(objective_name, config.topology, config.fi_fraction, stats),
    )


@dataclass(frozen=True)
class SweepCell:
    objective: str
    topology: TopologySpec
    fi_fraction: float
    stats: AggregateStats
    is_best: bool


@dataclass(frozen=True)
class SweepArtifacts:
    cells: list[SweepCell]
    sweep_csv: str


def run_sweep(
    config: HspsoConfig,
    fi_fractions: Sequence[float],
    runs: int,
    base_seed: int,
    k_grid: Sequence[int] | None = None,
) -> SweepArtifacts:
    """Grid of cells over FI fractions (and optionally topology degrees).

    Every cell executes `runs` seeded runs with the same seed schedule, so cells
    differ only in the swept parameters. Within each (topology, k) group the
    fraction with the lowest mean final fitness is flagged.
    """
    if len(fi_fractions) < 2:
        raise ValueError("a sweep needs at least two FI-fraction values")
    config.validate()
    degrees = list(k_grid) if k_grid else [None]
    cells: list[SweepCell] = []
    objective_name = ""
    for degree in degrees:
        topology = config.topology if degree is None else replace(config.topology, k=degree)
        per_fraction: list[tuple[float, AggregateStats]] = []
        for frac in fi_fractions:
            cell_config = replace(config, fi_fraction=frac, topology=topology)
            results = run_batch(batch_configs(cell_config, runs, base_seed))
            per_fraction.append((frac, aggregate(results)))
            objective_name = results[0].config_digest["objective"]
        for row in lambda_sweep_summary(per_fraction):
            cells.append(
                SweepCell(
                    objective=objective_name,
                    topology=topology,
                    fi_fraction=row.fi_fraction,
                    stats=AggregateStats(
                        run_count=row.run_count,
                        mean_final=row.mean_final,
                        median_final=row.median_final,
                        std_final=row.std_final,
                        mean_discovery=row.mean_discovery,
                        mean_trajectory=np.empty(0),
                    ),
                    is_best=row.is_best,
                )
            )
    return SweepArtifacts(cells=cells, sweep_csv=render_sweep_csv(cells))


@dataclass(frozen=True)
class FilterArtifacts:
    params: FilterParams
    cost: float
    feasible: bool
    results: list[RunResult]
    best_run: int
    coefficients_json: str
    amplitude_csv: str


def _rerun_best_position(config: HspsoConfig) -> np.ndarray:
    # run() returns fitness trajectories only; recover the best position by
    # replaying the (deterministic) run.
    from .core import Swarm, _run_streams

    objective = config.resolve_objective()
    graph_rng, swarm_rng = _run_streams(config)
    graph = config.topology.build(config.swarm_size, graph_rng)
    swarm = Swarm(config, objective, graph, swarm_rng)
    for _ in range(config.iterations):
        swarm.step()
    return swarm.global_best_position


def run_filter_design(
    config: HspsoConfig, runs: int = 1, base_seed: int = 0
) -> FilterArtifacts:
    """Optimize the filter objective; keep the best run's coefficient set."""
    if not (config.objective == "filter" or getattr(config.objective, "name", "") == "filter"):
        raise ValueError("run_filter_design needs the 'filter' objective")
    config.validate()
    configs = batch_configs(config, runs, base_seed)
    results = run_batch(configs)
    best_run = min(range(runs), key=lambda r: results[r].final_fitness)
    best_position = _rerun_best_position(configs[best_run])
    params = FilterParams.from_vector(best_position)
    cost = float(results[best_run].final_fitness)
    feasible = stability_feasible(params)
    grid = default_grid()
    matrix = amplitude_grid(params, grid) if feasible else np.zeros((grid.n1 + 1, grid.n2 + 1))
    digest = dict(results[best_run].config_digest)
    digest["base_seed"] = base_seed
    digest["runs"] = runs
    return FilterArtifacts(
        params=params,
        cost=cost,
        feasible=feasible,
        results=results,
        best_run=best_run,
        coefficients_json=render_coefficient_record(params, cost, feasible, digest),
        amplitude_csv=render_amplitude_csv(matrix),
    )


def evaluate_coefficients(params: FilterParams) -> tuple[float, bool]:
    """Evaluate a fixed coefficient set: (design cost J2, stability flag).

    Infeasible or lattice-unstable coefficient sets score the penalty value the
    optimizer would see.
    """
    return float(filter_objective().evaluate(params.to_vector())), stability_feasible(params)
