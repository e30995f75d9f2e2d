"""Heterogeneous-strategy particle swarm optimization toolkit.

A constricted particle swarm in which a configurable fraction of particles is
fully informed (attracted to every graph neighbor's personal best) and the rest
are singly informed (attracted to their own and their best neighbor's personal
best), communicating over ring, scale-free or small-world topologies. Ships
with six classic benchmark objectives, run statistics, a 2-D recursive lowpass
filter design objective, an HTTP service and a CLI.
"""

from . import filterdesign  # ensures the "filter" objective is registered
from .core import (
    DEFAULT_ACCEL,
    DEFAULT_CONSTRICTION,
    DEFAULT_ITERATIONS,
    DEFAULT_SWARM_SIZE,
    HspsoConfig,
    Particle,
    Swarm,
    TopologySpec,
    fi_velocity,
    run,
    si_velocity,
)
from .filterdesign import (
    COEFFICIENT_NAMES,
    PUBLISHED_DESIGNS,
    FilterParams,
    FrequencyGrid,
    UnstablePointError,
    amplitude,
    amplitude_grid,
    desired_response,
    filter_cost,
    filter_objective,
    stability_feasible,
)
from .graphs import (
    Graph,
    from_edge_list,
    is_connected,
    neighbors,
    ring,
    scale_free,
    small_world,
    to_edge_list,
    validate_graph,
)
from .metrics import (
    AggregateStats,
    RunResult,
    SweepRow,
    aggregate,
    discovery_fraction,
    lambda_sweep_summary,
)
from .objectives import (
    ObjectiveSpec,
    ackley,
    get_objective,
    griewank,
    objective_names,
    quartic_noise,
    rastrigin,
    register_objective,
    rosenbrock,
    sphere,
)

__version__ = "0.1.0"
