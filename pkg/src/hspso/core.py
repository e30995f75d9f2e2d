"""The heterogeneous-strategy constricted particle swarm optimizer.

A swarm of N particles moves through a D-dimensional box. A fixed fraction of
the swarm (floor(fi_fraction * N) particles, chosen at initialization) is
*fully informed*: each velocity update averages attraction toward every graph
neighbor's personal best, weighted accel/k_i. The remaining particles are
*singly informed*: they are attracted to their own personal best and to the
single best personal best among their neighbors, each weighted accel/2. Both
rules are damped by the constriction factor, and a particle's strategy never
changes during a run.

Per dimension d, with u ~ Uniform[0,1) draws:

    singly informed:   v_d := chi * (v_d + (phi/2) u1 (own_d - x_d) + (phi/2) u2 (nb_d - x_d))
    fully informed:    v_d := chi * (v_d + (phi/k) sum_m u_m (best_m_d - x_d))
    position:          x_d := x_d + v_d

where chi is the constriction factor (default 0.729), phi the total
acceleration (default 4.1), nb the best neighbor personal best and best_m the
personal best of the m-th neighbor in ascending index order.

Draw granularity: the singly-informed factors u1, u2 are drawn independently
per dimension by default (si_draws="per-particle" shares one pair across the
whole update); each fully-informed factor u_m is drawn once per neighbor and
shared across dimensions by default (fi_draws="per-dimension" redraws it per
dimension). The defaults are what reproduces the reference behavior of the
heterogeneous swarm: redrawing u_m per dimension averages the neighbor pull
into a near-deterministic centroid attraction, which visibly changes the
collective dynamics (fully informed swarms then rarely converge prematurely).

Reproducibility contract
------------------------
Each run consumes one PCG64 stream (recorded as ``rng: pcg64`` in the run
digest). The draw order is fixed: initialization draws positions uniformly in
the bounds in particle-then-dimension order, then draws the fully-informed
member indices without replacement; each iteration then processes particles in
index order. A singly-informed particle draws per dimension in order, own
factor before neighbor factor; a fully-informed particle draws one factor per
neighbor in ascending neighbor-index order (under fi_draws="per-dimension":
per dimension in order, per neighbor ascending within each dimension).
Stochastic objectives draw their noise at evaluation time inside this same
sequence. Updates are synchronous: every velocity update in an iteration reads
the personal bests as they stood at the end of the previous iteration.

Equal (config, seed) pairs therefore produce bit-identical trajectories. The
implementation runs a vectorized step whenever the objective is deterministic
and a per-particle reference step otherwise; both consume the stream
identically and produce bit-identical states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, ring, scale_free, small_world
from .metrics import RunResult
from .objectives import ObjectiveSpec, get_objective

__all__ = [
    "DEFAULT_CONSTRICTION",
    "DEFAULT_ACCEL",
    "DEFAULT_SWARM_SIZE",
    "DEFAULT_ITERATIONS",
    "TopologySpec",
    "HspsoConfig",
    "Particle",
    "Swarm",
    "si_velocity",
    "fi_velocity",
    "run",
]

DEFAULT_CONSTRICTION = 0.729
DEFAULT_ACCEL = 4.1
DEFAULT_SWARM_SIZE = 50
DEFAULT_ITERATIONS = 5000

TOPOLOGY_KINDS = ("ring", "scale-free", "small-world")
BOUNDARY_POLICIES = ("skip", "clamp")
SI_DRAW_MODES = ("per-dimension", "per-particle")
FI_DRAW_MODES = ("per-neighbor", "per-dimension")


@dataclass(frozen=True)
class TopologySpec:
    """Communication-graph recipe.

    ring uses k; small-world uses k and beta; scale-free uses m. Randomized
    topologies are regenerated per run from a stream derived from the run seed
    unless pin_seed is set, in which case every run reuses the graph generated
    from that seed.
    """

    kind: str = "ring"
    k: int = 4
    beta: float = 0.1
    m: int = 2
    pin_seed: int | None = None

    def validate(self) -> None:
        if self.kind not in TOPOLOGY_KINDS:
            raise ValueError(f"unknown topology {self.kind!r}; known: {TOPOLOGY_KINDS}")

    def build(self, n: int, rng: np.random.Generator) -> Graph:
        self.validate()
        if self.kind == "ring":
            return ring(n, self.k)
        if self.kind == "scale-free":
            return scale_free(n, self.m, rng)
        return small_world(n, self.k, self.beta, rng)

    @property
    def nominal_degree(self) -> int:
        """Nominal mean degree: k for lattices, 2m for preferential attachment."""
        return 2 * self.m if self.kind == "scale-free" else self.k


@dataclass(frozen=True)
class HspsoConfig:
    """Everything that determines a run bit-for-bit."""

    objective: str | ObjectiveSpec = "f1"
    dim: int | None = None
    fi_fraction: float = 0.3
    swarm_size: int = DEFAULT_SWARM_SIZE
    iterations: int = DEFAULT_ITERATIONS
    topology: TopologySpec = field(default_factory=TopologySpec)
    seed: int = 0
    constriction: float = DEFAULT_CONSTRICTION
    accel: float = DEFAULT_ACCEL
    boundary: str = "skip"
    si_draws: str = "per-dimension"
    fi_draws: str = "per-neighbor"
    noise_mode: str = "per-term"

    def validate(self) -> None:
        if not 0.0 <= self.fi_fraction <= 1.0:
            raise ValueError(f"fi_fraction must be in [0, 1], got {self.fi_fraction}")
        if self.swarm_size < 2:
            raise ValueError(f"swarm_size must be >= 2, got {self.swarm_size}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.boundary not in BOUNDARY_POLICIES:
            raise ValueError(f"boundary must be one of {BOUNDARY_POLICIES}, got {self.boundary!r}")
        if self.si_draws not in SI_DRAW_MODES:
            raise ValueError(f"si_draws must be one of {SI_DRAW_MODES}, got {self.si_draws!r}")
        if self.fi_draws not in FI_DRAW_MODES:
            raise ValueError(f"fi_draws must be one of {FI_DRAW_MODES}, got {self.fi_draws!r}")
        self.topology.validate()

    def resolve_objective(self) -> ObjectiveSpec:
        if isinstance(self.objective, ObjectiveSpec):
            if self.dim is not None and self.dim != self.objective.dim:
                raise ValueError(
                    f"dim={self.dim} conflicts with objective dimension {self.objective.dim}"
                )
            return self.objective
        return get_objective(self.objective, self.dim, self.noise_mode)

    def digest(self, objective: ObjectiveSpec) -> dict:
        return {
            "objective": objective.name,
            "dim": objective.dim,
            "fi_fraction": self.fi_fraction,
            "topology": self.topology.kind,
            "k": self.topology.k,
            "beta": self.topology.beta,
            "m": self.topology.m,
            "pin_seed": self.topology.pin_seed,
            "seed": self.seed,
            "swarm_size": self.swarm_size,
            "iterations": self.iterations,
            "constriction": self.constriction,
            "accel": self.accel,
            "boundary": self.boundary,
            "si_draws": self.si_draws,
            "fi_draws": self.fi_draws,
            "noise_mode": self.noise_mode,
            "rng": "pcg64",
        }


def _run_streams(config: HspsoConfig) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (graph, swarm) streams derived from the run seed."""
    graph_ss, swarm_ss = np.random.SeedSequence(config.seed).spawn(2)
    if config.topology.pin_seed is not None:
        graph_ss = np.random.SeedSequence(config.topology.pin_seed)
    return (
        np.random.Generator(np.random.PCG64(graph_ss)),
        np.random.Generator(np.random.PCG64(swarm_ss)),
    )


def _si_rule(v, x, own_best, neighbor_best, r1, r2, chi, half_phi):
    return chi * (v + half_phi * r1 * (own_best - x) + half_phi * r2 * (neighbor_best - x))


def _fi_rule(v, x, neighbor_bests, r, chi, phi):
    # neighbor_bests: (..., k, dim); r: (..., dim, k). Accumulate in ascending
    # neighbor order so batched and per-particle arithmetic agree bitwise.
    k = neighbor_bests.shape[-2]
    pull = np.zeros_like(x)
    for m in range(k):
        pull = pull + r[..., m] * (neighbor_bests[..., m, :] - x)
    return chi * (v + (phi / k) * pull)


def si_velocity(
    velocity: np.ndarray,
    position: np.ndarray,
    own_best: np.ndarray,
    neighbor_best: np.ndarray,
    rng: np.random.Generator,
    constriction: float = DEFAULT_CONSTRICTION,
    accel: float = DEFAULT_ACCEL,
    per_particle_draw: bool = False,
) -> np.ndarray:
    """Singly-informed velocity update; does not move the particle.

    Draws two Uniform[0,1) factors per dimension (own factor first), or a single
    pair for the whole particle when per_particle_draw is set.
    """
    d = len(position)
    if per_particle_draw:
        r = rng.random(2)
        r1, r2 = r[0], r[1]
    else:
        r = rng.random((d, 2))
        r1, r2 = r[:, 0], r[:, 1]
    return _si_rule(velocity, position, own_best, neighbor_best, r1, r2, constriction, 0.5 * accel)


def fi_velocity(
    velocity: np.ndarray,
    position: np.ndarray,
    neighbor_bests: np.ndarray,
    rng: np.random.Generator,
    constriction: float = DEFAULT_CONSTRICTION,
    accel: float = DEFAULT_ACCEL,
    per_dimension_draw: bool = False,
) -> np.ndarray:
    """Fully-informed velocity update; neighbor_bests is (k, dim) in ascending
    neighbor-index order.

    Draws one Uniform[0,1) factor per neighbor in ascending order, shared
    across dimensions; with per_dimension_draw the factors are redrawn per
    dimension (per neighbor ascending within each dimension).
    """
    neighbor_bests = np.asarray(neighbor_bests, dtype=float)
    if neighbor_bests.ndim != 2 or neighbor_bests.shape[0] < 1:
        raise ValueError("need at least one neighbor personal best, shaped (k, dim)")
    d = len(position)
    k = neighbor_bests.shape[0]
    if per_dimension_draw:
        r = rng.random((d, k))
    else:
        r = rng.random(k)[None, :]
    return _fi_rule(velocity, position, neighbor_bests, r, constriction, accel)


@dataclass(frozen=True)
class Particle:
    """Read-only snapshot of one particle."""

    index: int
    strategy: str
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_fitness: float


class Swarm:
    """Swarm state plus one optimization step.

    Construction performs the full initialization: uniform positions inside the
    objective bounds, zero velocities, personal bests at the initial positions
    with their evaluated fitness, and the random fully-informed subset of size
    floor(fi_fraction * N).
    """

    def __init__(
        self,
        config: HspsoConfig,
        objective: ObjectiveSpec,
        graph: Graph,
        rng: np.random.Generator,
    ):
        config.validate()
        n = config.swarm_size
        if graph.n != n:
            raise ValueError(f"graph has {graph.n} nodes but swarm_size is {n}")
        if any(len(a) == 0 for a in graph.adjacency):
            raise ValueError("graph has isolated nodes; every particle needs neighbors")

        self.config = config
        self.objective = objective
        self.graph = graph
        self.rng = rng
        self.iteration = 0
        d = objective.dim
        self._lower = objective.lower
        self._upper = objective.upper

        self.x = rng.uniform(self._lower, self._upper, (n, d))
        self.v = np.zeros((n, d))

        fi_count = int(math.floor(config.fi_fraction * n))
        fi_idx = rng.choice(n, size=fi_count, replace=False)
        self.fi_mask = np.zeros(n, dtype=bool)
        self.fi_mask[fi_idx] = True

        self.pbest = self.x.copy()
        self.pbest_fit = np.array(
            [objective.evaluate(self.x[i], rng) for i in range(n)], dtype=float
        )

        self.fi_improvements = 0
        self.total_improvements = 0
        self.si_updates = 0
        self.fi_updates = 0

        self._nbrs = [np.asarray(a, dtype=np.intp) for a in graph.adjacency]
        self._si_indices = np.flatnonzero(~self.fi_mask)
        self._fi_indices = np.flatnonzero(self.fi_mask)
        self._build_neighbor_tables()
        self._refresh_global_best()

    def _build_neighbor_tables(self):
        n = self.config.swarm_size
        si = self._si_indices
        if si.size:
            kmax = max(len(self._nbrs[i]) for i in si)
            self._si_nbr_pad = np.zeros((len(si), kmax), dtype=np.intp)
            self._si_nbr_valid = np.zeros((len(si), kmax), dtype=bool)
            for row, i in enumerate(si):
                nb = self._nbrs[i]
                self._si_nbr_pad[row, : len(nb)] = nb
                self._si_nbr_valid[row, : len(nb)] = True
        # Fully-informed particles grouped by degree so each group's neighbor
        # bests form a rectangular (group, k, dim) tensor.
        self._fi_groups: list[tuple[int, np.ndarray, np.ndarray]] = []
        self._fi_group_of = np.full(n, -1, dtype=np.intp)
        self._fi_slot_of = np.full(n, -1, dtype=np.intp)
        degrees = np.array([len(self._nbrs[i]) for i in range(n)])
        for kval in sorted(set(degrees[self._fi_indices])) if self._fi_indices.size else []:
            members = self._fi_indices[degrees[self._fi_indices] == kval]
            nbr_matrix = np.vstack([self._nbrs[i] for i in members])
            gi = len(self._fi_groups)
            self._fi_groups.append((int(kval), members, nbr_matrix))
            self._fi_group_of[members] = gi
            self._fi_slot_of[members] = np.arange(len(members))

    # -- views ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.config.swarm_size

    @property
    def fi_count(self) -> int:
        return int(self.fi_mask.sum())

    @property
    def global_best_fitness(self) -> float:
        return self._gbest_fit

    @property
    def global_best_position(self) -> np.ndarray:
        return self._gbest_pos.copy()

    def particle(self, i: int) -> Particle:
        if not 0 <= i < self.n:
            raise ValueError(f"particle index {i} out of range [0, {self.n})")
        return Particle(
            index=i,
            strategy="FI" if self.fi_mask[i] else "SI",
            position=self.x[i].copy(),
            velocity=self.v[i].copy(),
            best_position=self.pbest[i].copy(),
            best_fitness=float(self.pbest_fit[i]),
        )

    def _refresh_global_best(self):
        b = int(np.argmin(self.pbest_fit))
        self._gbest_fit = float(self.pbest_fit[b])
        self._gbest_pos = self.pbest[b].copy()

    # -- stepping ------------------------------------------------------------

    def step(self) -> None:
        """Advance one iteration (synchronous velocity/position/personal-best update)."""
        if self.objective.stochastic:
            self._step_reference()
        else:
            self._step_vectorized()
        self.si_updates += len(self._si_indices)
        self.fi_updates += len(self._fi_indices)
        self._refresh_global_best()
        self.iteration += 1

    def _apply_boundary_row(self, i: int) -> bool:
        """Apply the boundary policy to one particle; return whether to evaluate."""
        if self.config.boundary == "clamp":
            below = self.x[i] < self._lower
            above = self.x[i] > self._upper
            self.x[i] = np.where(below, self._lower, np.where(above, self._upper, self.x[i]))
            self.v[i] = np.where(below | above, 0.0, self.v[i])
            return True
        return bool(np.all((self.x[i] >= self._lower) & (self.x[i] <= self._upper)))

    def _record_improvement(self, i: int, fit: float) -> None:
        if fit < self.pbest_fit[i]:
            self.pbest[i] = self.x[i]
            self.pbest_fit[i] = fit
            self.total_improvements += 1
            if self.fi_mask[i]:
                self.fi_improvements += 1

    def _step_reference(self) -> None:
        """Per-particle step, the literal reading of the update rules.

        Used for stochastic objectives, whose noise draws interleave with the
        velocity draws particle by particle; also serves as the oracle the
        vectorized step is tested against.
        """
        cfg = self.config
        pbest_snap = self.pbest.copy()
        pfit_snap = self.pbest_fit.copy()
        for i in range(self.n):
            nbrs = self._nbrs[i]
            if self.fi_mask[i]:
                vnew = fi_velocity(
                    self.v[i], self.x[i], pbest_snap[nbrs], self.rng,
                    cfg.constriction, cfg.accel,
                    per_dimension_draw=cfg.fi_draws == "per-dimension",
                )
            else:
                pick = int(np.argmin(pfit_snap[nbrs]))
                vnew = si_velocity(
                    self.v[i], self.x[i], pbest_snap[i], pbest_snap[nbrs[pick]], self.rng,
                    cfg.constriction, cfg.accel,
                    per_particle_draw=cfg.si_draws == "per-particle",
                )
            self.v[i] = vnew
            self.x[i] = self.x[i] + vnew
            if self._apply_boundary_row(i):
                self._record_improvement(i, self.objective.evaluate(self.x[i], self.rng))

    def _step_vectorized(self) -> None:
        """Batched step, bit-identical to _step_reference for deterministic objectives."""
        cfg = self.config
        n, d = self.x.shape
        per_particle = cfg.si_draws == "per-particle"
        fi_per_dim = cfg.fi_draws == "per-dimension"

        # Draws happen particle by particle in index order (the stream contract);
        # only the arithmetic is batched.
        r_si = np.empty((n, 2) if per_particle else (n, d, 2))
        fi_bufs = [
            np.empty((len(members), d if fi_per_dim else 1, kval))
            for kval, members, _ in self._fi_groups
        ]
        for i in range(n):
            if self.fi_mask[i]:
                gi = self._fi_group_of[i]
                kval = self._fi_groups[gi][0]
                fi_bufs[gi][self._fi_slot_of[i]] = self.rng.random(
                    (d, kval) if fi_per_dim else kval
                )
            else:
                r_si[i] = self.rng.random(2 if per_particle else (d, 2))

        vnew = np.empty_like(self.v)
        si = self._si_indices
        if si.size:
            nbr_fit = np.where(self._si_nbr_valid, self.pbest_fit[self._si_nbr_pad], np.inf)
            pick = np.argmin(nbr_fit, axis=1)
            nb_idx = self._si_nbr_pad[np.arange(len(si)), pick]
            if per_particle:
                r1 = r_si[si, 0][:, None]
                r2 = r_si[si, 1][:, None]
            else:
                r1 = r_si[si, :, 0]
                r2 = r_si[si, :, 1]
            vnew[si] = _si_rule(
                self.v[si], self.x[si], self.pbest[si], self.pbest[nb_idx],
                r1, r2, cfg.constriction, 0.5 * cfg.accel,
            )
        for (kval, members, nbr_matrix), rbuf in zip(self._fi_groups, fi_bufs):
            vnew[members] = _fi_rule(
                self.v[members], self.x[members], self.pbest[nbr_matrix], rbuf,
                cfg.constriction, cfg.accel,
            )

        self.v = vnew
        self.x = self.x + vnew
        if cfg.boundary == "clamp":
            below = self.x < self._lower
            above = self.x > self._upper
            self.x = np.where(below, self._lower, np.where(above, self._upper, self.x))
            self.v = np.where(below | above, 0.0, self.v)
            rows = np.arange(n)
        else:
            rows = np.flatnonzero(np.all((self.x >= self._lower) & (self.x <= self._upper), axis=1))

        fits = np.full(n, np.inf)
        if rows.size:
            if self.objective.supports_batch:
                fits[rows] = self.objective.evaluate_batch(self.x[rows])
            else:
                fits[rows] = [self.objective.evaluate(self.x[i], self.rng) for i in rows]
        improved = fits < self.pbest_fit
        if improved.any():
            self.pbest[improved] = self.x[improved]
            self.pbest_fit[improved] = fits[improved]
            self.total_improvements += int(improved.sum())
            self.fi_improvements += int((improved & self.fi_mask).sum())


def run(config: HspsoConfig) -> RunResult:
    """Initialize a swarm per config and iterate the full budget.

    Returns the per-iteration global-best trajectory (including iteration 0),
    the final fitness and the improvement counters.
    """
    config.validate()
    objective = config.resolve_objective()
    graph_rng, swarm_rng = _run_streams(config)
    graph = config.topology.build(config.swarm_size, graph_rng)
    swarm = Swarm(config, objective, graph, swarm_rng)
    trajectory = np.empty(config.iterations + 1)
    trajectory[0] = swarm.global_best_fitness
    for t in range(config.iterations):
        swarm.step()
        trajectory[t + 1] = swarm.global_best_fitness
    return RunResult(
        trajectory=trajectory,
        final_fitness=float(trajectory[-1]),
        fi_improvements=swarm.fi_improvements,
        total_improvements=swarm.total_improvements,
        iterations=config.iterations,
        config_digest=config.digest(objective),
        si_updates=swarm.si_updates,
        fi_updates=swarm.fi_updates,
    )
