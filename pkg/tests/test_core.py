from __future__ import annotations

import math

import numpy as np
import pytest

from hspso.core import (
    HspsoConfig,
    Swarm,
    TopologySpec,
    _run_streams,
    fi_velocity,
    run,
    si_velocity,
)
from hspso.graphs import Graph, ring
from hspso.objectives import ObjectiveSpec, get_objective

from conftest import ConstantRng, make_rng


def build_swarm(config: HspsoConfig, objective: ObjectiveSpec | None = None) -> Swarm:
    objective = objective or config.resolve_objective()
    graph_rng, swarm_rng = _run_streams(config)
    graph = config.topology.build(config.swarm_size, graph_rng)
    return Swarm(config, objective, graph, swarm_rng)


def spy_objective(dim: int = 3, half_width: float = 100.0):
    """Sphere-like objective that records every evaluated position."""
    log: list[np.ndarray] = []

    def scalar(x, rng):
        log.append(x.copy())
        return float(np.sum(x * x))

    spec = ObjectiveSpec(
        name="spy",
        dim=dim,
        lower=np.full(dim, -half_width),
        upper=np.full(dim, half_width),
        stochastic=False,
        _scalar=scalar,
        _batch=None,
    )
    return spec, log


class TestVelocityRules:
    def test_si_hand_value(self):
        v = si_velocity(
            np.array([0.0]), np.array([1.0]), np.array([2.0]), np.array([3.0]),
            ConstantRng(1.0),
        )
        assert v[0] == pytest.approx(4.48335, abs=1e-12)

    def test_si_per_particle_hand_value(self):
        v = si_velocity(
            np.array([0.0]), np.array([1.0]), np.array([2.0]), np.array([3.0]),
            ConstantRng(1.0), per_particle_draw=True,
        )
        assert v[0] == pytest.approx(4.48335, abs=1e-12)

    def test_fi_hand_value_two_neighbors(self):
        v = fi_velocity(
            np.array([0.0]), np.array([1.0]), np.array([[2.0], [3.0]]), ConstantRng(1.0)
        )
        assert v[0] == pytest.approx(4.48335, abs=1e-12)

    def test_fi_hand_value_per_dimension_mode(self):
        v = fi_velocity(
            np.array([0.0]), np.array([1.0]), np.array([[2.0], [3.0]]), ConstantRng(1.0),
            per_dimension_draw=True,
        )
        assert v[0] == pytest.approx(4.48335, abs=1e-12)

    def test_si_pure_damping_when_bests_equal_position(self):
        x = np.array([1.0, -2.0])
        v = np.array([0.5, -0.25])
        out = si_velocity(v, x, x, x, make_rng(0))
        assert np.allclose(out, 0.729 * v, atol=0, rtol=0)

    def test_si_zero_random_gains(self):
        v = np.array([2.0, -3.0])
        out = si_velocity(v, np.zeros(2), np.ones(2), np.full(2, 5.0), ConstantRng(0.0))
        assert np.array_equal(out, 0.729 * v)

    def test_fi_single_neighbor_reduces_to_full_accel(self):
        # one neighbor: chi * (v + phi * r * (p - x))
        v = fi_velocity(np.array([0.0]), np.array([0.0]), np.array([[2.0]]), ConstantRng(1.0))
        assert v[0] == pytest.approx(0.729 * 4.1 * 2.0, abs=1e-12)

    def test_fi_all_bests_at_position_is_damping(self):
        x = np.array([1.0, 2.0, 3.0])
        v = np.array([0.1, -0.2, 0.3])
        out = fi_velocity(v, x, np.stack([x, x, x]), make_rng(1))
        assert np.allclose(out, 0.729 * v, atol=0, rtol=0)

    def test_fi_rejects_empty_neighborhood(self):
        with pytest.raises(ValueError):
            fi_velocity(np.zeros(2), np.zeros(2), np.empty((0, 2)), make_rng(0))

    def test_si_draw_order_r1_before_r2_per_dimension(self):
        # same stream consumed as (d, 2) in C order: (d0 r1, d0 r2, d1 r1, ...)
        rng_a, rng_b = make_rng(3), make_rng(3)
        d = 4
        v = si_velocity(np.zeros(d), np.zeros(d), np.ones(d), np.full(d, 2.0), rng_a)
        draws = rng_b.random((d, 2))
        expected = 0.729 * (2.05 * draws[:, 0] * 1.0 + 2.05 * draws[:, 1] * 2.0)
        assert np.array_equal(v, expected)

    def test_fi_draw_order_per_neighbor_ascending(self):
        rng_a, rng_b = make_rng(4), make_rng(4)
        bests = np.array([[1.0, 0.0], [3.0, 1.0], [5.0, -1.0]])
        v = fi_velocity(np.zeros(2), np.zeros(2), bests, rng_a)
        r = rng_b.random(3)
        pull = sum(r[m] * bests[m] for m in range(3))
        expected = 0.729 * ((4.1 / 3.0) * pull)
        assert np.allclose(v, expected, atol=1e-15)


class TestInitialization:
    def test_fi_count_floor(self):
        for lam, expected in [(0.0, 0), (0.3, 15), (1.0, 50)]:
            swarm = build_swarm(HspsoConfig(objective="f1", fi_fraction=lam, iterations=1, seed=2))
            assert swarm.fi_count == expected

    @pytest.mark.parametrize("lam", [round(0.1 * i, 1) for i in range(11)])
    def test_fi_count_floor_full_grid(self, lam):
        swarm = build_swarm(HspsoConfig(objective="f1", fi_fraction=lam, iterations=1, seed=3))
        assert swarm.fi_count == math.floor(lam * 50)

    def test_positions_inside_bounds_velocities_zero(self):
        swarm = build_swarm(HspsoConfig(objective="f5", iterations=1, seed=4))
        assert np.all(swarm.x >= -5.12) and np.all(swarm.x <= 5.12)
        assert np.array_equal(swarm.v, np.zeros_like(swarm.v))

    def test_pbest_equals_initial_position_and_fitness(self):
        swarm = build_swarm(HspsoConfig(objective="f1", iterations=1, seed=5))
        assert np.array_equal(swarm.pbest, swarm.x)
        expected = np.array([float(np.sum(x * x)) for x in swarm.x])
        assert np.array_equal(swarm.pbest_fit, expected)

    def test_position_draw_order_particle_then_dimension(self):
        config = HspsoConfig(objective="f1", dim=7, swarm_size=9, iterations=1, seed=6)
        swarm = build_swarm(config)
        _, swarm_rng = _run_streams(config)
        expected = swarm_rng.uniform(np.full(7, -100.0), np.full(7, 100.0), (9, 7))
        assert np.array_equal(swarm.x, expected)

    def test_graph_size_mismatch_rejected(self):
        config = HspsoConfig(objective="f1", swarm_size=50, iterations=1)
        objective = config.resolve_objective()
        with pytest.raises(ValueError):
            Swarm(config, objective, ring(40, 4), make_rng(0))

    def test_isolated_node_rejected(self):
        config = HspsoConfig(objective="f1", dim=3, swarm_size=3, iterations=1)
        objective = get_objective("f1", dim=3)
        lonely = Graph(3, ((1,), (0,), ()))
        with pytest.raises(ValueError):
            Swarm(config, objective, lonely, make_rng(0))

    def test_bad_fraction_rejected(self):
        with pytest.raises(ValueError):
            HspsoConfig(objective="f1", fi_fraction=1.2).validate()
        with pytest.raises(ValueError):
            HspsoConfig(objective="f1", fi_fraction=-0.1).validate()

    def test_strategy_fixed_over_run(self):
        swarm = build_swarm(HspsoConfig(objective="f1", fi_fraction=0.5, iterations=1, seed=7))
        before = swarm.fi_mask.copy()
        for _ in range(5):
            swarm.step()
        assert np.array_equal(swarm.fi_mask, before)

    def test_particle_view(self):
        swarm = build_swarm(HspsoConfig(objective="f1", fi_fraction=0.3, iterations=1, seed=8))
        p = swarm.particle(0)
        assert p.index == 0
        assert p.strategy in ("SI", "FI")
        assert p.best_fitness == swarm.pbest_fit[0]
        with pytest.raises(ValueError):
            swarm.particle(50)


class TestStep:
    def test_fixed_point_with_zero_draws(self):
        swarm = build_swarm(HspsoConfig(objective="f1", fi_fraction=0.4, iterations=1, seed=9))
        swarm.v[:] = 0.0
        swarm.pbest = swarm.x.copy()
        swarm.rng = ConstantRng(0.0)
        x_before = swarm.x.copy()
        swarm.step()
        assert np.array_equal(swarm.x, x_before)

    def test_constriction_damping_when_bests_equal_positions(self):
        swarm = build_swarm(HspsoConfig(objective="f1", fi_fraction=0.5, iterations=1, seed=10))
        swarm.pbest = swarm.x.copy()
        swarm.pbest_fit = np.array([float(np.sum(x * x)) for x in swarm.x])
        swarm.v = make_rng(11).uniform(-1, 1, swarm.v.shape)
        v_before = swarm.v.copy()
        swarm.step()
        assert np.allclose(np.abs(swarm.v), 0.729 * np.abs(v_before), atol=0, rtol=0)

    def test_lambda_endpoints_never_run_other_path(self):
        for lam, si_expected, fi_expected in [(0.0, 50 * 3, 0), (1.0, 0, 50 * 3)]:
            swarm = build_swarm(HspsoConfig(objective="f1", fi_fraction=lam, iterations=3, seed=12))
            for _ in range(3):
                swarm.step()
            assert swarm.si_updates == si_expected
            assert swarm.fi_updates == fi_expected

    def test_global_best_monotone_deterministic(self):
        result = run(HspsoConfig(objective="f5", fi_fraction=0.3, iterations=200, seed=13))
        assert np.all(np.diff(result.trajectory) <= 0.0)
        assert result.final_fitness >= 0.0

    def test_pbest_fitness_matches_stored_position_and_never_rises(self):
        spec, _ = spy_objective(dim=3)
        config = HspsoConfig(objective=spec, fi_fraction=0.3, swarm_size=10, iterations=20,
                             topology=TopologySpec("ring", k=2), seed=14)
        swarm = build_swarm(config, spec)
        previous = swarm.pbest_fit.copy()
        for _ in range(20):
            swarm.step()
            assert np.all(swarm.pbest_fit <= previous)
            previous = swarm.pbest_fit.copy()
        # recorded fitness is exactly the objective at the recorded best position
        for i in range(10):
            assert swarm.pbest_fit[i] == float(np.sum(swarm.pbest[i] ** 2))

    def test_synchronous_update_reads_previous_iteration_bests(self):
        # particle 1's SI update must see particle 0's pbest as of the previous
        # iteration even though particle 0 improves during the same step
        config = HspsoConfig(objective="f1", dim=2, fi_fraction=0.0, swarm_size=3,
                             topology=TopologySpec("ring", k=2), iterations=1, seed=15)
        objective = get_objective("f1", dim=2)
        swarm = build_swarm(config, objective)
        pbest_before = swarm.pbest.copy()
        pfit_before = swarm.pbest_fit.copy()
        rng_replay = ConstantRng(0.5)
        swarm.rng = ConstantRng(0.5)
        swarm.step()
        # replay by hand using the frozen snapshot
        for i in range(3):
            nbrs = [j for j in ((i - 1) % 3, (i + 1) % 3)]
            nbrs.sort()
            best_nb = min(nbrs, key=lambda j: pfit_before[j])
            expected_v = si_velocity(
                np.zeros(2), pbest_before[i], pbest_before[i], pbest_before[best_nb], rng_replay
            )
            assert np.array_equal(swarm.v[i], expected_v)

    def test_boundary_skip_never_evaluates_outside(self):
        spec, log = spy_objective(dim=2, half_width=0.5)
        config = HspsoConfig(objective=spec, fi_fraction=0.5, swarm_size=8, iterations=30,
                             topology=TopologySpec("ring", k=2), seed=16, boundary="skip")
        swarm = build_swarm(config, spec)
        for _ in range(30):
            swarm.step()
        for x in log:
            assert np.all(x >= -0.5) and np.all(x <= 0.5)

    def test_boundary_clamp_keeps_positions_inside_and_zeroes_velocity(self):
        spec, log = spy_objective(dim=2, half_width=0.5)
        config = HspsoConfig(objective=spec, fi_fraction=0.5, swarm_size=8, iterations=30,
                             topology=TopologySpec("ring", k=2), seed=17, boundary="clamp")
        swarm = build_swarm(config, spec)
        for _ in range(30):
            swarm.step()
            at_lo = swarm.x == -0.5
            at_hi = swarm.x == 0.5
            assert np.all(swarm.x >= -0.5) and np.all(swarm.x <= 0.5)
            assert np.all(swarm.v[at_lo | at_hi] == 0.0)

    def test_vectorized_matches_reference_bitwise(self):
        for name in ("f1", "f6"):
            for lam in (0.0, 0.35, 1.0):
                for topo in (TopologySpec("ring", k=4), TopologySpec("scale-free", m=2)):
                    config = HspsoConfig(objective=name, fi_fraction=lam, swarm_size=16,
                                         iterations=1, topology=topo, seed=18)
                    a = build_swarm(config)
                    b = build_swarm(config)
                    for _ in range(4):
                        a._step_vectorized()
                        b._step_reference()
                    assert np.array_equal(a.x, b.x)
                    assert np.array_equal(a.v, b.v)
                    assert np.array_equal(a.pbest_fit, b.pbest_fit)
                    assert a.total_improvements == b.total_improvements


class TestRun:
    def test_bit_identical_repeats(self):
        config = HspsoConfig(objective="f1", fi_fraction=0.3, iterations=120,
                             topology=TopologySpec("ring", k=4), seed=19)
        a, b = run(config), run(config)
        assert np.array_equal(a.trajectory, b.trajectory)
        assert a.final_fitness == b.final_fitness
        assert a.fi_improvements == b.fi_improvements
        assert a.total_improvements == b.total_improvements

    def test_stochastic_objective_repeatable(self):
        config = HspsoConfig(objective="f3", fi_fraction=0.5, iterations=40, seed=20)
        a, b = run(config), run(config)
        assert np.array_equal(a.trajectory, b.trajectory)

    def test_trajectory_length_and_final(self):
        result = run(HspsoConfig(objective="f1", iterations=77, seed=21))
        assert len(result.trajectory) == 78
        assert result.final_fitness == result.trajectory[-1]

    def test_different_seeds_differ(self):
        r1 = run(HspsoConfig(objective="f1", iterations=30, seed=22))
        r2 = run(HspsoConfig(objective="f1", iterations=30, seed=23))
        assert not np.array_equal(r1.trajectory, r2.trajectory)

    def test_digest_contents(self):
        result = run(HspsoConfig(objective="f1", fi_fraction=0.2, iterations=5, seed=24))
        digest = result.config_digest
        assert digest["objective"] == "f1"
        assert digest["fi_fraction"] == 0.2
        assert digest["rng"] == "pcg64"
        assert digest["seed"] == 24

    def test_pinned_graph_reused_across_seeds(self):
        topo = TopologySpec("scale-free", m=2, pin_seed=99)
        g1 = topo.build(50, _run_streams(HspsoConfig(seed=1, topology=topo))[0])
        g2 = topo.build(50, _run_streams(HspsoConfig(seed=2, topology=topo))[0])
        assert g1.adjacency == g2.adjacency

    def test_unpinned_graph_varies_with_seed(self):
        topo = TopologySpec("scale-free", m=2)
        g1 = topo.build(50, _run_streams(HspsoConfig(seed=1, topology=topo))[0])
        g2 = topo.build(50, _run_streams(HspsoConfig(seed=2, topology=topo))[0])
        assert g1.adjacency != g2.adjacency

    def test_fipso_converges_on_sphere(self):
        # full-information swarm drives the unimodal sphere deep quickly in a
        # majority of seeds
        wins = 0
        for seed in range(20):
            result = run(HspsoConfig(objective="f1", fi_fraction=1.0, swarm_size=50,
                                     iterations=5000, topology=TopologySpec("ring", k=4),
                                     seed=seed, fi_draws="per-dimension"))
            wins += result.final_fitness < 1e-10
        assert wins > 10

    def test_objective_instance_accepted(self):
        spec = get_objective("f1", dim=4)
        result = run(HspsoConfig(objective=spec, swarm_size=10, iterations=10,
                                 topology=TopologySpec("ring", k=2), seed=25))
        assert result.config_digest["objective"] == "f1"
        assert result.config_digest["dim"] == 4
