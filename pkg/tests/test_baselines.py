import numpy as np
import pytest

from simbeam import (
    AoConfig,
    PhaseConfig,
    ao_optimize,
    build_propagation,
    effective_gains,
    iterative_water_filling,
    path_losses,
    random_phase_iwf,
    sample_channel,
    spatial_correlation,
    sum_rate,
    water_fill,
)
from simbeam.baselines import interference_gains

from conftest import desk_budget, desk_geometry


def draw_instance(geom, seed):
    model = spatial_correlation(geom)
    channel = sample_channel(model, path_losses(geom), np.random.default_rng(seed))
    return channel, build_propagation(geom)


def test_water_fill_single_user():
    p, level = water_fill(np.array([0.25]), 0.01)
    assert p[0] == pytest.approx(0.01, rel=1e-12)
    assert level == pytest.approx(0.26, rel=1e-12)


def test_water_fill_two_user_closed_form():
    # both active: p_k = mu - 1/g_k with mu = (P + sum 1/g) / 2
    inverse = np.array([0.2, 0.5])
    total = 1.0
    p, level = water_fill(inverse, total)
    mu = (total + inverse.sum()) / 2.0
    np.testing.assert_allclose(p, mu - inverse, rtol=1e-10)
    assert level == pytest.approx(mu, rel=1e-12)
    assert p.sum() == pytest.approx(total, rel=1e-10)


def test_water_fill_shuts_off_weak_user():
    # second inverse gain above the water level: all power to the first
    p, level = water_fill(np.array([0.1, 5.0]), 0.5)
    assert p[1] == 0.0
    assert p[0] == pytest.approx(0.5, rel=1e-10)
    assert level == pytest.approx(0.6, rel=1e-10)


def test_water_fill_dead_user_inf():
    p, _ = water_fill(np.array([0.3, np.inf]), 1.0)
    assert p[1] == 0.0
    assert p[0] == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(ValueError):
        water_fill(np.array([np.inf, np.inf]), 1.0)


def test_iwf_single_user_gets_everything():
    res = iterative_water_filling(np.array([[3.0]]), 1e-3, 0.01)
    assert res.allocation.power[0] == pytest.approx(0.01, rel=1e-9)
    assert res.converged
    assert not res.degenerate


def test_iwf_kkt_no_interference():
    # diagonal gain tables: the fixed point is plain water-filling, so the
    # KKT conditions hold at bisection accuracy
    rng = np.random.default_rng(0)
    for _ in range(10):
        k = int(rng.integers(2, 5))
        g = np.diag(rng.uniform(0.1, 10.0, size=k))
        noise = 10.0 ** rng.uniform(-3, -1)
        total = 1.0
        res = iterative_water_filling(g, noise, total)
        p = res.allocation.power
        inverse = noise / np.diag(g)
        active = p > 0.0
        assert active.any()
        # active users share one water level; inactive sit above it
        np.testing.assert_allclose(
            p[active] + inverse[active], res.water_level, atol=1e-8
        )
        assert np.all(inverse[~active] >= res.water_level - 1e-8)
        assert p.sum() == pytest.approx(total, abs=1e-8)


def test_iwf_symmetric_users_split_evenly():
    gains = np.array([[2.0, 0.0], [0.0, 2.0]])
    res = iterative_water_filling(gains, 1e-2, 1.0)
    np.testing.assert_allclose(res.allocation.power, [0.5, 0.5], atol=1e-9)


def test_iwf_matches_grid_search(geom, budget):
    total, noise = budget.total_power, budget.noise_power
    delta = 1e-3 * total
    grid = np.arange(0.0, total + delta / 2.0, delta)
    for seed in range(5):
        channel, prop = draw_instance(geom, seed)
        rng = np.random.default_rng(100 + seed)
        phases = PhaseConfig.uniform_random(geom.num_layers, geom.atoms_per_layer, rng)
        gains = effective_gains(channel, phases, prop)
        res = iterative_water_filling(gains, noise, total)
        iwf_rate = sum_rate(gains, res.allocation.power, noise)
        rates = np.array(
            [sum_rate(gains, np.array([p1, total - p1]), noise) for p1 in grid]
        )
        best = int(rates.argmax())
        neighbor_floor = min(
            rates[max(best - 1, 0)], rates[min(best + 1, grid.size - 1)]
        )
        assert iwf_rate >= neighbor_floor - 1e-14


def test_iwf_degenerate_all_zero_gains():
    res = iterative_water_filling(np.zeros((3, 3)), 1e-3, 0.3)
    assert res.degenerate
    np.testing.assert_allclose(res.allocation.power, 0.1)
    assert np.isnan(res.water_level)


def test_iwf_validation():
    with pytest.raises(ValueError):
        iterative_water_filling(np.ones((2, 3)), 1e-3, 1.0)
    with pytest.raises(ValueError):
        iterative_water_filling(-np.ones((2, 2)), 1e-3, 1.0)
    with pytest.raises(ValueError):
        iterative_water_filling(np.ones((2, 2)), 0.0, 1.0)
    with pytest.raises(ValueError):
        iterative_water_filling(np.ones((2, 2)), 1e-3, -1.0)
    with pytest.raises(ValueError):
        iterative_water_filling(np.ones((2, 2)), 1e-3, 1.0, max_iter=0)


def test_interference_gains_hand_value():
    gains = np.array([[2.0, 1.0], [1.0, 2.0]])
    p = np.array([1.0, 1.0])
    # desired gain over (interference + noise): 2 / (1 + 1)
    np.testing.assert_allclose(interference_gains(gains, p, 1.0), [1.0, 1.0])


def test_ao_trace_monotone(geom, budget):
    for seed in range(20):
        channel, prop = draw_instance(geom, seed)
        res = ao_optimize(
            channel, prop, budget, rng=np.random.default_rng(1000 + seed)
        )
        diffs = np.diff(res.trace)
        assert np.all(diffs >= -1e-12)
        assert res.final_rate == res.trace[-1]


def test_ao_single_user_reaches_coherent_bound(budget):
    geom = desk_geometry(num_layers=1, atoms_per_layer=9, num_users=1)
    channel, prop = draw_instance(geom, 0)
    res = ao_optimize(channel, prop, budget, rng=np.random.default_rng(0))
    # coherent combining bound: all cascade terms aligned in phase
    w = prop.feed[:, 0]
    bound_gain = float(np.abs(channel.h[0]) @ np.abs(w)) ** 2
    bound_rate = np.log2(1.0 + bound_gain * budget.total_power / budget.noise_power)
    assert res.final_rate >= 0.99 * bound_rate


def test_ao_single_atom_matches_random_phases(budget):
    # M=1: every phase is a global phase, so optimization cannot help
    geom = desk_geometry(atoms_per_layer=1)
    channel, prop = draw_instance(geom, 4)
    ao = ao_optimize(channel, prop, budget, rng=np.random.default_rng(1))
    base = random_phase_iwf(channel, prop, budget, np.random.default_rng(2))
    assert ao.final_rate == pytest.approx(base.rate, abs=1e-9)


def test_ao_improves_on_start(geom, budget):
    channel, prop = draw_instance(geom, 2)
    res = ao_optimize(channel, prop, budget, rng=np.random.default_rng(3))
    assert res.final_rate > res.trace[0]
    assert res.outer_iterations >= 1


def test_ao_config_validation():
    with pytest.raises(ValueError):
        AoConfig(phase_step=0.0)
    with pytest.raises(ValueError):
        AoConfig(max_outer=0)


def test_random_phase_iwf_deterministic(geom, budget):
    channel, prop = draw_instance(geom, 6)
    a = random_phase_iwf(channel, prop, budget, np.random.default_rng(9))
    b = random_phase_iwf(channel, prop, budget, np.random.default_rng(9))
    assert a.rate == b.rate
    np.testing.assert_array_equal(a.phases.theta, b.phases.theta)
    np.testing.assert_array_equal(a.allocation.power, b.allocation.power)
