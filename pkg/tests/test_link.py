import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simbeam import (
    LinkBudget,
    PhaseConfig,
    PowerAllocation,
    build_propagation,
    dbm_to_watts,
    effective_gains,
    evaluate_sum_rate,
    path_losses,
    sample_channel,
    spatial_correlation,
    sum_rate,
    sum_rate_phase_gradient,
    sinr,
    validate_power,
    watts_to_dbm,
)

from conftest import desk_budget, desk_geometry


def draw_instance(geom, seed):
    model = spatial_correlation(geom)
    channel = sample_channel(model, path_losses(geom), np.random.default_rng(seed))
    prop = build_propagation(geom)
    return channel, prop


def test_dbm_conversions():
    assert dbm_to_watts(10.0) == pytest.approx(0.01, rel=1e-15)
    assert dbm_to_watts(-104.0) == pytest.approx(3.9810717055349695e-14, rel=1e-12)
    assert watts_to_dbm(dbm_to_watts(-30.0)) == pytest.approx(-30.0, abs=1e-12)
    with pytest.raises(ValueError):
        watts_to_dbm(0.0)


def test_sinr_hand_example():
    gains = np.array([[2.0, 1.0], [1.0, 2.0]])
    p = np.array([1.0, 1.0])
    np.testing.assert_allclose(sinr(gains, p, 1.0), [1.0, 1.0])
    assert sum_rate(gains, p, 1.0) == pytest.approx(2.0)


def test_sinr_no_interference():
    gains = np.diag([4.0, 9.0])
    p = np.array([0.5, 1.0])
    np.testing.assert_allclose(sinr(gains, p, 2.0), [1.0, 4.5])


def test_sinr_shape_checks():
    with pytest.raises(ValueError):
        sinr(np.ones((2, 3)), np.ones(2), 1.0)
    with pytest.raises(ValueError):
        sinr(np.ones((2, 2)), np.ones(3), 1.0)


def test_sum_rate_permutation_equivariant(rng):
    gains = rng.random((3, 3))
    p = rng.random(3)
    perm = np.array([2, 0, 1])
    base = sum_rate(gains, p, 1e-3)
    swapped = sum_rate(gains[np.ix_(perm, perm)], p[perm], 1e-3)
    assert swapped == pytest.approx(base, rel=1e-12)


def test_power_allocation_invariants():
    alloc = PowerAllocation(np.array([0.004, 0.006]), 0.01)
    assert alloc.num_antennas == 2
    with pytest.raises(ValueError):
        alloc.power[0] = 1.0
    with pytest.raises(ValueError):
        PowerAllocation(np.array([-0.001, 0.002]), 0.01)
    with pytest.raises(ValueError):
        PowerAllocation(np.array([0.02]), 0.01)
    with pytest.raises(ValueError):
        PowerAllocation(np.array([[0.01]]), 0.01)


def test_validate_power_tolerance(budget):
    total = budget.total_power
    validate_power(np.array([total * 0.5, total * 0.5 * (1.0 + 1e-12)]), budget)
    with pytest.raises(ValueError):
        validate_power(np.array([total, total * 1e-6]), budget)


def test_budget_constructor():
    with pytest.raises(ValueError):
        LinkBudget(0.0, 1.0)
    with pytest.raises(ValueError):
        LinkBudget(1.0, -1.0)
    b = LinkBudget.from_dbm(10.0, -104.0)
    assert b.total_power == pytest.approx(0.01)


def test_effective_gains_definition(geom, rng):
    channel, prop = draw_instance(geom, 7)
    phases = PhaseConfig.uniform_random(geom.num_layers, geom.atoms_per_layer, rng)
    gains = effective_gains(channel, phases, prop)
    assert gains.shape == (geom.num_users, geom.num_antennas)
    # entry (k, j): project user k's channel on the cascade column of antenna j
    from simbeam import beamforming_matrix

    g = beamforming_matrix(phases, prop)
    want = np.abs(channel.h.conj() @ g @ prop.feed) ** 2
    np.testing.assert_allclose(gains, want, rtol=1e-12)


def test_gradient_matches_finite_differences(geom, budget):
    step = 1e-6
    for seed in range(3):
        channel, prop = draw_instance(geom, seed)
        rng = np.random.default_rng(100 + seed)
        phases = PhaseConfig.uniform_random(geom.num_layers, geom.atoms_per_layer, rng)
        p = np.full(geom.num_users, budget.total_power / geom.num_users)
        rate, grad = sum_rate_phase_gradient(channel, phases, p, prop, budget)
        assert rate == pytest.approx(
            evaluate_sum_rate(channel, phases, p, prop, budget), rel=1e-12
        )
        fd = np.empty_like(grad)
        for i in range(geom.num_layers):
            for m in range(geom.atoms_per_layer):
                for sign in (1.0, -1.0):
                    theta = phases.theta.copy()
                    theta[i, m] += sign * step
                    shifted = PhaseConfig(theta)
                    val = evaluate_sum_rate(channel, shifted, p, prop, budget)
                    if sign > 0:
                        hi = val
                    else:
                        lo = val
                fd[i, m] = (hi - lo) / (2.0 * step)
        rel = np.abs(grad - fd).max() / np.abs(fd).max()
        assert rel < 1e-5


def test_gradient_layer_sum_vanishes_single_user(budget):
    # one user: a common phase offset on any layer is invisible, so the
    # gradient summed over a layer's atoms must vanish
    geom = desk_geometry(num_users=1)
    channel, prop = draw_instance(geom, 3)
    rng = np.random.default_rng(9)
    phases = PhaseConfig.uniform_random(geom.num_layers, geom.atoms_per_layer, rng)
    p = np.array([budget.total_power])
    _, grad = sum_rate_phase_gradient(channel, phases, p, prop, budget)
    np.testing.assert_allclose(grad.sum(axis=1), 0.0, atol=1e-12 * np.abs(grad).max())


def test_single_atom_gradient_zero(budget):
    geom = desk_geometry(atoms_per_layer=1, num_users=1)
    channel, prop = draw_instance(geom, 1)
    phases = PhaseConfig.uniform_random(
        geom.num_layers, geom.atoms_per_layer, np.random.default_rng(2)
    )
    p = np.array([budget.total_power])
    rate0, grad = sum_rate_phase_gradient(channel, phases, p, prop, budget)
    np.testing.assert_allclose(grad, 0.0, atol=1e-16)
    other = PhaseConfig.uniform_random(geom.num_layers, geom.atoms_per_layer, np.random.default_rng(5))
    assert evaluate_sum_rate(channel, other, p, prop, budget) == pytest.approx(rate0, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(
    gain=st.floats(min_value=1e-6, max_value=1e3),
    power=st.floats(min_value=1e-6, max_value=1.0),
    noise=st.floats(min_value=1e-12, max_value=1.0),
)
def test_single_user_rate_formula(gain, power, noise):
    gains = np.array([[gain]])
    want = np.log2(1.0 + gain * power / noise)
    assert sum_rate(gains, np.array([power]), noise) == pytest.approx(want, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(min_value=1.5, max_value=100.0))
def test_rate_decreases_with_noise(scale):
    gains = np.array([[2.0, 0.3], [0.5, 1.7]])
    p = np.array([0.4, 0.6])
    assert sum_rate(gains, p, 1e-3 * scale) < sum_rate(gains, p, 1e-3)
