import mpmath as mp
import numpy as np
import pytest

from simbeam import (
    PhaseConfig,
    beamforming_matrix,
    build_propagation,
    propagation_coefficient,
)
from simbeam.geometry import antenna_positions, meta_atom_positions, pairwise_distances

from conftest import desk_geometry


def coefficient_oracle(dx, dy, zs, lam, d):
    """Arbitrary-precision evaluation of the element coupling coefficient."""
    with mp.workdps(60):
        d_, lam_ = mp.mpf(d), mp.mpf(lam)
        amp = mp.mpf(dx) * mp.mpf(dy) * mp.mpf(zs) / d_
        kernel = mp.mpc(1 / (2 * mp.pi * d_), -1 / lam_)
        w = amp * kernel * mp.expj(2 * mp.pi * d_ / lam_)
        return complex(w)


def test_coefficient_matches_high_precision_oracle(geom, rng):
    zs = geom.layer_spacing
    # hop distances drawn over the physical intra-stack range
    distances = rng.uniform(1e-3, 0.1, size=20)
    for d in distances:
        got = propagation_coefficient(geom, d)
        want = coefficient_oracle(
            geom.atom_pitch[0], geom.atom_pitch[1], zs, geom.wavelength, d
        )
        assert abs(got - want) / abs(want) < 1e-12


def test_coefficient_vectorizes(geom, rng):
    d = rng.uniform(1e-3, 0.1, size=7)
    batch = propagation_coefficient(geom, d)
    singles = np.array([propagation_coefficient(geom, v) for v in d])
    np.testing.assert_array_equal(batch, singles)


def test_coefficient_rejects_nonpositive_distance(geom):
    with pytest.raises(ValueError):
        propagation_coefficient(geom, 0.0)
    with pytest.raises(ValueError):
        propagation_coefficient(geom, -1.0)


def test_phase_config_normalizes_to_principal_range(rng):
    theta = rng.uniform(-20.0, 20.0, size=(2, 4))
    config = PhaseConfig(theta)
    assert np.all(config.theta >= 0.0)
    assert np.all(config.theta < 2.0 * np.pi)
    np.testing.assert_allclose(
        np.exp(1j * config.theta), np.exp(1j * theta), atol=1e-12
    )


def test_phase_config_constructors():
    z = PhaseConfig.zeros(3, 4)
    assert z.theta.shape == (3, 4)
    assert np.all(z.theta == 0.0)
    u = PhaseConfig.uniform_random(2, 9, np.random.default_rng(7))
    assert u.theta.shape == (2, 9)
    assert np.all((u.theta >= 0.0) & (u.theta < 2.0 * np.pi))


def test_propagation_set_shapes(geom):
    prop = build_propagation(geom)
    assert prop.num_layers == geom.num_layers
    assert prop.atoms_per_layer == geom.atoms_per_layer
    assert prop.num_antennas == geom.num_antennas
    assert len(prop.interlayer) == geom.num_layers - 1
    for w in prop.interlayer:
        assert w.shape == (geom.atoms_per_layer, geom.atoms_per_layer)
    assert prop.feed.shape == (geom.atoms_per_layer, geom.num_antennas)


def test_propagation_entries_match_pairwise_coefficients(geom):
    prop = build_propagation(geom)
    first = meta_atom_positions(geom, 1)
    second = meta_atom_positions(geom, 2)
    d = pairwise_distances(second, first)
    np.testing.assert_allclose(
        prop.interlayer[0], propagation_coefficient(geom, d), rtol=1e-15
    )
    d_feed = pairwise_distances(first, antenna_positions(geom))
    np.testing.assert_allclose(
        prop.feed, propagation_coefficient(geom, d_feed), rtol=1e-15
    )


def test_beamforming_matrix_matches_explicit_product(geom, rng):
    prop = build_propagation(geom)
    phases = PhaseConfig.uniform_random(geom.num_layers, geom.atoms_per_layer, rng)
    got = beamforming_matrix(phases, prop)
    want = np.diag(np.exp(1j * phases.theta[0]))
    for layer in range(1, geom.num_layers):
        want = np.diag(np.exp(1j * phases.theta[layer])) @ prop.interlayer[layer - 1] @ want
    np.testing.assert_allclose(got, want, rtol=1e-13)


def test_single_layer_beamforming_is_diagonal(rng):
    geom = desk_geometry(num_layers=1, atoms_per_layer=4)
    prop = build_propagation(geom)
    phases = PhaseConfig.uniform_random(1, 4, rng)
    got = beamforming_matrix(phases, prop)
    np.testing.assert_allclose(got, np.diag(np.exp(1j * phases.theta[0])))


def test_global_phase_equivariance(geom, rng):
    # adding a constant to one layer multiplies the cascade by a unit phasor
    prop = build_propagation(geom)
    phases = PhaseConfig.uniform_random(geom.num_layers, geom.atoms_per_layer, rng)
    base = beamforming_matrix(phases, prop)
    delta = 0.7331
    for layer in range(geom.num_layers):
        theta = phases.theta.copy()
        theta[layer] += delta
        shifted = beamforming_matrix(PhaseConfig(theta), prop)
        err = np.linalg.norm(shifted - np.exp(1j * delta) * base) / np.linalg.norm(base)
        assert err < 1e-12
