import numpy as np
import pytest

from simbeam import SimGeometry
from simbeam.geometry import (
    antenna_positions,
    meta_atom_positions,
    pairwise_distances,
    user_distances,
    user_positions,
)

from conftest import desk_geometry


def test_grid_side_and_layer_spacing():
    geom = desk_geometry(num_layers=2, atoms_per_layer=9)
    assert geom.grid_side == 3
    assert geom.layer_spacing == pytest.approx(5.0 * geom.wavelength / 2.0)
    assert geom.layer_offset(1) == pytest.approx(geom.bs_to_sim_gap)
    assert geom.layer_offset(2) == pytest.approx(
        geom.bs_to_sim_gap + geom.layer_spacing
    )


def test_atoms_form_centered_grid():
    geom = desk_geometry(atoms_per_layer=9)
    pos = meta_atom_positions(geom, 1)
    assert pos.shape == (9, 3)
    # grid centered on the boresight axis (x = 0, z = bs_height)
    assert np.mean(pos[:, 0]) == pytest.approx(0.0, abs=1e-15)
    assert np.mean(pos[:, 2]) == pytest.approx(geom.bs_height)
    # row-major indexing: atoms 0 and 1 differ by one x pitch, 0 and 3 by one z pitch
    assert pos[1, 0] - pos[0, 0] == pytest.approx(geom.atom_pitch[0])
    assert pos[3, 2] - pos[0, 2] == pytest.approx(geom.atom_pitch[1])
    # all atoms of one layer share its axial offset
    np.testing.assert_allclose(pos[:, 1], geom.layer_offset(1))


def test_single_atom_sits_on_axis():
    geom = desk_geometry(atoms_per_layer=1)
    pos = meta_atom_positions(geom, 1)
    np.testing.assert_allclose(
        pos, [[0.0, geom.layer_offset(1), geom.bs_height]]
    )


def test_antennas_centered_at_half_wavelength():
    geom = desk_geometry(num_users=2)
    pos = antenna_positions(geom)
    assert pos.shape == (2, 3)
    assert np.mean(pos[:, 0]) == pytest.approx(0.0, abs=1e-15)
    assert pos[1, 0] - pos[0, 0] == pytest.approx(geom.wavelength / 2.0)
    np.testing.assert_allclose(pos[:, 2], geom.bs_height)
    np.testing.assert_allclose(pos[:, 1], 0.0)


def test_user_layout_and_distances():
    geom = desk_geometry(num_users=3, bs_height=10.0, user_spacing=10.0)
    pos = user_positions(geom)
    np.testing.assert_allclose(pos[:, 1], [10.0, 20.0, 30.0])
    np.testing.assert_allclose(pos[:, [0, 2]], 0.0)
    d = user_distances(geom)
    np.testing.assert_allclose(d, np.hypot(10.0, [10.0, 20.0, 30.0]))


def test_pairwise_distances_match_brute_force(rng):
    a = rng.normal(size=(4, 3))
    b = rng.normal(size=(5, 3))
    d = pairwise_distances(a, b)
    for i in range(4):
        for j in range(5):
            assert d[i, j] == pytest.approx(np.linalg.norm(a[i] - b[j]))


def test_rejects_non_square_atom_count():
    with pytest.raises(ValueError, match="perfect square"):
        desk_geometry(atoms_per_layer=5)


def test_rejects_antenna_user_mismatch():
    lam = 0.01
    with pytest.raises(ValueError, match="num_antennas must equal num_users"):
        SimGeometry(
            num_layers=1,
            atoms_per_layer=4,
            num_antennas=2,
            num_users=3,
            wavelength=lam,
            atom_pitch=(lam / 2, lam / 2),
            sim_thickness=5 * lam,
            bs_height=10.0,
            user_spacing=10.0,
        )


def test_rejects_nonpositive_lengths():
    with pytest.raises(ValueError, match="wavelength"):
        SimGeometry(
            num_layers=1,
            atoms_per_layer=1,
            num_antennas=1,
            num_users=1,
            wavelength=0.0,
            atom_pitch=(0.005, 0.005),
            sim_thickness=0.05,
            bs_height=10.0,
            user_spacing=10.0,
        )


def test_layer_index_bounds_checked(geom):
    with pytest.raises(ValueError, match="layer"):
        meta_atom_positions(geom, 0)
    with pytest.raises(ValueError, match="layer"):
        meta_atom_positions(geom, geom.num_layers + 1)
