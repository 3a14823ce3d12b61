import numpy as np
import pytest

from simbeam import LinkBudget, SimGeometry, build_environment

SPEED_OF_LIGHT = 299792458.0


def desk_geometry(
    num_layers: int = 2,
    atoms_per_layer: int = 4,
    num_users: int = 2,
    carrier_ghz: float = 28.0,
    bs_height: float = 10.0,
    user_spacing: float = 10.0,
) -> SimGeometry:
    """Reference scene: half-wavelength pitch, five-wavelength stack."""
    lam = SPEED_OF_LIGHT / (carrier_ghz * 1e9)
    return SimGeometry(
        num_layers=num_layers,
        atoms_per_layer=atoms_per_layer,
        num_antennas=num_users,
        num_users=num_users,
        wavelength=lam,
        atom_pitch=(lam / 2.0, lam / 2.0),
        sim_thickness=5.0 * lam,
        bs_height=bs_height,
        user_spacing=user_spacing,
    )


def desk_budget() -> LinkBudget:
    return LinkBudget.from_dbm(10.0, -104.0)


@pytest.fixture
def geom():
    return desk_geometry()


@pytest.fixture
def budget():
    return desk_budget()


@pytest.fixture
def env(geom, budget):
    return build_environment(geom, budget)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
