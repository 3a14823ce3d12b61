"""Scene geometry for a stacked-metasurface transmitter serving ground users.

Coordinate frame: the antenna array sits at height ``bs_height`` on the plane
y = 0, antennas spread along the x-axis and centered on the z-axis. The
metasurface stack extends along +y (the boresight, pointing at the users);
layer l is an N x N grid in the x-z plane at axial offset
``bs_to_sim_gap + (l - 1) * layer_spacing`` from the antenna plane, centered
on the boresight axis (0, y, bs_height). Users stand at ground level (z = 0)
along the y-axis, user k at y = k * user_spacing.

Meta-atom index m maps row-major onto the grid: with 0-based m,
row = m // N and col = m % N; col runs along x with pitch ``atom_pitch[0]``
and row along z with pitch ``atom_pitch[1]``. Phase matrices, propagation
matrices and correlation matrices all share this indexing.

All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SimGeometry:
    """Physical layout of the transmitter stack and the served users.

    Lengths are meters. ``atoms_per_layer`` must be a perfect square N**2;
    ``num_antennas`` must equal ``num_users`` (one antenna carries one user
    stream). ``antenna_spacing`` defaults to half a wavelength and
    ``bs_to_sim_gap`` to the inter-layer spacing when left unset; neither
    default is a physical claim, both are just conventional values.
    """

    num_layers: int
    atoms_per_layer: int
    num_antennas: int
    num_users: int
    wavelength: float
    atom_pitch: tuple[float, float]
    sim_thickness: float
    bs_height: float
    user_spacing: float
    antenna_spacing: float | None = None
    bs_to_sim_gap: float | None = None

    def __post_init__(self) -> None:
        for name in ("num_layers", "atoms_per_layer", "num_antennas", "num_users"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        side = math.isqrt(self.atoms_per_layer)
        if side * side != self.atoms_per_layer:
            raise ValueError(
                f"atoms_per_layer must be a perfect square, got {self.atoms_per_layer}"
            )
        if self.num_antennas != self.num_users:
            raise ValueError(
                "num_antennas must equal num_users "
                f"(got {self.num_antennas} antennas, {self.num_users} users)"
            )
        pitch = self.atom_pitch
        if np.isscalar(pitch):
            pitch = (float(pitch), float(pitch))
        else:
            pitch = (float(pitch[0]), float(pitch[1]))
        object.__setattr__(self, "atom_pitch", pitch)
        if self.antenna_spacing is None:
            object.__setattr__(self, "antenna_spacing", self.wavelength / 2.0)
        if self.bs_to_sim_gap is None:
            object.__setattr__(self, "bs_to_sim_gap", self.layer_spacing)
        positives = {
            "wavelength": self.wavelength,
            "atom_pitch_x": self.atom_pitch[0],
            "atom_pitch_y": self.atom_pitch[1],
            "sim_thickness": self.sim_thickness,
            "bs_height": self.bs_height,
            "user_spacing": self.user_spacing,
            "antenna_spacing": self.antenna_spacing,
            "bs_to_sim_gap": self.bs_to_sim_gap,
        }
        for name, value in positives.items():
            if not (value > 0.0) or not math.isfinite(value):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")

    @property
    def grid_side(self) -> int:
        """N, the side of the N x N atom grid."""
        return math.isqrt(self.atoms_per_layer)

    @property
    def layer_spacing(self) -> float:
        """Axial gap between consecutive layers, sim_thickness / num_layers."""
        return self.sim_thickness / self.num_layers

    def layer_offset(self, layer: int) -> float:
        """Axial (y) offset of layer ``layer`` (1-based) from the antenna plane."""
        return self.bs_to_sim_gap + (layer - 1) * self.layer_spacing


def meta_atom_positions(geom: SimGeometry, layer: int) -> np.ndarray:
    """3-D positions of the M atoms of one layer, shape (M, 3).

    ``layer`` is 1-based. Atoms form an N x N grid centered on the boresight
    axis, row-major as documented in the module docstring.
    """
    if not 1 <= layer <= geom.num_layers:
        raise ValueError(
            f"layer must be in 1..{geom.num_layers}, got {layer}"
        )
    side = geom.grid_side
    dx, dy = geom.atom_pitch
    idx = np.arange(geom.atoms_per_layer)
    row, col = idx // side, idx % side
    half = (side - 1) / 2.0
    pos = np.empty((geom.atoms_per_layer, 3))
    pos[:, 0] = (col - half) * dx
    pos[:, 1] = geom.layer_offset(layer)
    pos[:, 2] = geom.bs_height + (row - half) * dy
    return pos


def antenna_positions(geom: SimGeometry) -> np.ndarray:
    """Antenna positions, shape (S, 3): a centered line along x at bs_height."""
    s = np.arange(geom.num_antennas)
    pos = np.zeros((geom.num_antennas, 3))
    pos[:, 0] = (s - (geom.num_antennas - 1) / 2.0) * geom.antenna_spacing
    pos[:, 2] = geom.bs_height
    return pos


def user_positions(geom: SimGeometry) -> np.ndarray:
    """User positions, shape (K, 3): ground level along y, user k at y = k * spacing."""
    pos = np.zeros((geom.num_users, 3))
    pos[:, 1] = (np.arange(geom.num_users) + 1) * geom.user_spacing
    return pos


def user_distances(geom: SimGeometry) -> np.ndarray:
    """Distance from the array reference point (0, 0, bs_height) to each user."""
    y = (np.arange(geom.num_users) + 1) * geom.user_spacing
    return np.hypot(geom.bs_height, y)


def pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distances between two point sets, shape (len(a), len(b))."""
    diff = a[:, None, :] - b[None, :, :]
    return np.linalg.norm(diff, axis=2)
