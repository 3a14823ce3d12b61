"""Diffraction propagation matrices and the cascaded beamforming matrix.

The coupling between an element at distance d and an atom of the next layer
follows scalar diffraction for aperture cells of area dx * dy stacked at
axial pitch z_s:

    w(d) = (dx * dy * z_s / d) * (1 / (2 pi d) - j / lambda) * exp(j 2 pi d / lambda)

The full stack response is the alternating product of per-layer diagonal
phase factors and inter-layer propagation matrices,

    G = Phi_L W_L Phi_{L-1} W_{L-1} ... Phi_2 W_2 Phi_1,

evaluated right to left (the order the wave traverses the stack), so cached
partial products in the optimizers stay consistent with this module.

``PropagationSet`` is immutable after construction and safe to share across
threads; ``beamforming_matrix`` is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    SimGeometry,
    antenna_positions,
    meta_atom_positions,
    pairwise_distances,
)

TWO_PI = 2.0 * np.pi


@dataclass
class PhaseConfig:
    """Per-layer, per-atom phase angles in radians, shape (L, M).

    Angles are normalized into [0, 2 pi) on construction. The unit-modulus
    coefficients applied by the atoms are ``exp(j * theta)``.
    """

    theta: np.ndarray

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim != 2:
            raise ValueError(f"theta must be 2-D (layers x atoms), got shape {theta.shape}")
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta contains non-finite entries")
        self.theta = np.mod(theta, TWO_PI)

    @property
    def num_layers(self) -> int:
        return self.theta.shape[0]

    @property
    def atoms_per_layer(self) -> int:
        return self.theta.shape[1]

    def phasors(self) -> np.ndarray:
        """exp(j theta), shape (L, M)."""
        return np.exp(1j * self.theta)

    @classmethod
    def zeros(cls, num_layers: int, atoms_per_layer: int) -> "PhaseConfig":
        return cls(np.zeros((num_layers, atoms_per_layer)))

    @classmethod
    def uniform_random(
        cls, num_layers: int, atoms_per_layer: int, rng: np.random.Generator
    ) -> "PhaseConfig":
        return cls(rng.uniform(0.0, TWO_PI, size=(num_layers, atoms_per_layer)))


@dataclass(frozen=True)
class PropagationSet:
    """Fixed propagation matrices of one geometry.

    ``interlayer[i]`` couples layer i+1 to layer i+2 (so the list holds
    W_2 .. W_L and is empty for a single layer); ``feed`` has shape (M, S),
    column s coupling antenna s into the first layer.
    """

    interlayer: tuple[np.ndarray, ...]
    feed: np.ndarray

    @property
    def num_layers(self) -> int:
        return len(self.interlayer) + 1

    @property
    def atoms_per_layer(self) -> int:
        return self.feed.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.feed.shape[1]


def propagation_coefficient(geom: SimGeometry, distance) -> np.ndarray | complex:
    """Complex coupling coefficient at the given distance(s), meters.

    Vectorized over ``distance``; every entry must be strictly positive.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0.0) or not np.all(np.isfinite(d)):
        raise ValueError("distance must be strictly positive and finite")
    dx, dy = geom.atom_pitch
    area_term = dx * dy * geom.layer_spacing / d
    coeff = area_term * (1.0 / (TWO_PI * d) - 1j / geom.wavelength)
    out = coeff * np.exp(1j * TWO_PI * d / geom.wavelength)
    if np.isscalar(distance):
        return complex(out)
    return out


def build_propagation(geom: SimGeometry) -> PropagationSet:
    """Propagation matrices for every adjacent layer pair plus the antenna feed."""
    layer_pos = [meta_atom_positions(geom, l) for l in range(1, geom.num_layers + 1)]
    interlayer = []
    for l in range(2, geom.num_layers + 1):
        dist = pairwise_distances(layer_pos[l - 1], layer_pos[l - 2])
        w = propagation_coefficient(geom, dist)
        w.setflags(write=False)
        interlayer.append(w)
    feed_dist = pairwise_distances(layer_pos[0], antenna_positions(geom))
    feed = propagation_coefficient(geom, feed_dist)
    feed.setflags(write=False)
    return PropagationSet(interlayer=tuple(interlayer), feed=feed)


def beamforming_matrix(phases: PhaseConfig, prop: PropagationSet) -> np.ndarray:
    """Cascaded stack response G, shape (M, M), evaluated right to left."""
    if phases.num_layers != prop.num_layers or phases.atoms_per_layer != prop.atoms_per_layer:
        raise ValueError(
            f"phase configuration is {phases.num_layers}x{phases.atoms_per_layer}, "
            f"propagation set is {prop.num_layers}x{prop.atoms_per_layer}"
        )
    phi = phases.phasors()
    g = np.diag(phi[0])
    for l, w in enumerate(prop.interlayer, start=1):
        g = (w @ g) * phi[l][:, None]
    return g
