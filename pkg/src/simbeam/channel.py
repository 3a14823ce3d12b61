"""Spatially correlated Rayleigh fading from the last layer to each user.

Under isotropic scattering the correlation between atoms m and m' of the
radiating (last) layer is sinc-shaped, R[m, m'] = sinc(2 d / lambda) with
sinc(x) = sin(pi x) / (pi x), and the channel of user k is drawn as
h_k ~ CN(0, beta_k R) where beta_k is the link's path-loss gain.

At half-wavelength pitch R is nearly singular, so the sampling factor is
built from an eigendecomposition with negative eigenvalues clipped to a
configurable floor instead of a Cholesky factor.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import SimGeometry, meta_atom_positions, pairwise_distances, user_distances

EIGENVALUE_WARN_SCALE = 1e-8


@dataclass(frozen=True)
class CorrelationModel:
    """Spatial correlation matrix R plus a factor F with F F^T ~= R for sampling.

    ``min_eigenvalue`` records the most negative eigenvalue seen before
    clipping; for sane geometries it only reflects rounding noise.
    """

    correlation: np.ndarray
    factor: np.ndarray
    regularization_floor: float
    min_eigenvalue: float


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of all user channels: ``h`` has shape (K, M).

    ``beta`` keeps the per-user path gains the draw was scaled by (None when
    the realization was loaded from a dump file, which stores only vectors);
    ``label`` identifies the generator draw for bookkeeping.
    """

    h: np.ndarray
    beta: np.ndarray | None = None
    label: str | None = None

    @property
    def num_users(self) -> int:
        return self.h.shape[0]

    @property
    def atoms_per_layer(self) -> int:
        return self.h.shape[1]


def spatial_correlation(
    geom: SimGeometry, regularization_floor: float = 0.0
) -> CorrelationModel:
    """Sinc correlation of the last layer's atoms, factored for sampling.

    Negative eigenvalues (rounding artifacts of the near-singular sinc
    matrix) are clipped to ``regularization_floor`` before the factor is
    rebuilt. A warning is raised if the most negative eigenvalue is larger
    in magnitude than expected from rounding alone.
    """
    if regularization_floor < 0.0:
        raise ValueError("regularization_floor must be nonnegative")
    pos = meta_atom_positions(geom, geom.num_layers)
    dist = pairwise_distances(pos, pos)
    corr = np.sinc(2.0 * dist / geom.wavelength)
    corr = 0.5 * (corr + corr.T)
    eigvals, eigvecs = np.linalg.eigh(corr)
    min_eig = float(eigvals.min())
    if min_eig < -EIGENVALUE_WARN_SCALE * geom.atoms_per_layer:
        warnings.warn(
            f"correlation matrix has eigenvalue {min_eig:.3e}, beyond rounding "
            "noise for this geometry; sampling will clip it",
            stacklevel=2,
        )
    clipped = np.maximum(eigvals, regularization_floor)
    factor = eigvecs * np.sqrt(clipped)
    return CorrelationModel(
        correlation=corr,
        factor=factor,
        regularization_floor=regularization_floor,
        min_eigenvalue=min_eig,
    )


def path_loss(
    geom: SimGeometry,
    user: int,
    exponent: float = 2.0,
    reference_gain_db: float = -30.0,
    reference_distance: float = 1.0,
) -> float:
    """Linear path gain of user ``user`` (1-based), beta = beta0 * (d/d0)^-exponent."""
    if not 1 <= user <= geom.num_users:
        raise ValueError(f"user must be in 1..{geom.num_users}, got {user}")
    d = user_distances(geom)[user - 1]
    beta0 = 10.0 ** (reference_gain_db / 10.0)
    return beta0 * (d / reference_distance) ** (-exponent)


def path_losses(
    geom: SimGeometry,
    exponent: float = 2.0,
    reference_gain_db: float = -30.0,
    reference_distance: float = 1.0,
) -> np.ndarray:
    """Linear path gains of all users, shape (K,)."""
    d = user_distances(geom)
    beta0 = 10.0 ** (reference_gain_db / 10.0)
    return beta0 * (d / reference_distance) ** (-exponent)


def sample_channel(
    model: CorrelationModel,
    betas: np.ndarray,
    rng: np.random.Generator,
    label: str | None = None,
) -> ChannelRealization:
    """One independent CN(0, beta_k R) draw per user.

    The real and imaginary parts are drawn as standard normals scaled by
    1/sqrt(2), then colored by the correlation factor and the path gain.
    """
    betas = np.asarray(betas, dtype=float)
    if betas.ndim != 1:
        raise ValueError("betas must be a 1-D array of per-user gains")
    if np.any(betas < 0.0):
        raise ValueError("path gains must be nonnegative")
    m = model.factor.shape[0]
    k = betas.shape[0]
    g = rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))
    h = np.sqrt(betas)[:, None] * ((g / np.sqrt(2.0)) @ model.factor.T)
    return ChannelRealization(h=h, beta=betas.copy(), label=label)


def save_channels(
    path, realizations: list[ChannelRealization], seed: int
) -> None:
    """Dump realizations to CSV for replay across algorithms.

    Layout: one header row ``M, K, count, seed`` followed by one row per user
    per realization, each row the user's vector with real and imaginary
    parts interleaved.
    """
    if not realizations:
        raise ValueError("nothing to save")
    k, m = realizations[0].h.shape
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([m, k, len(realizations), seed])
        for real in realizations:
            if real.h.shape != (k, m):
                raise ValueError("all realizations must share one (K, M) shape")
            for row in real.h:
                flat = np.empty(2 * m)
                flat[0::2] = row.real
                flat[1::2] = row.imag
                writer.writerow([repr(float(v)) for v in flat])


def load_channels(path) -> tuple[list[ChannelRealization], int]:
    """Read a dump written by :func:`save_channels`; returns (realizations, seed)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        m, k, count, seed = (int(v) for v in header)
        out = []
        for idx in range(count):
            h = np.empty((k, m), dtype=complex)
            for row_idx in range(k):
                row = np.array([float(v) for v in next(reader)])
                if row.size != 2 * m:
                    raise ValueError(
                        f"realization {idx} row {row_idx} has {row.size} values, expected {2 * m}"
                    )
                h[row_idx] = row[0::2] + 1j * row[1::2]
            out.append(ChannelRealization(h=h, beta=None, label=f"{path}:{idx}"))
    return out, seed
