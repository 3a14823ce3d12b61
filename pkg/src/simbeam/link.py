"""Downlink rate evaluation and its gradient with respect to the phases.

With wave-domain beamforming the antenna-k data stream reaches user k
through the cascade G, so the effective link gains are
A[k, j] = |h_k^H G e_j|^2 where e_j selects antenna j's column of the feed
response. The SINR of user k is then A[k, k] p_k over interference plus
noise, and the objective is the sum of log2(1 + SINR) over users.

The phase gradient is assembled analytically from forward partial products
X^i (feed up to layer i) and backward partial products Y^i (layer i to the
user side), which makes it exact and a few hundred times faster than
finite differences at the sizes used for training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .physics import PhaseConfig, PropagationSet, beamforming_matrix

LOG2 = np.log(2.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError("power must be positive")
    return 10.0 * np.log10(watts) + 30.0


@dataclass(frozen=True)
class LinkBudget:
    """Total transmit power and noise variance, both in watts."""

    total_power: float
    noise_power: float

    def __post_init__(self) -> None:
        if self.total_power <= 0.0:
            raise ValueError("total_power must be positive")
        if self.noise_power <= 0.0:
            raise ValueError("noise_power must be positive")

    @classmethod
    def from_dbm(cls, total_dbm: float, noise_dbm: float) -> "LinkBudget":
        return cls(dbm_to_watts(total_dbm), dbm_to_watts(noise_dbm))


@dataclass(frozen=True)
class PowerAllocation:
    """Feasible per-antenna powers: nonnegative, summing to at most the budget."""

    power: np.ndarray
    total_budget: float

    def __post_init__(self) -> None:
        power = np.asarray(self.power, dtype=float)
        if power.ndim != 1:
            raise ValueError("power must be a 1-D per-antenna vector")
        if self.total_budget <= 0.0:
            raise ValueError("total_budget must be positive")
        if np.any(power < 0.0):
            raise ValueError("power entries must be nonnegative")
        # constraint slack covers accumulated rounding only
        if power.sum() > self.total_budget * (1.0 + 1e-12):
            raise ValueError(
                f"power budget exceeded: {power.sum():.6e} > {self.total_budget:.6e}"
            )
        power = power.copy()
        power.flags.writeable = False
        object.__setattr__(self, "power", power)

    @property
    def num_antennas(self) -> int:
        return self.power.shape[0]


def power_vector(power) -> np.ndarray:
    """Per-antenna watts as a plain array from either representation."""
    if isinstance(power, PowerAllocation):
        return power.power
    return np.asarray(power, dtype=float)


def validate_power(power, budget: LinkBudget, tol: float = 1e-9) -> np.ndarray:
    """Check nonnegativity and the total-power budget; returns the array."""
    power = power_vector(power)
    if power.ndim != 1:
        raise ValueError("power must be a 1-D per-antenna vector")
    if np.any(power < -tol * budget.total_power):
        raise ValueError("power entries must be nonnegative")
    if power.sum() > budget.total_power * (1.0 + tol):
        raise ValueError(
            f"power budget exceeded: {power.sum():.6e} > {budget.total_power:.6e}"
        )
    return power


def effective_gains(
    channel: ChannelRealization, phases: PhaseConfig, prop: PropagationSet
) -> np.ndarray:
    """Gain table A with A[k, j] = |h_k^H G e_j|^2, shape (K, S)."""
    g = beamforming_matrix(phases, prop)
    # e[k, j] = h_k^H G e_j; conj on h implements the Hermitian transpose
    e = channel.h.conj() @ (g @ prop.feed)
    return np.abs(e) ** 2


def sinr(gains: np.ndarray, power: np.ndarray, noise_power: float) -> np.ndarray:
    """Per-user SINR from the gain table; assumes user k is served by antenna k."""
    gains = np.asarray(gains, dtype=float)
    power = np.asarray(power, dtype=float)
    k = gains.shape[0]
    if gains.shape != (k, k):
        raise ValueError("gain table must be square: one serving antenna per user")
    if power.shape != (k,):
        raise ValueError("power must have one entry per antenna")
    received = gains * power[None, :]
    desired = np.diag(received)
    interference = received.sum(axis=1) - desired
    return desired / (interference + noise_power)


def sum_rate(gains: np.ndarray, power: np.ndarray, noise_power: float) -> float:
    return float(np.log2(1.0 + sinr(gains, power, noise_power)).sum())


def evaluate_sum_rate(
    channel: ChannelRealization,
    phases: PhaseConfig,
    power: np.ndarray,
    prop: PropagationSet,
    budget: LinkBudget,
) -> float:
    """Sum rate of one configuration; validates the power vector first."""
    power = validate_power(power, budget)
    gains = effective_gains(channel, phases, prop)
    return sum_rate(gains, power, budget.noise_power)


def _partial_products(
    phases: PhaseConfig, prop: PropagationSet, h: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray], np.ndarray]:
    """Forward products X^i, backward products Y^i, and user-side field e.

    X^i (M, S) maps antenna inputs to the field arriving at layer i before
    its phase shift is applied; Y^i (K, M) maps the field leaving layer i
    (after its phase shift) to the user side. e[k, j] = h_k^H G e_j.
    """
    phi = phases.phasors()
    num_layers = phases.num_layers
    x = [prop.feed]
    for i in range(1, num_layers):
        x.append(prop.interlayer[i - 1] @ (phi[i - 1][:, None] * x[i - 1]))
    y: list[np.ndarray] = [np.empty(0)] * num_layers
    y[num_layers - 1] = h.conj()
    for i in range(num_layers - 1, 0, -1):
        y[i - 1] = (y[i] * phi[i][None, :]) @ prop.interlayer[i - 1]
    e = (y[num_layers - 1] * phi[num_layers - 1][None, :]) @ x[num_layers - 1]
    return x, y, e


def sum_rate_phase_gradient(
    channel: ChannelRealization,
    phases: PhaseConfig,
    power: np.ndarray,
    prop: PropagationSet,
    budget: LinkBudget,
) -> tuple[float, np.ndarray]:
    """Sum rate and its gradient with respect to every phase, shape (L, M).

    The chain rule contracts the rate's sensitivity to each complex entry
    e[k, j] with that entry's sensitivity to theta^i_m, which factors into
    the forward product up to layer i and the backward product after it.
    """
    power = validate_power(power, budget)
    h = channel.h
    x, y, e = _partial_products(phases, prop, h)
    phi = phases.phasors()
    gains = np.abs(e) ** 2
    received = gains * power[None, :]
    desired = np.diag(received)
    denom = received.sum(axis=1) - desired + budget.noise_power
    gamma = desired / denom
    rate = float(np.log2(1.0 + gamma).sum())

    # d rate / d gains[k, j], split into the serving term (j == k) and the
    # interference terms (j != k)
    scale = 1.0 / (LOG2 * (1.0 + gamma) * denom)
    weights = -np.outer(scale * gamma, power)
    np.fill_diagonal(weights, scale * power)
    c = weights * e.conj()

    grad = np.empty_like(phases.theta)
    for i in range(phases.num_layers):
        # dot of row m of X^i C^T with column m of Y^i, scaled by phi^i_m
        inner = np.einsum("mk,km->m", x[i] @ c.T, y[i])
        grad[i] = -2.0 * np.imag(phi[i] * inner)
    return rate, grad
