"""Classical benchmarks: water-filling, alternating optimization, random phases.

Iterative water-filling treats interference as noise: each user's effective
gain is recomputed from the current allocation, then powers are water-filled
against the inverse gains. Alternating optimization interleaves that with
backtracking gradient ascent on the phases. The random-phase scheme draws
phases uniformly and only optimizes power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .link import (
    LinkBudget,
    PowerAllocation,
    effective_gains,
    sum_rate,
    sum_rate_phase_gradient,
)
from .physics import PhaseConfig, PropagationSet, TWO_PI

MIN_PHASE_STEP = 1e-8
WATER_LEVEL_BISECTIONS = 100


@dataclass(frozen=True)
class AoConfig:
    """Alternating-optimization knobs.

    ``phase_step`` is the initial backtracking step in radians along the
    max-norm-normalized gradient; ``tol`` is the relative sum-rate gain per
    outer iteration below which the loop stops.
    """

    phase_step: float = 0.5
    max_outer: int = 50
    max_inner: int = 30
    tol: float = 1e-6

    def __post_init__(self) -> None:
        for name in ("phase_step", "max_outer", "max_inner", "tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class IwfResult:
    """Water-filling output plus the diagnostics the KKT conditions need."""

    allocation: PowerAllocation
    water_level: float
    iterations: int
    converged: bool
    degenerate: bool = False


@dataclass(frozen=True)
class AoResult:
    phases: PhaseConfig
    allocation: PowerAllocation
    trace: np.ndarray
    converged: bool
    outer_iterations: int

    @property
    def final_rate(self) -> float:
        return float(self.trace[-1])


@dataclass(frozen=True)
class RandomPhaseResult:
    phases: PhaseConfig
    allocation: PowerAllocation
    rate: float


def interference_gains(
    gains: np.ndarray, power: np.ndarray, noise_power: float
) -> np.ndarray:
    """Effective scalar gain per user with interference lumped into the noise."""
    received = gains * power[None, :]
    desired_gain = np.diag(gains)
    interference = received.sum(axis=1) - np.diag(received)
    return desired_gain / (interference + noise_power)


def water_fill(
    inverse_gains: np.ndarray, total_power: float
) -> tuple[np.ndarray, float]:
    """Allocate p_k = max(0, mu - 1/g_k) with mu set by bisection.

    ``inverse_gains`` may contain inf for dead users (zero gain); at least
    one entry must be finite. The returned level satisfies
    sum(p) <= total_power, with the shortfall at bisection resolution.
    """
    inverse_gains = np.asarray(inverse_gains, dtype=float)
    finite = np.isfinite(inverse_gains)
    if not finite.any():
        raise ValueError("water_fill needs at least one user with positive gain")
    lo = float(inverse_gains[finite].min())
    hi = float(inverse_gains[finite].max()) + total_power
    for _ in range(WATER_LEVEL_BISECTIONS):
        mid = 0.5 * (lo + hi)
        allocated = np.where(finite, np.maximum(0.0, mid - inverse_gains), 0.0).sum()
        if allocated > total_power:
            hi = mid
        else:
            lo = mid
    # lo is the last level known not to overshoot the budget
    power = np.where(finite, np.maximum(0.0, lo - inverse_gains), 0.0)
    return power, lo


def iterative_water_filling(
    gains: np.ndarray,
    noise_power: float,
    total_power: float,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> IwfResult:
    """Fixed-point iteration of water-filling against interference-as-noise.

    Convergence is not guaranteed in interference channels, so iterations
    are capped and the best allocation seen (by sum rate) is returned. When
    every user's direct gain is zero the split is uniform and flagged
    degenerate.
    """
    gains = np.asarray(gains, dtype=float)
    k = gains.shape[0]
    if gains.shape != (k, k):
        raise ValueError("gains must be a square per-user table")
    if np.any(gains < 0.0) or not np.all(np.isfinite(gains)):
        raise ValueError("gains must be nonnegative and finite")
    if noise_power <= 0.0:
        raise ValueError("noise_power must be positive")
    if total_power <= 0.0:
        raise ValueError("total_power must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    if np.all(np.diag(gains) == 0.0):
        uniform = np.full(k, total_power / k)
        return IwfResult(
            allocation=PowerAllocation(uniform, total_power),
            water_level=float("nan"),
            iterations=0,
            converged=True,
            degenerate=True,
        )

    power = np.full(k, total_power / k)
    best_power, best_level, best_rate = power, float("nan"), -np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        g = interference_gains(gains, power, noise_power)
        inverse = np.where(g > 0.0, 1.0 / np.where(g > 0.0, g, 1.0), np.inf)
        new_power, level = water_fill(inverse, total_power)
        rate = sum_rate(gains, new_power, noise_power)
        if rate > best_rate:
            best_power, best_level, best_rate = new_power, level, rate
        if np.max(np.abs(new_power - power)) < tol:
            power = new_power
            converged = True
            break
        power = new_power
    return IwfResult(
        allocation=PowerAllocation(best_power, total_power),
        water_level=best_level,
        iterations=iterations,
        converged=converged,
    )


def ao_optimize(
    channel: ChannelRealization,
    prop: PropagationSet,
    budget: LinkBudget,
    config: AoConfig | None = None,
    rng: np.random.Generator | None = None,
) -> AoResult:
    """Alternate water-filling and backtracking phase ascent until stall.

    Both stages only ever accept non-worsening configurations, so the trace
    of accepted outer-iteration rates is non-decreasing. The gradient step
    moves at most ``phase_step`` radians per atom (max-norm normalized),
    halving on failure down to MIN_PHASE_STEP and re-expanding after
    success.
    """
    if config is None:
        config = AoConfig()
    if rng is None:
        rng = np.random.default_rng()
    num_layers = prop.num_layers
    atoms = prop.atoms_per_layer
    k = channel.num_users
    phases = PhaseConfig(rng.uniform(0.0, TWO_PI, size=(num_layers, atoms)))
    power = np.full(k, budget.total_power / k)
    gains = effective_gains(channel, phases, prop)
    rate = sum_rate(gains, power, budget.noise_power)
    trace = [rate]
    converged = False
    outer = 0
    for outer in range(1, config.max_outer + 1):
        start_rate = rate

        iwf = iterative_water_filling(
            gains, budget.noise_power, budget.total_power
        )
        iwf_rate = sum_rate(gains, iwf.allocation.power, budget.noise_power)
        if iwf_rate >= rate:
            power = np.array(iwf.allocation.power)
            rate = iwf_rate

        step = config.phase_step
        for _ in range(config.max_inner):
            current_rate, grad = sum_rate_phase_gradient(
                channel, phases, power, prop, budget
            )
            scale = np.max(np.abs(grad))
            if scale == 0.0:
                break
            direction = grad / scale
            improved = False
            while step >= MIN_PHASE_STEP:
                trial = PhaseConfig(phases.theta + step * direction)
                trial_rate = sum_rate(
                    effective_gains(channel, trial, prop), power, budget.noise_power
                )
                if trial_rate > current_rate:
                    phases = trial
                    rate = trial_rate
                    improved = True
                    step = min(2.0 * step, config.phase_step)
                    break
                step *= 0.5
            if not improved:
                break
        gains = effective_gains(channel, phases, prop)

        trace.append(rate)
        if rate - start_rate < config.tol * max(abs(start_rate), 1e-300):
            converged = True
            break
    return AoResult(
        phases=phases,
        allocation=PowerAllocation(power, budget.total_power),
        trace=np.array(trace),
        converged=converged,
        outer_iterations=outer,
    )


def random_phase_iwf(
    channel: ChannelRealization,
    prop: PropagationSet,
    budget: LinkBudget,
    rng: np.random.Generator,
) -> RandomPhaseResult:
    """Uniform random phases, then water-filled power."""
    phases = PhaseConfig(
        rng.uniform(0.0, TWO_PI, size=(prop.num_layers, prop.atoms_per_layer))
    )
    gains = effective_gains(channel, phases, prop)
    iwf = iterative_water_filling(gains, budget.noise_power, budget.total_power)
    rate = sum_rate(gains, iwf.allocation.power, budget.noise_power)
    return RandomPhaseResult(phases=phases, allocation=iwf.allocation, rate=rate)
