"""Stacked-metasurface downlink simulator and joint phase/power optimizers.

The package models a multi-layer programmable metasurface in front of a
multi-antenna transmitter, generates correlated fading channels to
single-antenna users, and maximizes the downlink sum rate by configuring
per-atom phase shifts and per-antenna powers. Optimizers come in one
estimator-style family: a TD3 agent, a DDPG agent, alternating
optimization, and random phases with water-filled power.
"""

from .baselines import (
    AoConfig,
    AoResult,
    IwfResult,
    RandomPhaseResult,
    ao_optimize,
    iterative_water_filling,
    random_phase_iwf,
    water_fill,
)
from .channel import (
    ChannelRealization,
    CorrelationModel,
    load_channels,
    path_loss,
    path_losses,
    sample_channel,
    save_channels,
    spatial_correlation,
)
from .drl import (
    ReplayBuffer,
    SimEnvironment,
    Td3Agent,
    Td3Config,
    build_environment,
    ddpg_config,
    ddpg_train,
    decode_action,
    encode_state,
    env_step,
    evaluate_policy,
    td3_train,
)
from .estimators import (
    OPTIMIZERS,
    AoOptimizer,
    DdpgOptimizer,
    RandomPhaseIwfOptimizer,
    Td3Optimizer,
)
from .geometry import (
    SimGeometry,
    antenna_positions,
    meta_atom_positions,
    user_distances,
    user_positions,
)
from .link import (
    LinkBudget,
    PowerAllocation,
    dbm_to_watts,
    effective_gains,
    evaluate_sum_rate,
    power_vector,
    sinr,
    sum_rate,
    sum_rate_phase_gradient,
    validate_power,
    watts_to_dbm,
)
from .neural import (
    Adam,
    Mlp,
    complexity_estimate,
    load_networks,
    save_networks,
    soft_update,
)
from .physics import (
    PhaseConfig,
    PropagationSet,
    beamforming_matrix,
    build_propagation,
    propagation_coefficient,
)
from .records import RunRecord, moving_average

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "AoConfig",
    "AoOptimizer",
    "AoResult",
    "ChannelRealization",
    "CorrelationModel",
    "DdpgOptimizer",
    "IwfResult",
    "LinkBudget",
    "Mlp",
    "OPTIMIZERS",
    "PhaseConfig",
    "PowerAllocation",
    "PropagationSet",
    "RandomPhaseIwfOptimizer",
    "RandomPhaseResult",
    "ReplayBuffer",
    "RunRecord",
    "SimEnvironment",
    "SimGeometry",
    "Td3Agent",
    "Td3Config",
    "Td3Optimizer",
    "antenna_positions",
    "ao_optimize",
    "beamforming_matrix",
    "build_environment",
    "build_propagation",
    "complexity_estimate",
    "dbm_to_watts",
    "ddpg_config",
    "ddpg_train",
    "decode_action",
    "effective_gains",
    "encode_state",
    "env_step",
    "evaluate_policy",
    "evaluate_sum_rate",
    "iterative_water_filling",
    "load_channels",
    "load_networks",
    "meta_atom_positions",
    "moving_average",
    "path_loss",
    "path_losses",
    "power_vector",
    "propagation_coefficient",
    "random_phase_iwf",
    "sample_channel",
    "save_channels",
    "save_networks",
    "sinr",
    "soft_update",
    "spatial_correlation",
    "sum_rate",
    "sum_rate_phase_gradient",
    "td3_train",
    "user_distances",
    "user_positions",
    "validate_power",
    "water_fill",
    "watts_to_dbm",
]
