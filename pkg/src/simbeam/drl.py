"""Actor-critic agents for joint phase and power control.

The environment exposes the scene as a flat state vector (phase phasors,
power shares, normalized channel) and accepts flat actions in (-1, 1) that
are decoded into a full phase configuration plus a softmax power split, so
every action is feasible by construction. The agent is TD3: twin critics
with a min-target, delayed actor updates, and target policy smoothing.
DDPG is the same machinery with those three features switched off.

All randomness flows through purpose-tagged substreams of one master seed
(see the rng module), which makes full training runs bit-reproducible.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import rng as rngmod
from .channel import ChannelRealization, CorrelationModel, path_losses, sample_channel, spatial_correlation
from .geometry import SimGeometry
from .link import LinkBudget, PowerAllocation, effective_gains, sum_rate
from .neural import Adam, Mlp, soft_update
from .physics import PhaseConfig, PropagationSet, TWO_PI, build_propagation
from .records import RunRecord, build_trace, episode_means

CHANNEL_MODES = ("per-episode", "fixed")
CRITIC_LOSSES = ("per-critic", "min")
DECODE_EPSILON = 1e-9


@dataclass(frozen=True)
class Td3Config:
    """Agent hyperparameters; defaults follow the reference operating point.

    ``reward_scale`` rescales rewards inside the critic targets only:
    "auto" freezes 1/mean|r| from the warm-up buffer before the first
    update, a float applies verbatim, and traces always log raw rewards.
    ``episodes`` and ``steps_per_episode`` default to the full-scale run;
    the harness shrinks them for desk-scale work.
    """

    discount: float = 0.9
    batch_size: int = 256
    exploration_noise: float = 0.02
    policy_noise: float = 0.04
    noise_clip: float = 0.1
    policy_delay: int = 2
    episodes: int = 100
    steps_per_episode: int = 6000
    actor_lr: float = 3e-4
    critic_lr: float = 3e-4
    tau: float = 5e-3
    buffer_capacity: int = 1_000_000
    warmup_steps: int | None = None
    hidden_dims: tuple[int, ...] = (400, 300)
    twin_critics: bool = True
    critic_loss: str = "per-critic"
    reward_scale: float | str = "auto"
    channel_mode: str = "per-episode"

    def __post_init__(self) -> None:
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must be in (0, 1]")
        for name in ("batch_size", "policy_delay", "steps_per_episode", "buffer_capacity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.episodes < 0:
            raise ValueError("episodes must be nonnegative")
        for name in ("actor_lr", "critic_lr", "tau"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("exploration_noise", "policy_noise", "noise_clip"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if isinstance(self.reward_scale, str):
            if self.reward_scale != "auto":
                raise ValueError("reward_scale must be a positive float or 'auto'")
        elif self.reward_scale <= 0.0:
            raise ValueError("reward_scale must be a positive float or 'auto'")
        if self.channel_mode not in CHANNEL_MODES:
            raise ValueError(f"channel_mode must be one of {CHANNEL_MODES}")
        if self.critic_loss not in CRITIC_LOSSES:
            raise ValueError(f"critic_loss must be one of {CRITIC_LOSSES}")
        if len(self.hidden_dims) < 1 or any(d < 1 for d in self.hidden_dims):
            raise ValueError("hidden_dims must be positive widths")
        object.__setattr__(self, "hidden_dims", tuple(int(d) for d in self.hidden_dims))

    @property
    def warmup(self) -> int:
        """Steps of uniform random actions before learning starts."""
        if self.warmup_steps is None:
            return 10 * self.batch_size
        return max(int(self.warmup_steps), self.batch_size)


def ddpg_config(config: Td3Config) -> Td3Config:
    """TD3 minus twin critics, minus delay, minus target smoothing."""
    return replace(config, twin_critics=False, policy_delay=1, policy_noise=0.0)


class SimEnvironment:
    """Scene wrapper holding the current channel, phases, and power split.

    The reward of a step is the sum rate of the decoded configuration;
    actions replace the configuration outright, and the channel stays fixed
    until the next reset.
    """

    def __init__(
        self,
        geometry: SimGeometry,
        prop: PropagationSet,
        correlation: CorrelationModel,
        betas: np.ndarray,
        budget: LinkBudget,
    ) -> None:
        betas = np.asarray(betas, dtype=float)
        if betas.shape != (geometry.num_users,):
            raise ValueError("betas must have one entry per user")
        self.geometry = geometry
        self.prop = prop
        self.correlation = correlation
        self.betas = betas
        self.budget = budget
        self.channel: ChannelRealization | None = None
        self.phases = PhaseConfig.zeros(geometry.num_layers, geometry.atoms_per_layer)
        self.power = np.full(
            geometry.num_users, budget.total_power / geometry.num_users
        )

    @property
    def state_dim(self) -> int:
        g = self.geometry
        return 2 * g.atoms_per_layer * g.num_layers + g.num_users + 2 * g.atoms_per_layer * g.num_users

    @property
    def action_dim(self) -> int:
        g = self.geometry
        return 2 * g.atoms_per_layer * g.num_layers + g.num_users

    def draw_channel(self, rng: np.random.Generator) -> ChannelRealization:
        return sample_channel(self.correlation, self.betas, rng)

    def reset(
        self,
        channel: ChannelRealization,
        phase_rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """Install a channel and a neutral start: uniform power, random or zero phases."""
        if channel.h.shape != (self.geometry.num_users, self.geometry.atoms_per_layer):
            raise ValueError("channel shape does not match the geometry")
        self.channel = channel
        g = self.geometry
        if phase_rng is None:
            self.phases = PhaseConfig.zeros(g.num_layers, g.atoms_per_layer)
        else:
            self.phases = PhaseConfig(
                phase_rng.uniform(0.0, TWO_PI, size=(g.num_layers, g.atoms_per_layer))
            )
        self.power = np.full(g.num_users, self.budget.total_power / g.num_users)
        return encode_state(self)

    def state(self) -> np.ndarray:
        return encode_state(self)

    def step(self, raw_action: np.ndarray) -> tuple[float, np.ndarray]:
        return env_step(self, raw_action)

    def current_rate(self) -> float:
        if self.channel is None:
            raise RuntimeError("environment has no channel; call reset first")
        gains = effective_gains(self.channel, self.phases, self.prop)
        return sum_rate(gains, self.power, self.budget.noise_power)


def build_environment(
    geometry: SimGeometry,
    budget: LinkBudget,
    path_loss_exponent: float = 2.0,
    regularization_floor: float = 0.0,
) -> SimEnvironment:
    """Assemble propagation, correlation, and path gains for a scene."""
    prop = build_propagation(geometry)
    correlation = spatial_correlation(geometry, regularization_floor)
    betas = path_losses(geometry, exponent=path_loss_exponent)
    return SimEnvironment(geometry, prop, correlation, betas, budget)


def encode_state(env: SimEnvironment) -> np.ndarray:
    """Flat observation: phase phasors, power shares, normalized channel.

    Layout: 2ML entries of interleaved (cos, sin) per atom in layer-major
    order; K entries p/P_t; 2MK entries of interleaved (Re, Im) of
    h_k/sqrt(beta_k) in user-major order. The beta normalization keeps the
    channel block at unit scale regardless of path loss.
    """
    if env.channel is None:
        raise RuntimeError("environment has no channel; call reset first")
    phi = env.phases.phasors().ravel()
    phase_part = np.empty(2 * phi.size)
    phase_part[0::2] = phi.real
    phase_part[1::2] = phi.imag
    power_part = env.power / env.budget.total_power
    scale = np.sqrt(np.maximum(env.betas, 1e-300))
    h_norm = (env.channel.h / scale[:, None]).ravel()
    channel_part = np.empty(2 * h_norm.size)
    channel_part[0::2] = h_norm.real
    channel_part[1::2] = h_norm.imag
    return np.concatenate([phase_part, power_part, channel_part])


def decode_action(
    raw: np.ndarray,
    num_layers: int,
    atoms_per_layer: int,
    num_users: int,
    total_power: float,
) -> tuple[PhaseConfig, PowerAllocation]:
    """Map a flat action to phases and a feasible power split.

    The first 2ML entries are (u, v) pairs per atom: theta = atan2(v, u),
    zero when the pair is numerically degenerate. The last K entries are
    softmax logits scaled by the power budget, so the split is positive
    and sums to the budget by construction.
    """
    raw = np.asarray(raw, dtype=float)
    expected = 2 * num_layers * atoms_per_layer + num_users
    if raw.shape != (expected,):
        raise ValueError(f"action must have length {expected}, got {raw.shape}")
    pairs = raw[: 2 * num_layers * atoms_per_layer].reshape(
        num_layers, atoms_per_layer, 2
    )
    u, v = pairs[..., 0], pairs[..., 1]
    degenerate = np.hypot(u, v) < DECODE_EPSILON
    theta = np.where(degenerate, 0.0, np.arctan2(v, u)) % TWO_PI
    logits = raw[-num_users:]
    shifted = np.exp(logits - logits.max())
    power = total_power * shifted / shifted.sum()
    return PhaseConfig(theta), PowerAllocation(power, total_power)


def env_step(env: SimEnvironment, raw_action: np.ndarray) -> tuple[float, np.ndarray]:
    """Apply an action: decode, install, score. Returns (reward, next state)."""
    g = env.geometry
    phases, allocation = decode_action(
        raw_action,
        g.num_layers,
        g.atoms_per_layer,
        g.num_users,
        env.budget.total_power,
    )
    env.phases = phases
    env.power = np.array(allocation.power)
    reward = env.current_rate()
    return reward, encode_state(env)


class ReplayBuffer:
    """Preallocated FIFO transition store with uniform batch sampling."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self.capacity = capacity
        self.states = np.empty((capacity, state_dim))
        self.actions = np.empty((capacity, action_dim))
        self.rewards = np.empty(capacity)
        self.next_states = np.empty((capacity, state_dim))
        self.count = 0

    @property
    def size(self) -> int:
        return min(self.count, self.capacity)

    def add(
        self, state: np.ndarray, action: np.ndarray, reward: float, next_state: np.ndarray
    ) -> None:
        idx = self.count % self.capacity
        self.states[idx] = state
        self.actions[idx] = action
        self.rewards[idx] = reward
        self.next_states[idx] = next_state
        self.count += 1

    def sample(
        self, batch_size: int, rng: np.random.Generator
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Uniform sample without replacement within the batch."""
        if batch_size > self.size:
            raise ValueError("batch_size exceeds stored transitions")
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return (
            self.states[idx],
            self.actions[idx],
            self.rewards[idx],
            self.next_states[idx],
        )


class Td3Agent:
    """Twin critics, delayed actor, target smoothing; all-numpy networks."""

    def __init__(
        self,
        state_dim: int,
        action_dim: int,
        config: Td3Config,
        init_rng: np.random.Generator,
    ) -> None:
        self.config = config
        self.state_dim = state_dim
        self.action_dim = action_dim
        hidden = list(config.hidden_dims)
        actor_dims = [state_dim, *hidden, action_dim]
        critic_dims = [state_dim + action_dim, *hidden, 1]
        self.actor = Mlp(actor_dims, "tanh", init_rng, final_layer_scale=0.1)
        self.critic1 = Mlp(critic_dims, "linear", init_rng)
        self.critic2 = Mlp(critic_dims, "linear", init_rng) if config.twin_critics else None
        self.target_actor = self.actor.copy()
        self.target_critic1 = self.critic1.copy()
        self.target_critic2 = self.critic2.copy() if self.critic2 is not None else None
        self.actor_opt = Adam(self.actor.parameters(), config.actor_lr)
        self.critic1_opt = Adam(self.critic1.parameters(), config.critic_lr)
        self.critic2_opt = (
            Adam(self.critic2.parameters(), config.critic_lr)
            if self.critic2 is not None
            else None
        )
        self.reward_scale = 1.0
        self.critic_updates = 0
        self.actor_updates = 0

    def act(self, state: np.ndarray) -> np.ndarray:
        """Greedy action of the current policy."""
        return self.actor(state[None, :])[0]

    def act_exploration(
        self, state: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        noise = rng.normal(0.0, self.config.exploration_noise, size=self.action_dim)
        return np.clip(self.act(state) + noise, -1.0, 1.0)

    def _target_q(
        self, next_states: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        next_actions = self.target_actor(next_states)
        if self.config.policy_noise > 0.0:
            noise = rng.normal(
                0.0, self.config.policy_noise, size=next_actions.shape
            )
            noise = np.clip(noise, -self.config.noise_clip, self.config.noise_clip)
            next_actions = np.clip(next_actions + noise, -1.0, 1.0)
        q1 = self.target_critic1(np.hstack([next_states, next_actions]))
        if self.target_critic2 is None:
            return q1
        q2 = self.target_critic2(np.hstack([next_states, next_actions]))
        return np.minimum(q1, q2)

    def update(
        self,
        batch: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
        rng: np.random.Generator,
    ) -> None:
        """One critic step, plus an actor/target step every policy_delay-th call."""
        states, actions, rewards, next_states = batch
        n = states.shape[0]
        targets = (
            self.reward_scale * rewards[:, None]
            + self.config.discount * self._target_q(next_states, rng)
        )

        sa = np.hstack([states, actions])
        q1, cache1 = self.critic1.forward(sa)
        if self.critic2 is not None and self.config.critic_loss == "min":
            # literal (target - min(Q1, Q2))^2 loss: the gradient routes to
            # the argmin critic only; ties go to critic 1
            q2, cache2 = self.critic2.forward(sa)
            q_min = np.minimum(q1, q2)
            pick1 = q1 <= q2
            residual = 2.0 * (q_min - targets) / n
            grads1, _ = self.critic1.backward(cache1, residual * pick1)
            grads2, _ = self.critic2.backward(cache2, residual * ~pick1)
            self.critic1_opt.step(grads1)
            self.critic2_opt.step(grads2)
        elif self.critic2 is not None:
            grads1, _ = self.critic1.backward(cache1, 2.0 * (q1 - targets) / n)
            self.critic1_opt.step(grads1)
            q2, cache2 = self.critic2.forward(sa)
            grads2, _ = self.critic2.backward(cache2, 2.0 * (q2 - targets) / n)
            self.critic2_opt.step(grads2)
        else:
            residual = 2.0 * (q1 - targets) / n
            grads1, _ = self.critic1.backward(cache1, residual)
            self.critic1_opt.step(grads1)
        self.critic_updates += 1

        if self.critic_updates % self.config.policy_delay == 0:
            policy_actions, actor_cache = self.actor.forward(states)
            sa_pi = np.hstack([states, policy_actions])
            q_pi, critic_cache = self.critic1.forward(sa_pi)
            # ascend Q: loss is -mean(Q), so d loss / d Q = -1/n
            _, input_grad = self.critic1.backward(
                critic_cache, np.full_like(q_pi, -1.0 / n)
            )
            action_grad = input_grad[:, self.state_dim :]
            actor_grads, _ = self.actor.backward(actor_cache, action_grad)
            self.actor_opt.step(actor_grads)
            self.actor_updates += 1
            soft_update(self.target_actor, self.actor, self.config.tau)
            soft_update(self.target_critic1, self.critic1, self.config.tau)
            if self.critic2 is not None:
                soft_update(self.target_critic2, self.critic2, self.config.tau)

    def networks(self) -> dict[str, Mlp]:
        nets = {"actor": self.actor, "critic1": self.critic1}
        if self.critic2 is not None:
            nets["critic2"] = self.critic2
        return nets


def td3_train(
    env: SimEnvironment, config: Td3Config, seed: int
) -> tuple[Td3Agent, RunRecord]:
    """Full training run driven by purpose-tagged substreams of ``seed``.

    Returns the trained agent and a record holding the raw reward trace and
    the held-out evaluation rate (mean greedy sum rate over fresh channels
    from the evaluation substream).
    """
    start = time.perf_counter()
    init_rng = rngmod.substream(seed, rngmod.NET_INIT)
    explore_rng = rngmod.substream(seed, rngmod.EXPLORATION)
    episode_rng = rngmod.substream(seed, rngmod.EPISODE_INIT)
    channel_rng = rngmod.substream(seed, rngmod.CHANNEL)
    replay_rng = rngmod.substream(seed, rngmod.REPLAY)
    smoothing_rng = rngmod.substream(seed, rngmod.POLICY_SMOOTHING)

    agent = Td3Agent(env.state_dim, env.action_dim, config, init_rng)
    total_steps = config.episodes * config.steps_per_episode
    buffer = ReplayBuffer(
        min(config.buffer_capacity, max(total_steps, 1)),
        env.state_dim,
        env.action_dim,
    )
    scale_frozen = not isinstance(config.reward_scale, str)
    if scale_frozen:
        agent.reward_scale = float(config.reward_scale)

    rewards = np.empty(total_steps)
    step_idx = 0
    channel = None
    for episode in range(config.episodes):
        if channel is None or config.channel_mode == "per-episode":
            channel = env.draw_channel(channel_rng)
        state = env.reset(channel, episode_rng)
        for _ in range(config.steps_per_episode):
            if step_idx < config.warmup:
                action = explore_rng.uniform(-1.0, 1.0, size=env.action_dim)
            else:
                action = agent.act_exploration(state, explore_rng)
            reward, next_state = env.step(action)
            if not np.isfinite(reward):
                raise FloatingPointError(
                    f"non-finite reward {reward!r} at step {step_idx}; run aborted"
                )
            buffer.add(state, action, reward, next_state)
            rewards[step_idx] = reward
            state = next_state
            step_idx += 1
            if step_idx >= config.warmup and buffer.size >= config.batch_size:
                if not scale_frozen:
                    mean_abs = float(np.abs(buffer.rewards[: buffer.size]).mean())
                    agent.reward_scale = 1.0 / max(mean_abs, 1e-12)
                    scale_frozen = True
                agent.update(
                    buffer.sample(config.batch_size, replay_rng), smoothing_rng
                )

    final_eval = evaluate_policy(env, agent, seed)
    episode_index, step_index, rewards, reward_ma = build_trace(
        rewards, config.steps_per_episode
    )
    record = RunRecord(
        algorithm="td3" if config.twin_critics else "ddpg",
        seed=seed,
        config=asdict(config),
        episode_index=episode_index,
        step_index=step_index,
        rewards=rewards,
        reward_ma=reward_ma,
        episode_mean=episode_means(rewards, config.steps_per_episode)
        if total_steps
        else np.empty(0),
        final_eval_rate=final_eval,
        wall_seconds=time.perf_counter() - start,
        extras={
            "critic_updates": agent.critic_updates,
            "actor_updates": agent.actor_updates,
            "reward_scale": agent.reward_scale,
            "warmup_steps": config.warmup,
        },
    )
    return agent, record


def ddpg_train(
    env: SimEnvironment, config: Td3Config, seed: int
) -> tuple[Td3Agent, RunRecord]:
    """DDPG run: the TD3 loop with the three TD3 features disabled."""
    return td3_train(env, ddpg_config(config), seed)


def evaluate_policy(
    env: SimEnvironment,
    agent: Td3Agent,
    seed: int,
    num_channels: int = 50,
    rollout_steps: int = 1,
) -> float:
    """Mean greedy sum rate over fresh held-out channels.

    Channels come from the evaluation substream of ``seed`` (same sequence
    for every algorithm under comparison); each starts from the canonical
    zero-phase uniform-power state.
    """
    eval_rng = rngmod.substream(seed, rngmod.EVALUATION)
    rates = np.empty(num_channels)
    for i in range(num_channels):
        channel = env.draw_channel(eval_rng)
        state = env.reset(channel, phase_rng=None)
        reward = env.current_rate()
        for _ in range(rollout_steps):
            reward, state = env.step(agent.act(state))
        rates[i] = reward
    return float(rates.mean())
