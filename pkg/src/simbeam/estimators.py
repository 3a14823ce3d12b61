"""Estimator-style front ends: one optimizer class per algorithm.

Each optimizer follows the familiar fit/predict shape: ``fit(env, seed)``
runs the algorithm against an environment and stores trailing-underscore
results (reward trace record, final held-out rate, last configuration);
``predict(channels)`` scores fresh channel realizations with whatever the
algorithm learned or does per channel. Constructor arguments are stored
verbatim so get_params/set_params/clone work as usual.

All optimizers draw their training channels from the same seed substream,
so runs with equal (seed, episodes) see identical channel sequences, and
all evaluate on the same held-out channels.
"""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator

from . import rng as rngmod
from .baselines import AoConfig, ao_optimize, random_phase_iwf
from .channel import ChannelRealization
from .drl import SimEnvironment, Td3Config, ddpg_config, evaluate_policy, td3_train
from .records import RunRecord, build_trace, episode_means


def _staircase(trajectory: np.ndarray, steps: int) -> np.ndarray:
    """Spread an accepted-rate trajectory over a fixed number of steps.

    Step s shows the rate after min(s, final) accepted outer iterations, so
    converged runs pad with their final value.
    """
    idx = np.minimum(np.arange(1, steps + 1), trajectory.shape[0] - 1)
    return trajectory[idx]


def _held_out_channels(
    env: SimEnvironment, seed: int, count: int
) -> list[ChannelRealization]:
    eval_rng = rngmod.substream(seed, rngmod.EVALUATION)
    return [env.draw_channel(eval_rng) for _ in range(count)]


class Td3Optimizer(BaseEstimator):
    """Joint phase/power control learned by TD3."""

    algorithm = "td3"

    def __init__(
        self,
        discount: float = 0.9,
        batch_size: int = 256,
        exploration_noise: float = 0.02,
        policy_noise: float = 0.04,
        noise_clip: float = 0.1,
        policy_delay: int = 2,
        episodes: int = 30,
        steps_per_episode: int = 500,
        actor_lr: float = 3e-4,
        critic_lr: float = 3e-4,
        tau: float = 5e-3,
        buffer_capacity: int = 1_000_000,
        warmup_steps: int | None = None,
        hidden_dims: tuple[int, ...] = (64, 48),
        reward_scale: float | str = "auto",
        channel_mode: str = "per-episode",
        eval_channels: int = 50,
        rollout_steps: int = 1,
    ) -> None:
        self.discount = discount
        self.batch_size = batch_size
        self.exploration_noise = exploration_noise
        self.policy_noise = policy_noise
        self.noise_clip = noise_clip
        self.policy_delay = policy_delay
        self.episodes = episodes
        self.steps_per_episode = steps_per_episode
        self.actor_lr = actor_lr
        self.critic_lr = critic_lr
        self.tau = tau
        self.buffer_capacity = buffer_capacity
        self.warmup_steps = warmup_steps
        self.hidden_dims = hidden_dims
        self.reward_scale = reward_scale
        self.channel_mode = channel_mode
        self.eval_channels = eval_channels
        self.rollout_steps = rollout_steps

    def _config(self) -> Td3Config:
        return Td3Config(
            discount=self.discount,
            batch_size=self.batch_size,
            exploration_noise=self.exploration_noise,
            policy_noise=self.policy_noise,
            noise_clip=self.noise_clip,
            policy_delay=self.policy_delay,
            episodes=self.episodes,
            steps_per_episode=self.steps_per_episode,
            actor_lr=self.actor_lr,
            critic_lr=self.critic_lr,
            tau=self.tau,
            buffer_capacity=self.buffer_capacity,
            warmup_steps=self.warmup_steps,
            hidden_dims=tuple(self.hidden_dims),
            reward_scale=self.reward_scale,
            channel_mode=self.channel_mode,
        )

    def fit(self, env: SimEnvironment, seed: int = 0) -> "Td3Optimizer":
        agent, record = td3_train(env, self._config(), seed)
        record.algorithm = self.algorithm
        if self.eval_channels != 50 or self.rollout_steps != 1:
            record.final_eval_rate = evaluate_policy(
                env, agent, seed, self.eval_channels, self.rollout_steps
            )
        self.env_ = env
        self.seed_ = seed
        self.agent_ = agent
        self.record_ = record
        self.final_rate_ = record.final_eval_rate
        self.actor_updates_ = agent.actor_updates
        self.critic_updates_ = agent.critic_updates
        self.phases_ = env.phases
        self.power_ = np.array(env.power)
        return self

    def predict(self, channels: list[ChannelRealization]) -> np.ndarray:
        """Greedy sum rate achieved on each channel."""
        rates = np.empty(len(channels))
        for i, channel in enumerate(channels):
            state = self.env_.reset(channel, phase_rng=None)
            reward = self.env_.current_rate()
            for _ in range(self.rollout_steps):
                reward, state = self.env_.step(self.agent_.act(state))
            rates[i] = reward
        return rates


class DdpgOptimizer(Td3Optimizer):
    """Single-critic, undelayed, unsmoothed variant of the TD3 optimizer."""

    algorithm = "ddpg"

    def __init__(
        self,
        discount: float = 0.9,
        batch_size: int = 256,
        exploration_noise: float = 0.02,
        episodes: int = 30,
        steps_per_episode: int = 500,
        actor_lr: float = 3e-4,
        critic_lr: float = 3e-4,
        tau: float = 5e-3,
        buffer_capacity: int = 1_000_000,
        warmup_steps: int | None = None,
        hidden_dims: tuple[int, ...] = (64, 48),
        reward_scale: float | str = "auto",
        channel_mode: str = "per-episode",
        eval_channels: int = 50,
        rollout_steps: int = 1,
    ) -> None:
        super().__init__(
            discount=discount,
            batch_size=batch_size,
            exploration_noise=exploration_noise,
            episodes=episodes,
            steps_per_episode=steps_per_episode,
            actor_lr=actor_lr,
            critic_lr=critic_lr,
            tau=tau,
            buffer_capacity=buffer_capacity,
            warmup_steps=warmup_steps,
            hidden_dims=hidden_dims,
            reward_scale=reward_scale,
            channel_mode=channel_mode,
            eval_channels=eval_channels,
            rollout_steps=rollout_steps,
        )

    def _config(self) -> Td3Config:
        return ddpg_config(super()._config())


class AoOptimizer(BaseEstimator):
    """Per-channel alternating optimization (water-filling + phase ascent)."""

    algorithm = "ao"

    def __init__(
        self,
        phase_step: float = 0.5,
        max_outer: int = 50,
        max_inner: int = 30,
        tol: float = 1e-6,
        episodes: int = 30,
        steps_per_episode: int = 500,
        eval_channels: int = 50,
    ) -> None:
        self.phase_step = phase_step
        self.max_outer = max_outer
        self.max_inner = max_inner
        self.tol = tol
        self.episodes = episodes
        self.steps_per_episode = steps_per_episode
        self.eval_channels = eval_channels

    def _config(self) -> AoConfig:
        return AoConfig(
            phase_step=self.phase_step,
            max_outer=self.max_outer,
            max_inner=self.max_inner,
            tol=self.tol,
        )

    def fit(self, env: SimEnvironment, seed: int = 0) -> "AoOptimizer":
        start = time.perf_counter()
        channel_rng = rngmod.substream(seed, rngmod.CHANNEL)
        phase_rng = rngmod.substream(seed, rngmod.PHASE_INIT)
        config = self._config()
        rewards = np.empty(self.episodes * self.steps_per_episode)
        result = None
        for ep in range(self.episodes):
            channel = env.draw_channel(channel_rng)
            result = ao_optimize(channel, env.prop, env.budget, config, phase_rng)
            lo = ep * self.steps_per_episode
            rewards[lo : lo + self.steps_per_episode] = _staircase(
                result.trace, self.steps_per_episode
            )
        self.env_ = env
        self.seed_ = seed
        if result is not None:
            self.phases_ = result.phases
            self.power_ = np.array(result.allocation.power)
            self.converged_ = result.converged
        eval_rates = self.predict(_held_out_channels(env, seed, self.eval_channels))
        self.final_rate_ = float(eval_rates.mean())
        episode_index, step_index, rewards, reward_ma = build_trace(
            rewards, self.steps_per_episode
        )
        self.record_ = RunRecord(
            algorithm=self.algorithm,
            seed=seed,
            config=self.get_params(),
            episode_index=episode_index,
            step_index=step_index,
            rewards=rewards,
            reward_ma=reward_ma,
            episode_mean=episode_means(rewards, self.steps_per_episode),
            final_eval_rate=self.final_rate_,
            wall_seconds=time.perf_counter() - start,
            extras={},
        )
        return self

    def predict(self, channels: list[ChannelRealization]) -> np.ndarray:
        """Optimize each channel from scratch; returns the achieved rates."""
        init_rng = rngmod.substream(self.seed_, rngmod.EVALUATION_INIT)
        config = self._config()
        rates = np.empty(len(channels))
        for i, channel in enumerate(channels):
            result = ao_optimize(
                channel, self.env_.prop, self.env_.budget, config, init_rng
            )
            rates[i] = result.final_rate
        return rates


class RandomPhaseIwfOptimizer(BaseEstimator):
    """Uniform random phases with water-filled power, per channel."""

    algorithm = "iwf-random"

    def __init__(
        self,
        episodes: int = 30,
        steps_per_episode: int = 500,
        eval_channels: int = 50,
    ) -> None:
        self.episodes = episodes
        self.steps_per_episode = steps_per_episode
        self.eval_channels = eval_channels

    def fit(self, env: SimEnvironment, seed: int = 0) -> "RandomPhaseIwfOptimizer":
        start = time.perf_counter()
        channel_rng = rngmod.substream(seed, rngmod.CHANNEL)
        phase_rng = rngmod.substream(seed, rngmod.PHASE_INIT)
        rewards = np.empty(self.episodes * self.steps_per_episode)
        result = None
        for ep in range(self.episodes):
            channel = env.draw_channel(channel_rng)
            result = random_phase_iwf(channel, env.prop, env.budget, phase_rng)
            lo = ep * self.steps_per_episode
            rewards[lo : lo + self.steps_per_episode] = result.rate
        self.env_ = env
        self.seed_ = seed
        if result is not None:
            self.phases_ = result.phases
            self.power_ = np.array(result.allocation.power)
        eval_rates = self.predict(_held_out_channels(env, seed, self.eval_channels))
        self.final_rate_ = float(eval_rates.mean())
        episode_index, step_index, rewards, reward_ma = build_trace(
            rewards, self.steps_per_episode
        )
        self.record_ = RunRecord(
            algorithm=self.algorithm,
            seed=seed,
            config=self.get_params(),
            episode_index=episode_index,
            step_index=step_index,
            rewards=rewards,
            reward_ma=reward_ma,
            episode_mean=episode_means(rewards, self.steps_per_episode),
            final_eval_rate=self.final_rate_,
            wall_seconds=time.perf_counter() - start,
            extras={},
        )
        return self

    def predict(self, channels: list[ChannelRealization]) -> np.ndarray:
        init_rng = rngmod.substream(self.seed_, rngmod.EVALUATION_INIT)
        rates = np.empty(len(channels))
        for i, channel in enumerate(channels):
            result = random_phase_iwf(channel, self.env_.prop, self.env_.budget, init_rng)
            rates[i] = result.rate
        return rates


OPTIMIZERS = {
    "td3": Td3Optimizer,
    "ddpg": DdpgOptimizer,
    "ao": AoOptimizer,
    "iwf-random": RandomPhaseIwfOptimizer,
}
