"""Uniform per-run results: reward traces, evaluation summary, serialization.

Every algorithm (learned or classical) emits the same RunRecord so the
harness can compare them through one code path. Trace CSVs are written
with repr-roundtrip floats, which makes byte-identical reruns a meaningful
determinism check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

TRACE_COLUMNS = ("episode", "step", "reward", "reward_ma")


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over the last ``window`` values (shorter at the start)."""
    if window < 1:
        raise ValueError("window must be at least 1")
    values = np.asarray(values, dtype=float)
    cumulative = np.concatenate([[0.0], np.cumsum(values)])
    out = np.empty_like(values)
    n = values.shape[0]
    for i in range(n):
        lo = max(0, i + 1 - window)
        out[i] = (cumulative[i + 1] - cumulative[lo]) / (i + 1 - lo)
    return out


@dataclass
class RunRecord:
    """One algorithm run: trace, per-episode means, final held-out rate."""

    algorithm: str
    seed: int
    config: dict
    episode_index: np.ndarray
    step_index: np.ndarray
    rewards: np.ndarray
    reward_ma: np.ndarray
    episode_mean: np.ndarray
    final_eval_rate: float
    wall_seconds: float
    extras: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.rewards.shape[0]
        for name in ("episode_index", "step_index", "reward_ma"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"{name} length does not match rewards")

    @property
    def num_steps(self) -> int:
        return int(self.rewards.shape[0])


def build_trace(
    rewards: np.ndarray, steps_per_episode: int, ma_window: int | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Index a flat reward sequence into (episode, step, reward, ma) columns.

    Episode and step indices are 1-based. The moving-average window
    defaults to one episode's steps.
    """
    rewards = np.asarray(rewards, dtype=float)
    n = rewards.shape[0]
    if steps_per_episode < 1:
        raise ValueError("steps_per_episode must be at least 1")
    if n % steps_per_episode != 0:
        raise ValueError("trace length must be a whole number of episodes")
    if ma_window is None:
        ma_window = steps_per_episode
    idx = np.arange(n)
    episode_index = idx // steps_per_episode + 1
    step_index = idx % steps_per_episode + 1
    return episode_index, step_index, rewards, moving_average(rewards, ma_window)


def episode_means(rewards: np.ndarray, steps_per_episode: int) -> np.ndarray:
    rewards = np.asarray(rewards, dtype=float)
    if rewards.shape[0] % steps_per_episode != 0:
        raise ValueError("trace length must be a whole number of episodes")
    return rewards.reshape(-1, steps_per_episode).mean(axis=1)


def write_trace_csv(record: RunRecord, path) -> None:
    lines = [",".join(TRACE_COLUMNS)]
    for e, s, r, m in zip(
        record.episode_index, record.step_index, record.rewards, record.reward_ma
    ):
        lines.append(f"{int(e)},{int(s)},{float(r)!r},{float(m)!r}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_meta_json(record: RunRecord, path) -> None:
    meta = {
        "algorithm": record.algorithm,
        "seed": record.seed,
        "config": record.config,
        "final_eval_rate": record.final_eval_rate,
        "wall_seconds": record.wall_seconds,
        "num_steps": record.num_steps,
        "episode_mean": [float(v) for v in record.episode_mean],
        "extras": _jsonable(record.extras),
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value
