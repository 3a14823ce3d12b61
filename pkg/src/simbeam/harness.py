"""Experiment orchestration: configs, seeded runs, sweeps, persistence.

A run directory is created fresh (timestamped) per invocation; every job
writes its own trace.csv and meta.json, and the invocation writes an
aggregate summary.csv plus the fully resolved config. Physical quantities
in config files carry units in their key names.
"""

from __future__ import annotations

import copy
import json
import logging
import math
import time
from pathlib import Path

from .drl import SimEnvironment, build_environment
from .estimators import OPTIMIZERS
from .geometry import SimGeometry
from .link import LinkBudget
from .records import RunRecord, write_meta_json, write_trace_csv

SPEED_OF_LIGHT = 299792458.0
SUMMARY_COLUMNS = ("sweep_value", "algo", "seed", "final_rate", "wall_s")

log = logging.getLogger("simbeam")

DEFAULT_CONFIG: dict = {
    "scenario": {
        "carrier_frequency_ghz": 28.0,
        "num_layers": 2,
        "atoms_per_layer": 4,
        "num_users": 2,
        "sim_thickness_wavelengths": 5.0,
        "atom_pitch_wavelengths": 0.5,
        "bs_height_m": 10.0,
        "user_spacing_m": 10.0,
        "transmit_power_dbm": 10.0,
        "noise_power_dbm": -104.0,
        "path_loss_exponent": 2.0,
        "correlation_floor": 0.0,
    },
    "algorithm": "td3",
    "algorithms": ["td3", "ddpg", "ao", "iwf-random"],
    "episodes": 30,
    "steps_per_episode": 500,
    "seeds": [0, 1, 2, 3, 4],
    "eval_channels": 50,
    "output_dir": "runs",
    "paper_scale": False,
    "td3": {
        "discount": 0.9,
        "batch_size": 256,
        "exploration_noise": 0.02,
        "policy_noise": 0.04,
        "noise_clip": 0.1,
        "policy_delay": 2,
        "actor_lr": 3e-4,
        "critic_lr": 3e-4,
        "tau": 5e-3,
        "buffer_capacity": 1_000_000,
        "warmup_steps": None,
        "hidden_dims": [64, 48],
        "reward_scale": "auto",
        "channel_mode": "per-episode",
        "rollout_steps": 1,
    },
    "ao": {
        "phase_step": 0.5,
        "max_outer": 50,
        "max_inner": 30,
        "tol": 1e-6,
    },
    "sweep": {
        "layers": [1, 2, 3],
        "atoms": [1, 4, 9],
        "users": [1, 2, 3],
        "delays": [1, 2, 4],
    },
}

PAPER_SCALE_OVERRIDES = {
    "episodes": 100,
    "steps_per_episode": 6000,
    "td3": {"hidden_dims": [400, 300]},
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Defaults, then the config file, then explicit overrides; validated."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        if not isinstance(user, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        config = _deep_merge(config, user)
    if overrides:
        config = _deep_merge(config, overrides)
    if config.get("paper_scale"):
        config = _deep_merge(config, PAPER_SCALE_OVERRIDES)
    validate_config(config)
    return config


def validate_config(config: dict) -> None:
    """Fail with a descriptive message before any compute happens."""
    algo = config.get("algorithm")
    if algo not in OPTIMIZERS:
        raise ValueError(
            f"algorithm must be one of {sorted(OPTIMIZERS)}, got {algo!r}"
        )
    for name in config.get("algorithms", []):
        if name not in OPTIMIZERS:
            raise ValueError(
                f"algorithms entry {name!r} not among {sorted(OPTIMIZERS)}"
            )
    if not config.get("algorithms"):
        raise ValueError("algorithms list must be nonempty")
    seeds = config.get("seeds")
    if not seeds:
        raise ValueError("seeds must be a nonempty list of integers")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    if config.get("episodes", 0) < 0:
        raise ValueError("episodes must be nonnegative")
    if config.get("steps_per_episode", 0) < 1:
        raise ValueError("steps_per_episode must be at least 1")
    if config.get("eval_channels", 0) < 1:
        raise ValueError("eval_channels must be at least 1")
    for axis, values in config.get("sweep", {}).items():
        if not values:
            raise ValueError(f"sweep.{axis} must be a nonempty list")
        if axis == "atoms":
            for m in values:
                if math.isqrt(int(m)) ** 2 != int(m):
                    raise ValueError(
                        f"sweep.atoms values must be perfect squares, got {m}"
                    )
    try:
        geometry_from_config(config["scenario"])
        budget_from_config(config["scenario"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"invalid scenario: {exc}") from exc


def geometry_from_config(scenario: dict) -> SimGeometry:
    wavelength = SPEED_OF_LIGHT / (float(scenario["carrier_frequency_ghz"]) * 1e9)
    pitch = float(scenario["atom_pitch_wavelengths"]) * wavelength
    return SimGeometry(
        num_layers=int(scenario["num_layers"]),
        atoms_per_layer=int(scenario["atoms_per_layer"]),
        num_antennas=int(scenario["num_users"]),
        num_users=int(scenario["num_users"]),
        wavelength=wavelength,
        atom_pitch=(pitch, pitch),
        sim_thickness=float(scenario["sim_thickness_wavelengths"]) * wavelength,
        bs_height=float(scenario["bs_height_m"]),
        user_spacing=float(scenario["user_spacing_m"]),
    )


def budget_from_config(scenario: dict) -> LinkBudget:
    return LinkBudget.from_dbm(
        float(scenario["transmit_power_dbm"]), float(scenario["noise_power_dbm"])
    )


def environment_from_config(config: dict) -> SimEnvironment:
    scenario = config["scenario"]
    return build_environment(
        geometry_from_config(scenario),
        budget_from_config(scenario),
        path_loss_exponent=float(scenario["path_loss_exponent"]),
        regularization_floor=float(scenario["correlation_floor"]),
    )


def make_optimizer(config: dict, algo: str | None = None):
    """Instantiate the selected optimizer with the config's knobs."""
    algo = algo or config["algorithm"]
    if algo not in OPTIMIZERS:
        raise ValueError(f"unknown algorithm {algo!r}")
    common = {
        "episodes": int(config["episodes"]),
        "steps_per_episode": int(config["steps_per_episode"]),
        "eval_channels": int(config["eval_channels"]),
    }
    td3 = config["td3"]
    if algo == "td3":
        return OPTIMIZERS[algo](
            discount=td3["discount"],
            batch_size=int(td3["batch_size"]),
            exploration_noise=td3["exploration_noise"],
            policy_noise=td3["policy_noise"],
            noise_clip=td3["noise_clip"],
            policy_delay=int(td3["policy_delay"]),
            actor_lr=td3["actor_lr"],
            critic_lr=td3["critic_lr"],
            tau=td3["tau"],
            buffer_capacity=int(td3["buffer_capacity"]),
            warmup_steps=td3["warmup_steps"],
            hidden_dims=tuple(td3["hidden_dims"]),
            reward_scale=td3["reward_scale"],
            channel_mode=td3["channel_mode"],
            rollout_steps=int(td3["rollout_steps"]),
            **common,
        )
    if algo == "ddpg":
        return OPTIMIZERS[algo](
            discount=td3["discount"],
            batch_size=int(td3["batch_size"]),
            exploration_noise=td3["exploration_noise"],
            actor_lr=td3["actor_lr"],
            critic_lr=td3["critic_lr"],
            tau=td3["tau"],
            buffer_capacity=int(td3["buffer_capacity"]),
            warmup_steps=td3["warmup_steps"],
            hidden_dims=tuple(td3["hidden_dims"]),
            reward_scale=td3["reward_scale"],
            channel_mode=td3["channel_mode"],
            rollout_steps=int(td3["rollout_steps"]),
            **common,
        )
    if algo == "ao":
        ao = config["ao"]
        return OPTIMIZERS[algo](
            phase_step=ao["phase_step"],
            max_outer=int(ao["max_outer"]),
            max_inner=int(ao["max_inner"]),
            tol=ao["tol"],
            **common,
        )
    return OPTIMIZERS[algo](**common)


def run_single(
    config: dict, seed: int, algo: str | None = None, env: SimEnvironment | None = None
) -> RunRecord:
    """One end-to-end run of one algorithm; returns its record."""
    validate_config(config)
    if env is None:
        env = environment_from_config(config)
    optimizer = make_optimizer(config, algo)
    optimizer.fit(env, seed=seed)
    return optimizer.record_


def fresh_run_dir(root) -> Path:
    """Timestamped directory that is guaranteed not to exist yet."""
    root = Path(root)
    stamp = time.strftime("%Y%m%d-%H%M%S")
    candidate = root / stamp
    suffix = 0
    while candidate.exists():
        suffix += 1
        candidate = root / f"{stamp}-{suffix}"
    candidate.mkdir(parents=True)
    return candidate


def persist_record(record: RunRecord, job_dir) -> None:
    job_dir = Path(job_dir)
    job_dir.mkdir(parents=True, exist_ok=True)
    write_trace_csv(record, job_dir / "trace.csv")
    write_meta_json(record, job_dir / "meta.json")


def write_summary(rows: list[dict], path) -> None:
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in rows:
        lines.append(
            f"{row['sweep_value']},{row['algo']},{row['seed']},"
            f"{float(row['final_rate'])!r},{row['wall_s']:.3f}"
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_config(config: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(config: dict, out_root=None) -> tuple[Path, list[RunRecord]]:
    """CLI `run`: the selected algorithm, once per seed."""
    validate_config(config)
    run_dir = fresh_run_dir(out_root or config["output_dir"])
    _write_config(config, run_dir / "meta.json")
    env = environment_from_config(config)
    records = []
    rows = []
    algo = config["algorithm"]
    for seed in config["seeds"]:
        record = run_single(config, seed, algo=algo, env=env)
        persist_record(record, run_dir / f"{algo}-seed{seed}")
        records.append(record)
        rows.append(
            {
                "sweep_value": 0,
                "algo": algo,
                "seed": seed,
                "final_rate": record.final_eval_rate,
                "wall_s": record.wall_seconds,
            }
        )
        log.info(
            "run %s seed %s: final rate %.6g (%.1fs)",
            algo,
            seed,
            record.final_eval_rate,
            record.wall_seconds,
        )
    write_summary(rows, run_dir / "summary.csv")
    return run_dir, records


_SWEEP_SCENARIO_KEYS = {
    "layers": "num_layers",
    "atoms": "atoms_per_layer",
    "users": "num_users",
}


def _sweep(
    config: dict, axis: str, values: list[int], out_root=None
) -> tuple[Path, list[dict]]:
    validate_config(config)
    run_dir = fresh_run_dir(out_root or config["output_dir"])
    _write_config(config, run_dir / "meta.json")
    rows = []
    for value in values:
        if axis in _SWEEP_SCENARIO_KEYS:
            cfg = _deep_merge(
                config, {"scenario": {_SWEEP_SCENARIO_KEYS[axis]: int(value)}}
            )
        elif axis == "delays":
            cfg = _deep_merge(config, {"td3": {"policy_delay": int(value)}})
        else:
            raise ValueError(f"unknown sweep axis {axis!r}")
        env = environment_from_config(cfg)
        algorithms = ["td3"] if axis == "delays" else cfg["algorithms"]
        for algo in algorithms:
            for seed in cfg["seeds"]:
                record = run_single(cfg, seed, algo=algo, env=env)
                persist_record(record, run_dir / f"{axis}{value}-{algo}-seed{seed}")
                rows.append(
                    {
                        "sweep_value": int(value),
                        "algo": algo,
                        "seed": seed,
                        "final_rate": record.final_eval_rate,
                        "wall_s": record.wall_seconds,
                    }
                )
                log.info(
                    "sweep %s=%s %s seed %s: final rate %.6g (%.1fs)",
                    axis,
                    value,
                    algo,
                    seed,
                    record.final_eval_rate,
                    record.wall_seconds,
                )
    if axis == "delays":
        env = environment_from_config(config)
        for seed in config["seeds"]:
            record = run_single(config, seed, algo="ddpg", env=env)
            persist_record(record, run_dir / f"ddpg-reference-seed{seed}")
            rows.append(
                {
                    "sweep_value": 1,
                    "algo": "ddpg",
                    "seed": seed,
                    "final_rate": record.final_eval_rate,
                    "wall_s": record.wall_seconds,
                }
            )
            log.info("ddpg reference seed %s done", seed)
    write_summary(rows, run_dir / "summary.csv")
    return run_dir, rows


def sweep_layers(config: dict, values=None, out_root=None):
    return _sweep(config, "layers", values or config["sweep"]["layers"], out_root)


def sweep_atoms(config: dict, values=None, out_root=None):
    return _sweep(config, "atoms", values or config["sweep"]["atoms"], out_root)


def sweep_users(config: dict, values=None, out_root=None):
    return _sweep(config, "users", values or config["sweep"]["users"], out_root)


def ablate_delay(config: dict, values=None, out_root=None):
    return _sweep(config, "delays", values or config["sweep"]["delays"], out_root)
