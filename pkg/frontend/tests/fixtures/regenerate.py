"""Rebuild the golden CSV fixtures from the simbeam harness CLI.

Run from this directory with the simbeam package installed:

    python3 regenerate.py

Produces sweep_summary.csv (a tiny two-algorithm atom sweep) and
trace_td3.csv / trace_ddpg.csv (short training traces). Only the public
CLI and its documented output layout are used, so these fixtures track
exactly what the plotting package will see in the field.
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

HERE = Path(__file__).resolve().parent

TINY = {
    "episodes": 2,
    "steps_per_episode": 10,
    "eval_channels": 2,
    "seeds": [0, 1],
    "algorithms": ["ao", "iwf-random"],
    "td3": {"batch_size": 8, "warmup_steps": 8, "hidden_dims": [8, 8]},
    "ao": {"max_outer": 3, "max_inner": 5},
    "sweep": {"atoms": [1, 4]},
}


def cli(args, out_root):
    cmd = [sys.executable, "-m", "simbeam.cli", *args, "--out", str(out_root)]
    subprocess.run(cmd, check=True, capture_output=True, text=True)
    run_dirs = [p for p in out_root.iterdir() if p.is_dir()]
    assert len(run_dirs) == 1, run_dirs
    return run_dirs[0]


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        config = tmp / "tiny.json"
        config.write_text(json.dumps(TINY))

        sweep_dir = cli(["sweep-atoms", "--config", str(config)], tmp / "sweep")
        shutil.copy(sweep_dir / "summary.csv", HERE / "sweep_summary.csv")

        for algo in ("td3", "ddpg"):
            run_dir = cli(
                ["run", "--config", str(config), "--algo", algo, "--seed", "0"],
                tmp / f"run-{algo}",
            )
            trace = run_dir / f"{algo}-seed0" / "trace.csv"
            shutil.copy(trace, HERE / f"trace_{algo}.csv")

    for name in ("sweep_summary.csv", "trace_td3.csv", "trace_ddpg.csv"):
        print(f"wrote {HERE / name}")


if __name__ == "__main__":
    main()
