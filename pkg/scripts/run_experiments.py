#!/usr/bin/env python3
"""Regenerate every experiment table into an output directory.

    python scripts/run_experiments.py [--out results]

Produces buffer/success/process sweeps, policy slices for pe = 0.8 and 0.4,
a Monte Carlo check of the baseline and the worked AoI trace.
"""
import argparse
import sys
from pathlib import Path

from ehaoi.harness.cli import main as cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

RUNS = [
    ("solve", "defaults.yaml", "solve_baseline.csv", []),
    ("simulate", "defaults.yaml", "simulate_baseline.csv", []),
    ("sweep", "buffer_sweep.yaml", "sweep_buffer.csv", []),
    ("sweep", "success_sweep.yaml", "sweep_success.csv", []),
    ("sweep", "process_sweep.yaml", "sweep_process.csv", []),
    ("policy-grid", "defaults.yaml", "policy_pe08_z0.csv", ["--z", "0"]),
    ("policy-grid", "defaults.yaml", "policy_pe08_z1.csv", ["--z", "1"]),
    ("policy-grid", "policy_low_harvest.yaml", "policy_pe04_z0.csv", ["--z", "0"]),
    ("policy-grid", "policy_low_harvest.yaml", "policy_pe04_z1.csv", ["--z", "1"]),
    ("trace", "trace_example.yaml", "trace_example.csv", []),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", type=Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for command, config, output, extra in RUNS:
        print(f"== {command} {config} -> {output}")
        status = cli([command, str(CONFIGS / config), "-o", str(args.out / output), *extra])
        if status:
            return status
    return 0


if __name__ == "__main__":
    sys.exit(main())
