"""Solve, sweep, simulate and slice policies for experiment configs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ehaoi.harness.config import ExperimentConfig
from ehaoi.kernel import TransitionKernel, build_kernel
from ehaoi.model import WITHHOLD, ModelParams, SystemState
from ehaoi.simulator import ValueEstimate, estimate_value
from ehaoi.solver import SolveReport, value_iteration


@dataclass(frozen=True)
class Solution:
    kernel: TransitionKernel
    J: np.ndarray
    policy: np.ndarray
    report: SolveReport

    def value(self, s: SystemState) -> float:
        return float(self.J[self.kernel.space.encode(s)])


def solve(p: ModelParams, tol: float | None = None, max_iterations: int = 1_000_000) -> Solution:
    K = build_kernel(p)
    J, mu, report = value_iteration(K, p.gamma, tol, max_iterations)
    return Solution(K, J, mu, report)


def sweep(cfg: ExperimentConfig, max_iterations: int = 1_000_000) -> list[dict]:
    """One row per grid point, in grid order: swept values, J*(s0), iteration stats."""
    rows = []
    for point in cfg.grid():
        sol = solve(cfg.params(**point), cfg.tol, max_iterations)
        row = {col: point[col] for col in cfg.swept_columns()}
        row.update(
            j_star_s0=sol.value(cfg.start_state),
            iterations=sol.report.iterations,
            residual_bound=sol.report.error_bound,
        )
        rows.append(row)
    return rows


def slice_policy(sol: Solution, z: int) -> np.ndarray:
    """Actions over (e, AoI of z) with the destination in sync (zd = z, other AoI 0).

    Row ``e`` covers buffer levels 0..e_max, column ``d - 1`` covers AoI 1..d_max.
    """
    if z not in (0, 1):
        raise ValueError(f"z must be 0 or 1, got {z!r}")
    p = sol.kernel.params
    d_max = p.d_max(z)
    grid = np.zeros((p.e_max + 1, d_max), dtype=np.int8)
    for e in range(p.e_max + 1):
        for d in range(1, d_max + 1):
            s = SystemState(z, z, e, 0 if z else d, d if z else 0)
            grid[e, d - 1] = sol.policy[sol.kernel.space.encode(s)]
    return grid


def policy_grid(p: ModelParams, z: int, tol: float | None = None, max_iterations: int = 1_000_000) -> np.ndarray:
    return slice_policy(solve(p, tol, max_iterations), z)


def withhold_set(grid: np.ndarray) -> set[tuple[int, int]]:
    """(e, AoI) cells where the policy withholds, AoI counted from 1."""
    es, ds = np.nonzero(grid == WITHHOLD)
    return {(int(e), int(d) + 1) for e, d in zip(es, ds)}


def simulate(cfg: ExperimentConfig, max_iterations: int = 1_000_000) -> tuple[Solution, ValueEstimate]:
    sol = solve(cfg.params(), cfg.tol, max_iterations)
    est = estimate_value(sol.policy, cfg.start_state, cfg.episodes, cfg.horizon, cfg.seed, sol.kernel)
    return sol, est
