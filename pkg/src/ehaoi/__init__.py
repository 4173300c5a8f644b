"""Optimal status-update control for an energy-harvesting sensor monitoring a two-state process."""

from ehaoi.kernel import TransitionKernel, build_kernel, disturbance_distribution
from ehaoi.model import (
    START_STATE,
    Disturbance,
    InadmissibleError,
    ModelParams,
    SystemState,
    admissible_actions,
    enumerate_states,
    next_state,
    reachable_states,
    stage_cost,
)
from ehaoi.simulator import Trajectory, ValueEstimate, estimate_value, rollout
from ehaoi.solver import ConvergenceError, SolveReport, bellman_backup, evaluate_policy, value_iteration

__all__ = [
    "START_STATE",
    "ConvergenceError",
    "Disturbance",
    "InadmissibleError",
    "ModelParams",
    "SolveReport",
    "SystemState",
    "Trajectory",
    "TransitionKernel",
    "ValueEstimate",
    "admissible_actions",
    "bellman_backup",
    "build_kernel",
    "disturbance_distribution",
    "enumerate_states",
    "estimate_value",
    "evaluate_policy",
    "next_state",
    "reachable_states",
    "rollout",
    "stage_cost",
    "value_iteration",
]
