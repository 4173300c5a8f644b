"""Seeded Monte Carlo rollouts of stationary policies.

Each slot consumes three uniforms in the order (ws, we, wz). Episode ``n`` of a
run seeded with ``seed`` draws from ``numpy.random.default_rng([seed, n])``,
so a single episode can be replayed with :func:`rollout` and ``seed=[seed, n]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from ehaoi.kernel import TransitionKernel, successor_table
from ehaoi.model import TRANSMIT, Disturbance, ModelParams, SystemState, next_state, stage_cost

Seed = int | Sequence[int]


class Step(NamedTuple):
    k: int
    state: SystemState
    action: int
    disturbance: Disturbance
    cost: float


@dataclass
class Trajectory:
    initial_state: SystemState
    seed: Seed
    steps: list[Step] = field(default_factory=list)

    def states(self) -> list[SystemState]:
        return [st.state for st in self.steps]


@dataclass(frozen=True)
class ValueEstimate:
    mean: float
    stderr: float
    episodes: int
    horizon: int


def episode_rng(seed: Seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample_disturbance(u: np.ndarray, s: SystemState, a: int, p: ModelParams) -> Disturbance:
    """Map three uniforms to a disturbance; ws can only be 1 on a transmit."""
    ws = int(a == TRANSMIT and s.e >= 1 and u[0] < p.ps)
    we = int(u[1] < p.pe)
    wz = int(u[2] < p.process_matrix[s.z, 1])
    return Disturbance(ws, we, wz)


def rollout(
    mu: np.ndarray,
    s0: SystemState,
    horizon: int,
    seed: Seed,
    K: TransitionKernel,
) -> tuple[float, Trajectory]:
    """Simulate ``horizon`` slots and return the discounted cost and the trace."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    p = K.params
    u = episode_rng(seed).random((horizon, 3))
    traj = Trajectory(initial_state=s0, seed=seed)
    total = 0.0
    discount = 1.0
    s = s0
    for k in range(horizon):
        a = int(mu[K.space.encode(s)])
        w = sample_disturbance(u[k], s, a, p)
        g = stage_cost(s)
        traj.steps.append(Step(k, s, a, w, g))
        total += discount * g
        discount *= p.gamma
        s = next_state(s, a, w, p)
    return total, traj


def _batch_returns(mu, start, horizon, rngs, K, table, pz1) -> np.ndarray:
    p = K.params
    u = np.stack([rng.random((horizon, 3)) for rng in rngs], axis=1)  # (horizon, batch, 3)
    idx = np.full(len(rngs), start, dtype=np.int64)
    z = K.space.components[:, 0]
    totals = np.zeros(len(rngs))
    discount = 1.0
    for k in range(horizon):
        a = mu[idx]
        ws = ((a == TRANSMIT) & (u[k, :, 0] < p.ps)).astype(np.int64)
        we = (u[k, :, 1] < p.pe).astype(np.int64)
        wz = (u[k, :, 2] < pz1[z[idx]]).astype(np.int64)
        totals += discount * K.cost[idx]
        discount *= p.gamma
        idx = table[idx, a, ws, we, wz]
    return totals


def discounted_returns(
    mu: np.ndarray,
    s0: SystemState,
    episodes: int,
    horizon: int,
    seed: int,
    K: TransitionKernel,
    batch_size: int = 1000,
) -> np.ndarray:
    """Per-episode discounted returns, identical to ``rollout(..., seed=[seed, n])``."""
    mu = np.asarray(mu, dtype=np.int64)
    if np.any(~K.admissible[np.arange(K.n_states), mu]):
        raise ValueError("policy transmits from a state with an empty buffer")
    table = successor_table(K.params)
    pz1 = K.params.process_matrix[:, 1]
    start = K.space.encode(s0)
    out = np.empty(episodes)
    for lo in range(0, episodes, batch_size):
        hi = min(lo + batch_size, episodes)
        rngs = [episode_rng([seed, n]) for n in range(lo, hi)]
        out[lo:hi] = _batch_returns(mu, start, horizon, rngs, K, table, pz1)
    return out


def estimate_value(
    mu: np.ndarray,
    s0: SystemState,
    episodes: int,
    horizon: int,
    seed: int,
    K: TransitionKernel,
) -> ValueEstimate:
    if episodes < 2:
        raise ValueError(f"need at least 2 episodes, got {episodes}")
    returns = discounted_returns(mu, s0, episodes, horizon, seed, K)
    stderr = float(np.std(returns, ddof=1) / np.sqrt(episodes))
    return ValueEstimate(float(np.mean(returns)), stderr, episodes, horizon)


def truncation_horizon(p: ModelParams, bias: float = 0.1) -> int:
    """Smallest H with gamma**H * g_max / (1 - gamma) <= bias."""
    return int(np.ceil(np.log(bias * (1.0 - p.gamma) / p.g_max) / np.log(p.gamma)))


def transition_counts(
    s: SystemState, a: int, samples: int, seed: Seed, K: TransitionKernel
) -> dict[int, int]:
    """Empirical next-state counts of one (state, action) pair.

    Disturbances are sampled with the same uniform-to-outcome map as the
    rollouts and pushed through :func:`next_state`.
    """
    p = K.params
    u = episode_rng(seed).random((samples, 3))
    ws = ((a == TRANSMIT) & (s.e >= 1) & (u[:, 0] < p.ps)).astype(int)
    we = (u[:, 1] < p.pe).astype(int)
    wz = (u[:, 2] < p.process_matrix[s.z, 1]).astype(int)
    codes, freq = np.unique(ws * 4 + we * 2 + wz, return_counts=True)
    counts: dict[int, int] = {}
    for code, c in zip(codes, freq):
        w = Disturbance(int(code) >> 2, (int(code) >> 1) & 1, int(code) & 1)
        j = K.space.encode(next_state(s, a, w, p))
        counts[j] = counts.get(j, 0) + int(c)
    return counts
