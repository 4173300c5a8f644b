"""Domain types and one-step dynamics of the energy-harvesting status-update MDP.

A system state is the 5-tuple ``(z, zd, e, d0, d1)``: the current process state
(0 normal, 1 alarm), the process state last reported to the destination, the
stored energy units and the two per-state AoI counters.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

WITHHOLD = 0
TRANSMIT = 1


class InadmissibleError(ValueError):
    """Raised when an action or disturbance is not possible in a given state."""


@dataclass(frozen=True)
class ModelParams:
    pe: float
    ps: float
    p01: float
    p10: float
    e_max: int
    d_max0: int = 10
    d_max1: int = 10
    gamma: float = 0.99

    def __post_init__(self):
        for name in ("pe", "ps", "p01", "p10"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie strictly inside (0, 1), got {self.gamma!r}")
        for name in ("e_max", "d_max0", "d_max1"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")

    @property
    def process_matrix(self) -> np.ndarray:
        """2x2 row-stochastic matrix of the monitored process."""
        return np.array([[1.0 - self.p01, self.p01], [self.p10, 1.0 - self.p10]])

    def d_max(self, z: int) -> int:
        return self.d_max1 if z else self.d_max0

    @property
    def g_max(self) -> float:
        """Largest possible stage cost."""
        return float(max(self.d_max0, self.d_max1**2))


class SystemState(NamedTuple):
    z: int
    zd: int
    e: int
    d0: int
    d1: int

    def aoi(self, z: int) -> int:
        return self.d1 if z else self.d0


class Disturbance(NamedTuple):
    ws: int
    we: int
    wz: int


START_STATE = SystemState(0, 0, 0, 1, 0)


def is_valid_state(s: SystemState, p: ModelParams) -> bool:
    return (
        s.z in (0, 1)
        and s.zd in (0, 1)
        and 0 <= s.e <= p.e_max
        and 0 <= s.d0 <= p.d_max0
        and 0 <= s.d1 <= p.d_max1
    )


def satisfies_reachable_invariant(s: SystemState, p: ModelParams) -> bool:
    """Structural constraint obeyed by every state reachable from START_STATE."""
    if s.z == s.zd:
        return s.aoi(1 - s.z) == 0 and s.aoi(s.z) >= 1
    known = s.aoi(s.zd)
    return known >= 1 and known >= min(s.aoi(s.z) + 1, p.d_max(s.zd))


def admissible_actions(s: SystemState) -> frozenset[int]:
    if s.e == 0:
        return frozenset({WITHHOLD})
    return frozenset({WITHHOLD, TRANSMIT})


def next_state(s: SystemState, a: int, w: Disturbance, p: ModelParams) -> SystemState:
    if a not in admissible_actions(s):
        raise InadmissibleError(f"action {a} not admissible in {s}")
    if w.ws and a != TRANSMIT:
        raise InadmissibleError("a successful transmission requires action 1")

    z_next = w.wz
    zd_next = s.z if w.ws else s.zd
    e_next = min(s.e + w.we - a, p.e_max)

    ages = []
    for z in (0, 1):
        grown = min(s.aoi(z) + 1, p.d_max(z))
        if z == zd_next:
            ages.append(1 if w.ws else grown)
        elif z == z_next:
            # destination unaware of z: age counts from the latest change into z
            ages.append(grown if s.z == z else 0)
        else:
            ages.append(0)
    return SystemState(z_next, zd_next, e_next, ages[0], ages[1])


def stage_cost(s: SystemState) -> int:
    """Per-slot penalty: linear in the normal state, quadratic in alarm."""
    if s.z:
        return s.d1 * s.d1
    return s.d0


class StateSpace:
    """Mixed-radix enumeration of all tuples, ordered (z, zd, e, d0, d1) with d1 fastest."""

    def __init__(self, p: ModelParams):
        self.params = p
        self.shape = (2, 2, p.e_max + 1, p.d_max0 + 1, p.d_max1 + 1)
        self.size = int(np.prod(self.shape))

    def __len__(self) -> int:
        return self.size

    def encode(self, s: SystemState) -> int:
        if not is_valid_state(s, self.params):
            raise ValueError(f"state {s} outside the state space")
        return int(np.ravel_multi_index(tuple(s), self.shape))

    def decode(self, index: int) -> SystemState:
        if not 0 <= index < self.size:
            raise IndexError(f"state index {index} out of range [0, {self.size})")
        return SystemState(*(int(v) for v in np.unravel_index(index, self.shape)))

    def __iter__(self):
        return (self.decode(i) for i in range(self.size))

    @cached_property
    def components(self) -> np.ndarray:
        """Integer array of shape (size, 5) with the tuple of every index."""
        grids = np.unravel_index(np.arange(self.size), self.shape)
        return np.stack(grids, axis=1)


def enumerate_states(p: ModelParams) -> StateSpace:
    return StateSpace(p)


def outcomes(s: SystemState, a: int):
    """All disturbance outcomes structurally possible for (s, a)."""
    success = (0, 1) if a == TRANSMIT else (0,)
    return [Disturbance(ws, we, wz) for ws in success for we in (0, 1) for wz in (0, 1)]


def reachable_states(p: ModelParams, s0: SystemState = START_STATE) -> set[int]:
    """Indices of states reachable from ``s0`` with positive probability."""
    space = StateSpace(p)
    probs_e = {0: 1.0 - p.pe, 1: p.pe}
    probs_s = {0: 1.0 - p.ps, 1: p.ps}
    pz = p.process_matrix

    start = space.encode(s0)
    seen = {start}
    queue = deque([s0])
    while queue:
        s = queue.popleft()
        for a in sorted(admissible_actions(s)):
            for w in outcomes(s, a):
                prob = probs_e[w.we] * pz[s.z, w.wz]
                if a == TRANSMIT:
                    prob *= probs_s[w.ws]
                if prob <= 0.0:
                    continue
                t = next_state(s, a, w, p)
                j = space.encode(t)
                if j not in seen:
                    seen.add(j)
                    queue.append(t)
    return seen
