"""Independent reference computations used by the tests.

Nothing here calls ``next_state`` or the kernel; each oracle recomputes its
answer from first principles.
"""
from __future__ import annotations

import itertools

import numpy as np

from ehaoi.harness.trace import EventLog, Update, aoi_at
from ehaoi.model import ModelParams, SystemState


def lift_history(s: SystemState, p: ModelParams, now: int) -> tuple[list[int], list[Update]]:
    """An explicit history of changes and deliveries that ends in state ``s`` at slot ``now``.

    Deliveries follow the instant-acknowledgement convention: generated at k,
    counted from slot k + 1.
    """
    if s.z == s.zd:
        gen = now - s.aoi(s.z)
        return [], [Update(gen, gen + 1, s.z)]
    change = now - s.aoi(s.z)
    gen = min(now - s.aoi(s.zd), change - 1)
    return [change], [Update(gen, gen + 1, s.zd)]


def timeline_step(s: SystemState, a: int, ws: int, we: int, wz: int, p: ModelParams) -> SystemState:
    """Next state computed by extending an explicit event log by one slot."""
    now = 2 * max(p.d_max0, p.d_max1) + 4
    changes, updates = lift_history(s, p, now)
    if wz != s.z:
        changes.append(now + 1)
    if ws:
        updates.append(Update(now, now + 1, s.z))
    log = EventLog(
        changes=tuple(changes),
        updates=tuple(updates),
        horizon=now + 2,
        d_max0=p.d_max0,
        d_max1=p.d_max1,
        initial_state=s.zd,
    )
    here = aoi_at(log, now)
    assert (here.z, here.zd, here.d0, here.d1) == (s.z, s.zd, s.d0, s.d1), "lifted history inconsistent"
    nxt = aoi_at(log, now + 1)
    energy = s.e + we - a
    return SystemState(nxt.z, nxt.zd, min(energy, p.e_max), nxt.d0, nxt.d1)


def brute_force_row(s: SystemState, a: int, p: ModelParams, step) -> dict[SystemState, float]:
    """Transition row obtained by enumerating all 8 outcomes with hand-written probabilities."""
    row: dict[SystemState, float] = {}
    pz = {(0, 0): 1 - p.p01, (0, 1): p.p01, (1, 0): p.p10, (1, 1): 1 - p.p10}
    for ws, we, wz in itertools.product((0, 1), repeat=3):
        if a == 0 and ws == 1:
            continue
        prob = (p.ps if ws else 1 - p.ps) if a == 1 else 1.0
        prob *= p.pe if we else 1 - p.pe
        prob *= pz[(s.z, wz)]
        if prob == 0:
            continue
        t = step(s, a, ws, we, wz, p)
        row[t] = row.get(t, 0.0) + prob
    return row


def brute_force_backup(J: np.ndarray, K, gamma: float) -> np.ndarray:
    """Bellman operator evaluated one state at a time from the kernel's dense rows."""
    out = np.empty_like(J)
    dense = [K.matrices[0].toarray(), K.matrices[1].toarray()]
    for i in range(K.n_states):
        best = dense[0][i] @ J
        if K.admissible[i, 1]:
            best = min(best, dense[1][i] @ J)
        out[i] = K.cost[i] + gamma * best
    return out


def deterministic_chain_value(gamma: float) -> float:
    """Cost of the always-harvest, always-succeed chain started at [0,0,0,1,0]:
    1 (empty buffer, wait), 2 (transmit), then 1 forever."""
    return 1 + 2 * gamma + gamma**2 / (1 - gamma)
