"""Explicit transition kernel p_ij(a) built by enumerating disturbance outcomes."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ehaoi.model import (
    TRANSMIT,
    Disturbance,
    InadmissibleError,
    ModelParams,
    StateSpace,
    SystemState,
    admissible_actions,
    next_state,
)


def disturbance_distribution(s: SystemState, a: int, p: ModelParams) -> list[tuple[Disturbance, float]]:
    """Product distribution of (ws, we, wz) given state and action, zero outcomes omitted."""
    if a not in admissible_actions(s):
        raise InadmissibleError(f"action {a} not admissible in {s}")
    p_success = p.ps if a == TRANSMIT else 0.0
    ws_probs = (1.0 - p_success, p_success)
    we_probs = (1.0 - p.pe, p.pe)
    wz_probs = p.process_matrix[s.z]
    dist = []
    for ws in (0, 1):
        for we in (0, 1):
            for wz in (0, 1):
                prob = ws_probs[ws] * we_probs[we] * float(wz_probs[wz])
                if prob > 0.0:
                    dist.append((Disturbance(ws, we, wz), prob))
    return dist


@lru_cache(maxsize=16)
def _successor_table(e_max: int, d_max0: int, d_max1: int) -> np.ndarray:
    """next-state index for every (i, a, ws, we, wz); -1 where impossible.

    Depends only on the state-space shape, so it is shared across sweeps that
    vary probabilities.
    """
    p = ModelParams(pe=0.5, ps=0.5, p01=0.5, p10=0.5, e_max=e_max, d_max0=d_max0, d_max1=d_max1)
    space = StateSpace(p)
    table = np.full((space.size, 2, 2, 2, 2), -1, dtype=np.int64)
    for i, s in enumerate(space):
        for a in admissible_actions(s):
            for ws in ((0, 1) if a == TRANSMIT else (0,)):
                for we in (0, 1):
                    for wz in (0, 1):
                        t = next_state(s, a, Disturbance(ws, we, wz), p)
                        table[i, a, ws, we, wz] = space.encode(t)
    table.setflags(write=False)
    return table


def successor_table(p: ModelParams) -> np.ndarray:
    return _successor_table(p.e_max, p.d_max0, p.d_max1)


@dataclass(frozen=True)
class TransitionKernel:
    """Sparse per-action transition matrices plus the stage-cost vector.

    ``matrices[a]`` is a CSR matrix whose row ``i`` holds p_i.(a); rows of
    inadmissible pairs (transmit with an empty buffer) are empty and flagged
    False in ``admissible[:, a]``.
    """

    params: ModelParams
    space: StateSpace
    matrices: tuple[sp.csr_matrix, sp.csr_matrix]
    admissible: np.ndarray
    cost: np.ndarray

    @property
    def n_states(self) -> int:
        return self.space.size

    def row(self, i: int, a: int) -> list[tuple[int, float]]:
        if not self.admissible[i, a]:
            raise InadmissibleError(f"action {a} not admissible in state {i}")
        m = self.matrices[a]
        lo, hi = m.indptr[i], m.indptr[i + 1]
        return [(int(j), float(q)) for j, q in zip(m.indices[lo:hi], m.data[lo:hi])]


def outcome_probabilities(p: ModelParams, z: np.ndarray) -> np.ndarray:
    """Probabilities with shape (len(z), 2, 2, 2, 2) indexed as [i, a, ws, we, wz]."""
    pz = p.process_matrix[z]  # (n, 2)
    ws = np.array([[1.0, 0.0], [1.0 - p.ps, p.ps]])  # [a, ws]
    we = np.array([1.0 - p.pe, p.pe])
    return ws[None, :, :, None, None] * we[None, None, None, :, None] * pz[:, None, None, None, :]


def build_kernel(p: ModelParams) -> TransitionKernel:
    space = StateSpace(p)
    comps = space.components
    table = successor_table(p)
    probs = outcome_probabilities(p, comps[:, 0])
    probs = np.where(table >= 0, probs, 0.0)

    n = space.size
    matrices = []
    for a in (0, 1):
        nxt = table[:, a].reshape(n, -1)
        q = probs[:, a].reshape(n, -1)
        rows = np.repeat(np.arange(n), nxt.shape[1])
        keep = q.ravel() > 0.0
        m = sp.coo_matrix(
            (q.ravel()[keep], (rows[keep], nxt.ravel()[keep])), shape=(n, n)
        ).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        matrices.append(m)

    admissible = np.ones((n, 2), dtype=bool)
    admissible[:, 1] = comps[:, 2] >= 1
    z, d0, d1 = comps[:, 0], comps[:, 3], comps[:, 4]
    cost = np.where(z == 1, d1 * d1, d0).astype(float)
    return TransitionKernel(p, space, (matrices[0], matrices[1]), admissible, cost)
