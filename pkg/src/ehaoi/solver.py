"""Value iteration and exact policy evaluation on a TransitionKernel."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ehaoi.kernel import TransitionKernel


class ConvergenceError(RuntimeError):
    """Value iteration hit its iteration cap before meeting the stopping rule."""


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    residual: float
    error_bound: float


def default_tolerance(gamma: float, target: float = 1e-4) -> float:
    """Stopping threshold whose a-posteriori bound guarantees ``|J - J*| <= target``."""
    return target * (1.0 - gamma) / gamma


def expected_next(J: np.ndarray, K: TransitionKernel) -> np.ndarray:
    """(n, 2) array of sum_j p_ij(a) J(j); +inf for inadmissible actions."""
    q = np.empty((K.n_states, 2))
    q[:, 0] = K.matrices[0] @ J
    q[:, 1] = K.matrices[1] @ J
    q[~K.admissible] = np.inf
    return q


def bellman_backup(J: np.ndarray, K: TransitionKernel, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Apply the Bellman operator once.

    The stage cost does not depend on the action, so it is added outside the
    minimisation. Ties between withholding and transmitting go to withholding.
    """
    q = expected_next(J, K)
    policy = (q[:, 1] < q[:, 0]).astype(np.int8)
    TJ = K.cost + gamma * np.minimum(q[:, 0], q[:, 1])
    return TJ, policy


def value_iteration(
    K: TransitionKernel,
    gamma: float | None = None,
    epsilon_stop: float | None = None,
    max_iterations: int = 1_000_000,
) -> tuple[np.ndarray, np.ndarray, SolveReport]:
    """Synchronous value iteration from J = 0.

    Stops once two successive iterates differ by less than ``epsilon_stop`` in
    sup-norm; the returned policy is greedy with respect to the returned J.
    """
    if gamma is None:
        gamma = K.params.gamma
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if epsilon_stop is None:
        epsilon_stop = default_tolerance(gamma)
    if epsilon_stop <= 0.0:
        raise ValueError(f"epsilon_stop must be positive, got {epsilon_stop}")

    J = np.zeros(K.n_states)
    for m in range(1, max_iterations + 1):
        J_next, _ = bellman_backup(J, K, gamma)
        residual = float(np.max(np.abs(J_next - J)))
        J = J_next
        if residual < epsilon_stop:
            break
    else:
        raise ConvergenceError(
            f"value iteration did not reach tolerance {epsilon_stop:g} in {max_iterations} iterations "
            f"(last residual {residual:g})"
        )
    _, policy = bellman_backup(J, K, gamma)
    report = SolveReport(iterations=m, residual=residual, error_bound=gamma / (1.0 - gamma) * residual)
    return J, policy, report


def policy_matrix(mu: np.ndarray, K: TransitionKernel) -> sp.csr_matrix:
    mu = np.asarray(mu)
    if mu.shape != (K.n_states,):
        raise ValueError(f"policy must have shape ({K.n_states},), got {mu.shape}")
    if np.any(~K.admissible[np.arange(K.n_states), mu]):
        raise ValueError("policy transmits from a state with an empty buffer")
    chooser = sp.diags((mu == 0).astype(float))
    return (chooser @ K.matrices[0] + sp.diags((mu == 1).astype(float)) @ K.matrices[1]).tocsr()


def evaluate_policy(mu: np.ndarray, K: TransitionKernel, gamma: float | None = None) -> np.ndarray:
    """Exact discounted cost of a stationary policy via a sparse linear solve."""
    if gamma is None:
        gamma = K.params.gamma
    P = policy_matrix(mu, K)
    A = sp.identity(K.n_states, format="csc") - gamma * P.tocsc()
    return np.asarray(spsolve(A, K.cost))


def bellman_residual(J: np.ndarray, K: TransitionKernel, gamma: float | None = None) -> float:
    if gamma is None:
        gamma = K.params.gamma
    TJ, _ = bellman_backup(J, K, gamma)
    return float(np.max(np.abs(TJ - J)))
