"""Optimal Bayesian interpolation from a sampling set.

Sampling keeps the observation entries y_S; the linear MMSE estimate of
z = H x is zhat = L y_S where L solves the normal equations

    L (V_KS Lambda V_KS^T + Lambda_w,S) = B Lambda V_KS^T,  B = H V_K,

with V_KS the sampled rows of V_K. The error covariance has the
inner-space form

    Kbar(S) = (Lambda^{-1} + sum_{i in S} lam_w[i]^{-1} v_i v_i^T)^{-1},

v_i the i-th row of V_K, and MSE(S) = trace(W Kbar(S)). All heavy work
happens in the |K| x |K| inner space; the n x n (or m x m) picture is
only materialized on request.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

COND_WARN_THRESHOLD = 1e12


class IllConditionedWarning(RuntimeWarning):
    """Normal-equation system has condition number above 1e12."""


@dataclass(frozen=True)
class SamplingSet:
    """Ordered duplicate-free subset of node indices.

    trajectory, when present, records the objective value after each
    prefix (filled in by greedy selection).
    """

    indices: tuple[int, ...]
    trajectory: tuple[float, ...] | None = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise ValueError("sampling indices must be nonnegative")
        if len(set(idx)) != len(idx):
            raise ValueError("sampling indices must be distinct")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ErrorState:
    """Inner-space state for one sampling set: Z(S), Kbar(S) = Z^{-1}, MSE."""

    Z: np.ndarray
    Kbar: np.ndarray
    mse: float


def _index_array(S: SamplingSet | Iterable[int] | None, n: int) -> np.ndarray:
    """Normalize to a duplicate-free index array; order preserved."""
    if S is None:
        return np.empty(0, dtype=np.intp)
    if isinstance(S, SamplingSet):
        idx = np.asarray(S.indices, dtype=np.intp)
    else:
        seen: dict[int, None] = {}
        for i in S:
            seen.setdefault(int(i), None)
        idx = np.fromiter(seen.keys(), dtype=np.intp, count=len(seen))
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError(f"sampling indices must lie in [0, {n})")
    return idx


def error_state(prior, S) -> ErrorState:
    """Z(S), Kbar(S) and MSE(S) in one shot."""
    idx = _index_array(S, prior.n)
    Z = np.diag(1.0 / prior.lam)
    if idx.size:
        rows = prior.basis.V_K[idx]
        Z = Z + (rows * (1.0 / prior.lam_w[idx])[:, None]).T @ rows
    Z = 0.5 * (Z + Z.T)
    c, low = cho_factor(Z)
    Kbar = cho_solve((c, low), np.eye(prior.bandwidth))
    Kbar = 0.5 * (Kbar + Kbar.T)
    return ErrorState(Z=Z, Kbar=Kbar, mse=float(np.sum(prior.W * Kbar)))


def mse(prior, S) -> float:
    """trace(W Kbar(S)); computed entirely in the |K| x |K| inner space."""
    return error_state(prior, S).mse


def error_covariance(prior, S) -> np.ndarray:
    """Task-space error covariance K*(S) = B Kbar(S) B^T with B = H V_K."""
    state = error_state(prior, S)
    B = prior.basis.V_K if prior.H is None else prior.H @ prior.basis.V_K
    K = B @ state.Kbar @ B.T
    return 0.5 * (K + K.T)


def optimal_interpolator(prior, S) -> np.ndarray:
    """MMSE interpolator L (m x |S|) for the given sampling set.

    The |S| x |S| normal equations are solved through the equivalent
    |K| x |K| system (push-through identity):

        L = B Kbar(S) V_KS^T diag(lam_w[S])^{-1},

    which stays accurate even when the sampled covariance is nearly
    singular (tiny lam_w with |S| > |K|). IllConditionedWarning is
    emitted when the normal-equation system's condition number exceeds
    1e12; the solution is still returned. Empty S is rejected.
    """
    idx = _index_array(S, prior.n)
    if idx.size == 0:
        raise ValueError("cannot build an interpolator from an empty sampling set")
    V_KS = prior.basis.V_K[idx]
    M = (V_KS * prior.lam) @ V_KS.T
    M[np.diag_indices_from(M)] += prior.lam_w[idx]
    ev = np.linalg.eigvalsh(0.5 * (M + M.T))
    if ev[0] <= 0.0 or ev[-1] / ev[0] > COND_WARN_THRESHOLD:
        warnings.warn("normal-equation system is ill conditioned "
                      f"(cond ~ {np.inf if ev[0] <= 0 else ev[-1] / ev[0]:.3e})",
                      IllConditionedWarning)
    state = error_state(prior, idx)
    B = prior.basis.V_K if prior.H is None else prior.H @ prior.basis.V_K
    return B @ state.Kbar @ (V_KS.T / prior.lam_w[idx][None, :])


def interpolate(L: np.ndarray, y_S: np.ndarray) -> np.ndarray:
    """Apply an interpolator to sampled observations."""
    L = np.asarray(L, dtype=float)
    y_S = np.asarray(y_S, dtype=float)
    if y_S.shape != (L.shape[1],):
        raise ValueError(f"y_S must have shape ({L.shape[1]},)")
    return L @ y_S
