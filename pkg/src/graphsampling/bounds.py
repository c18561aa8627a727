"""Universal MSE bounds that hold for every sampling set.

With structural SNRs

    ell_i = lam_w[i]^{-1} v_i^T W^{-1} v_i,   v_i = i-th row of V_K,

every set S of size m satisfies

    |K|^2 / (trace[(W Lambda)^{-1}] + L_m)  <=  MSE(S)  <=  trace(W Lambda),

where L_m is the sum of the m largest ell_i. Inverting the lower bound
at a target MSE eta gives necessary conditions on the sampling budget.
All of this needs W strictly positive definite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

PD_TOL = 1e-12


def _check_posdef_W(W: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvalsh(W)
    if ev[0] <= PD_TOL * max(ev[-1], 0.0) or ev[-1] <= 0.0:
        raise ValueError(
            "W = V_K^T H^T H V_K is numerically singular; the bounds require "
            "positive-definite W (H must not annihilate the band)")
    return ev


@dataclass(frozen=True)
class BoundsReport:
    """Structural SNRs plus everything needed to evaluate the bounds.

    ell         (n,) per-node structural SNRs, input order
    prefix      (n+1,) prefix sums of descending-sorted ell; prefix[m] = L_m
    upper       trace(W Lambda)
    trace_winv  trace[(W Lambda)^{-1}]
    bandwidth   |K|
    """

    ell: np.ndarray
    prefix: np.ndarray
    upper: float
    trace_winv: float
    bandwidth: int

    @property
    def ell_max(self) -> float:
        return float(self.prefix[1])

    def L(self, m: int) -> float:
        """Sum of the m largest structural SNRs."""
        if not 0 <= m <= self.ell.size:
            raise ValueError(f"m={m} out of range [0, {self.ell.size}]")
        return float(self.prefix[m])

    def lower(self, m: int) -> float:
        """Best-case MSE over all sets of size m."""
        return self.bandwidth ** 2 / (self.trace_winv + self.L(m))


def structural_snrs(prior) -> np.ndarray:
    """ell_i = lam_w[i]^{-1} v_i^T W^{-1} v_i for every node i."""
    _check_posdef_W(prior.W)
    V_K = prior.basis.V_K
    c, low = cho_factor(prior.W)
    X = cho_solve((c, low), V_K.T)            # |K| x n
    quad = np.einsum("ik,ki->i", V_K, X)
    return quad / prior.lam_w


def bounds_report(prior) -> BoundsReport:
    ev = _check_posdef_W(prior.W)
    del ev
    ell = structural_snrs(prior)
    prefix = np.concatenate(([0.0], np.cumsum(np.sort(ell)[::-1])))
    c, low = cho_factor(prior.W)
    Winv = cho_solve((c, low), np.eye(prior.bandwidth))
    trace_winv = float(np.sum(np.diag(Winv) / prior.lam))
    upper = float(np.sum(np.diag(prior.W) * prior.lam))
    return BoundsReport(ell=ell, prefix=prefix, upper=upper,
                        trace_winv=trace_winv, bandwidth=prior.bandwidth)


def universal_bounds(prior, m: int) -> tuple[float, float]:
    """(lower(m), upper): MSE bracket valid for every size-m sampling set."""
    rep = bounds_report(prior)
    return rep.lower(m), rep.upper


def uniform_recovery_bound(prior) -> float:
    """Set-size-free lower bound |K| / (1/lambda_min(W Lambda) + ell_max)."""
    rep = bounds_report(prior)
    s = np.sqrt(prior.lam)
    WL = (prior.W * s[None, :]) * s[:, None]   # similar to W Lambda
    lam_min = float(np.linalg.eigvalsh(WL)[0])
    return prior.bandwidth / (1.0 / lam_min + rep.ell_max)


@dataclass(frozen=True)
class SetSizeBound:
    """Necessary conditions on |S| to reach target MSE eta.

    L_threshold  required mass of structural SNRs: L_|S| >= L_threshold
    size_simple  ceil(L_threshold / ell_max), clamped at 0
    size_tight   smallest m with L_m >= L_threshold; None when even the
                 full node set falls short
    """

    L_threshold: float
    size_simple: int
    size_tight: int | None


def min_set_size_bound(prior, eta: float) -> SetSizeBound:
    """Invert the universal lower bound at target MSE eta (eta > 0)."""
    if eta <= 0.0:
        raise ValueError("target MSE eta must be strictly positive")
    rep = bounds_report(prior)
    L_threshold = prior.bandwidth ** 2 / eta - rep.trace_winv
    if L_threshold <= 0.0:
        return SetSizeBound(L_threshold=L_threshold, size_simple=0, size_tight=0)
    size_simple = max(0, math.ceil(L_threshold / rep.ell_max))
    # prefix is nondecreasing; first index reaching the threshold.
    m = int(np.searchsorted(rep.prefix, L_threshold, side="left"))
    size_tight = m if m < rep.prefix.size else None
    if size_tight is not None and rep.prefix[size_tight] < L_threshold:
        size_tight = None
    return SetSizeBound(L_threshold=L_threshold, size_simple=size_simple,
                        size_tight=size_tight)
