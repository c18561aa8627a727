"""Bayesian signal model on a graph Fourier band.

A bandlimited signal is x = V_K xbar_K with xbar_K ~ N(0, Lambda); the
observation is y = x + w with w ~ N(0, Lambda_w), and the quantity to
estimate is z = H x. The Prior bundles everything downstream modules
need, including the weighting matrix W = V_K^T H^T H V_K that turns
inner-space error covariances into task MSE.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import SpectralBasis, gft
from .seeding import make_rng

HOMEO_TOL = 1e-12
PSD_TOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Prior:
    """Gaussian prior: spectrum variances, noise variances, task map.

    lam     (|K|,) spectral signal variances (diagonal of Lambda)
    lam_w   (n,)   per-node noise variances (diagonal of Lambda_w)
    H       (m, n) task transform, or None for identity
    W       (|K|, |K|) = V_K^T H^T H V_K, symmetrized
    gamma   scalar SNR lam/lam_w when both are homoscedastic, else None
    """

    basis: SpectralBasis
    lam: np.ndarray
    lam_w: np.ndarray
    H: np.ndarray | None
    W: np.ndarray
    gamma: float | None

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def bandwidth(self) -> int:
        return self.basis.bandwidth

    @property
    def m(self) -> int:
        return self.n if self.H is None else self.H.shape[0]


@dataclass(frozen=True)
class SignalDraw:
    """One realization: truth x, band coefficients, noise, observation."""

    x: np.ndarray
    xbar_K: np.ndarray
    w: np.ndarray
    y: np.ndarray
    seed: int


def make_prior(basis: SpectralBasis, lam: np.ndarray, lam_w: np.ndarray,
               H: np.ndarray | None = None) -> Prior:
    """Validate and assemble a Prior.

    Parameters
    ----------
    basis : SpectralBasis
        Must have a nonempty selected band.
    lam : array_like, shape (|K|,)
        Positive spectral variances.
    lam_w : array_like, shape (n,)
        Positive per-node noise variances.
    H : array_like, shape (m, n), optional
        Task transform; None means identity (estimate x itself).

    Raises
    ------
    ValueError
        On empty band, nonpositive variances, or shape mismatches.
    """
    if basis.bandwidth == 0:
        raise ValueError("basis has an empty band; call select_band first")
    lam = np.asarray(lam, dtype=float)
    lam_w = np.asarray(lam_w, dtype=float)
    if lam.shape != (basis.bandwidth,):
        raise ValueError(f"lam must have shape ({basis.bandwidth},)")
    if lam_w.shape != (basis.n,):
        raise ValueError(f"lam_w must have shape ({basis.n},)")
    if np.any(lam <= 0.0):
        raise ValueError("signal variances lam must be strictly positive")
    if np.any(lam_w <= 0.0):
        raise ValueError("noise variances lam_w must be strictly positive")

    V_K = basis.V_K
    if H is None:
        B = V_K
    else:
        H = np.asarray(H, dtype=float)
        if H.ndim != 2 or H.shape[1] != basis.n:
            raise ValueError(f"H must have shape (m, {basis.n})")
        B = H @ V_K
    W = B.T @ B
    W = 0.5 * (W + W.T)
    # Gram matrices are PSD up to round-off; reject anything worse.
    w_min = float(np.linalg.eigvalsh(W).min())
    scale = max(1.0, float(np.abs(W).max()))
    if w_min < -PSD_TOL * scale:
        raise ValueError("W = V_K^T H^T H V_K failed the PSD check")

    homeo = (np.max(np.abs(lam - lam[0])) <= HOMEO_TOL
             and np.max(np.abs(lam_w - lam_w[0])) <= HOMEO_TOL)
    gamma = float(lam[0] / lam_w[0]) if homeo else None
    return Prior(basis=basis, lam=_freeze(lam.copy()), lam_w=_freeze(lam_w.copy()),
                 H=None if H is None else _freeze(H.copy()), W=_freeze(W),
                 gamma=gamma)


def draw_signal(prior: Prior, seed: int) -> SignalDraw:
    """Draw (x, y) from the prior; deterministic in the seed."""
    rng = make_rng(seed)
    xbar = rng.standard_normal(prior.bandwidth) * np.sqrt(prior.lam)
    w = rng.standard_normal(prior.n) * np.sqrt(prior.lam_w)
    x = prior.basis.V_K @ xbar
    return SignalDraw(x=x, xbar_K=xbar, w=w, y=x + w, seed=int(seed))


def prior_to_json(prior: Prior) -> dict:
    """Dict form: {lambda, lambda_w, H (nested rows or "identity"), K}."""
    return {
        "lambda": [float(v) for v in prior.lam],
        "lambda_w": [float(v) for v in prior.lam_w],
        "H": "identity" if prior.H is None else [[float(v) for v in row]
                                                 for row in prior.H],
        "K": [int(i) for i in prior.basis.K],
    }


def prior_from_json(obj: dict, basis: SpectralBasis) -> Prior:
    """Rebuild a Prior against a basis recomputed from the graph."""
    K = np.asarray(obj["K"], dtype=np.intp)
    if K.size == 0 or not np.array_equal(K, np.arange(K.size)):
        raise ValueError("K must be the leading band [0, 1, ..., k-1]")
    from .graphs import select_band

    banded = select_band(basis, int(K.size))
    H = obj["H"]
    H = None if H == "identity" else np.asarray(H, dtype=float)
    return make_prior(banded, np.asarray(obj["lambda"], dtype=float),
                      np.asarray(obj["lambda_w"], dtype=float), H)


def offband_energy(prior: Prior, x: np.ndarray) -> float:
    """Max |GFT coefficient| outside the band; diagnostic for bandlimitedness."""
    xbar = gft(prior.basis, x)
    if prior.bandwidth == prior.n:
        return 0.0
    return float(np.max(np.abs(xbar[prior.bandwidth:])))
