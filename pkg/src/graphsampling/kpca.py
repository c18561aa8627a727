"""Subsampled kernel PCA via the graph-sampling machinery.

The Gram matrix of a training set is a dense weighted graph, and the
kernel-space projection of a new point y onto the top-k components is

    ybar = V_K^T ytilde,   ytilde_i = kappa(u_i, y),

which costs one kernel evaluation per training point. Treating ytilde
as a noisy bandlimited signal on the Gram graph lets the greedy sampler
pick |S| << n training points and a reduced projector P = V_K^T L(S)
reconstruct the projection from |S| kernel evaluations only.

Kernel objects count their scalar evaluations so the saving is
measurable rather than asserted.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .graphs import SpectralBasis
from .interp import SamplingSet, optimal_interpolator
from .samplers import greedy_mse
from .seeding import make_rng
from .signals import make_prior

EIGENVALUE_CLAMP_REL = 1e-12


def poly_kernel(r: np.ndarray, s: np.ndarray, d: int, c: float = 1.0) -> float:
    """Polynomial kernel (r . s + c)^d."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if r.shape != s.shape or r.ndim != 1:
        raise ValueError("kernel arguments must be 1-d vectors of equal length")
    if d < 1:
        raise ValueError("polynomial degree must be >= 1")
    return float((r @ s + c) ** d)


@dataclass
class PolyKernel:
    """Polynomial kernel with a running evaluation counter.

    evals counts scalar kernel evaluations across __call__, cross and
    pairwise, so pipelines can report measured work.
    """

    degree: int
    offset: float = 1.0
    evals: int = 0

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")

    def __call__(self, r: np.ndarray, s: np.ndarray) -> float:
        self.evals += 1
        return float((np.asarray(r, dtype=float) @ np.asarray(s, dtype=float)
                      + self.offset) ** self.degree)

    def cross(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """kappa(x_i, y) for every row of X; counts len(X) evaluations."""
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[1],):
            raise ValueError("X must be (n, d) and y length d")
        self.evals += X.shape[0]
        return (X @ y + self.offset) ** self.degree

    def pairwise(self, X: np.ndarray) -> np.ndarray:
        """Full Gram matrix; counts n^2 evaluations."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError("X must be a 2-d array of points")
        self.evals += X.shape[0] ** 2
        G = (X @ X.T + self.offset) ** self.degree
        return 0.5 * (G + G.T)


@dataclass(frozen=True)
class GramModel:
    """Training data, its Gram matrix, and (after kpca_basis) a band.

    The basis eigenvalues are sorted by descending signed value: for a
    PSD Gram matrix the leading components carry the variance, and any
    slightly negative round-off eigenvalues sort last.
    """

    data: np.ndarray
    kernel: PolyKernel
    Phi: np.ndarray
    basis: SpectralBasis | None = None
    k: int | None = None


def gram_matrix(data: np.ndarray, kernel: PolyKernel) -> GramModel:
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 1:
        raise ValueError("data must be a nonempty (n, d) array")
    return GramModel(data=data, kernel=kernel, Phi=kernel.pairwise(data))


def kpca_basis(model: GramModel, k: int) -> GramModel:
    """Attach the top-k eigenbasis of the Gram matrix (signed descending)."""
    n = model.Phi.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"component count k={k} out of range [1, {n}]")
    w, V = np.linalg.eigh(model.Phi)
    order = np.lexsort((np.arange(n), -w))
    basis = SpectralBasis(V=V[:, order].copy(), D=w[order].copy(),
                          K=np.arange(k, dtype=np.intp))
    return replace(model, basis=basis, k=k)


def kpca_project(model: GramModel, y: np.ndarray) -> np.ndarray:
    """Full projection V_K^T ytilde; costs n kernel evaluations."""
    if model.basis is None:
        raise ValueError("model has no basis; call kpca_basis first")
    ytilde = model.kernel.cross(model.data, y)
    return model.basis.V_K.T @ ytilde


@dataclass(frozen=True)
class ReducedProjector:
    """k x |S| matrix recovering projections from sampled kernel values."""

    P: np.ndarray
    S: SamplingSet
    sigma_w2: float
    kernel: PolyKernel


def build_reduced_projector(model: GramModel, budget: int,
                            sigma_w2: float) -> ReducedProjector:
    """Greedy sampling set plus interpolator, composed into one matrix.

    The prior on the Gram graph takes the retained eigenvalues as
    spectral variances (clamped below at 1e-12 of the leading one) and
    homoscedastic observation noise sigma_w2.
    """
    if model.basis is None:
        raise ValueError("model has no basis; call kpca_basis first")
    if sigma_w2 <= 0.0:
        raise ValueError("sigma_w2 must be strictly positive")
    D_K = model.basis.D_K
    lam_max = float(D_K[0])
    if lam_max <= 0.0:
        raise ValueError("leading Gram eigenvalue must be positive")
    lam = np.maximum(D_K, EIGENVALUE_CLAMP_REL * lam_max)
    n = model.basis.n
    prior = make_prior(model.basis, lam, np.full(n, float(sigma_w2)))
    result = greedy_mse(prior, budget)
    L = optimal_interpolator(prior, result.sampling_set)
    P = model.basis.V_K.T @ L
    return ReducedProjector(P=P, S=result.sampling_set,
                            sigma_w2=float(sigma_w2), kernel=model.kernel)


def sub_project(proj: ReducedProjector, data: np.ndarray, kernel: PolyKernel,
                y: np.ndarray) -> np.ndarray:
    """Approximate projection from |S| kernel evaluations."""
    idx = np.asarray(proj.S.indices, dtype=np.intp)
    data = np.asarray(data, dtype=float)
    if idx.size and idx.max() >= data.shape[0]:
        raise ValueError("projector indexes past the end of the training data")
    return proj.P @ kernel.cross(data[idx], y)


def two_circles(n: int = 200, radii: tuple[float, float] = (1.0, 3.0),
                noise: float = 0.1, seed: int = 0):
    """Synthetic 2-d data: two concentric noisy circles.

    Returns (points, labels) with n points split evenly; labels are 0
    for the inner circle and 1 for the outer.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = make_rng(seed)
    counts = (n - n // 2, n // 2)
    pts = []
    labels = []
    for label, (radius, count) in enumerate(zip(radii, counts)):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=count)
        r = radius + noise * rng.standard_normal(count)
        pts.append(np.column_stack((r * np.cos(theta), r * np.sin(theta))))
        labels.append(np.full(count, label, dtype=np.intp))
    return np.vstack(pts), np.concatenate(labels)


def projector_to_json(proj: ReducedProjector) -> dict:
    return {"indices": [int(i) for i in proj.S.indices],
            "P": [[float(v) for v in row] for row in proj.P],
            "k": int(proj.P.shape[0]),
            "sigma_w2": proj.sigma_w2,
            "kernel": {"type": "poly", "d": proj.kernel.degree,
                       "c": proj.kernel.offset}}


def projector_from_json(obj: dict) -> ReducedProjector:
    kspec = obj["kernel"]
    if kspec.get("type") != "poly":
        raise ValueError(f"unsupported kernel type {kspec.get('type')!r}")
    kernel = PolyKernel(degree=int(kspec["d"]), offset=float(kspec.get("c", 1.0)))
    P = np.asarray(obj["P"], dtype=float)
    if P.ndim != 2 or P.shape[0] != int(obj["k"]):
        raise ValueError("projector matrix shape disagrees with k")
    return ReducedProjector(P=P, S=SamplingSet(indices=tuple(int(i) for i in obj["indices"])),
                            sigma_w2=float(obj["sigma_w2"]), kernel=kernel)
