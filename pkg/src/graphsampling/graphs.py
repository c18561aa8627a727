"""Random graph generation and graph Fourier bases.

The shift operator throughout is a real symmetric weighted adjacency
matrix. Its orthonormal eigenbasis defines the graph Fourier transform;
frequencies are ordered by descending eigenvalue magnitude and a signal
is bandlimited when it lies in the span of the first few columns.

Generators
    gen_erdos_renyi             unit-weight edges from independent coin flips
    gen_preferential_attachment tree grown one node at a time, degree-biased
    gen_random_weighted         dense Uniform[0,1] weights

Spectral tools
    spectral_basis  full symmetric eigendecomposition, deterministic order
    select_band     keep the k largest-magnitude frequencies
    gft / igft      analysis transform and bandlimited synthesis

Serialization
    graph_to_json / graph_from_json   edge-list dicts; eigendata is never
    serialized, it is recomputed from the adjacency.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .seeding import make_rng

SYMMETRY_TOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Weighted undirected graph: symmetric adjacency plus provenance."""

    n: int
    adjacency: np.ndarray
    model_tag: str
    seed: int


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenbasis of a symmetric shift operator.

    V holds orthonormal eigenvectors in columns, D the eigenvalues in
    descending-magnitude order (ties broken by descending signed value,
    then ascending original index). K lists the selected frequency
    indices; empty until select_band is applied.
    """

    V: np.ndarray
    D: np.ndarray
    K: np.ndarray

    @property
    def n(self) -> int:
        return self.V.shape[0]

    @property
    def bandwidth(self) -> int:
        return len(self.K)

    @property
    def V_K(self) -> np.ndarray:
        return self.V[:, self.K]

    @property
    def D_K(self) -> np.ndarray:
        return self.D[self.K]


def gen_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi graph: each of the n(n-1)/2 pairs is a unit edge w.p. p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability p must lie in [0, 1]")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.size) < p
    A = np.zeros((n, n))
    A[iu[mask], ju[mask]] = 1.0
    A = A + A.T
    return Graph(n=n, adjacency=_freeze(A), model_tag="erdos-renyi", seed=int(seed))


def gen_preferential_attachment(n: int, seed: int) -> Graph:
    """Degree-biased attachment tree.

    The first two nodes are joined; every later node attaches one unit
    edge to an existing node chosen with probability proportional to its
    current degree. The result is a tree with n - 1 edges.
    """
    if n < 2:
        raise ValueError("preferential attachment needs n >= 2")
    rng = make_rng(seed)
    A = np.zeros((n, n))
    A[0, 1] = A[1, 0] = 1.0
    deg = np.zeros(n)
    deg[:2] = 1.0
    for j in range(2, n):
        probs = deg[:j] / deg[:j].sum()
        target = int(rng.choice(j, p=probs))
        A[j, target] = A[target, j] = 1.0
        deg[target] += 1.0
        deg[j] = 1.0
    return Graph(n=n, adjacency=_freeze(A), model_tag="preferential-attachment",
                 seed=int(seed))


def gen_random_weighted(n: int, seed: int) -> Graph:
    """Complete graph with independent Uniform[0,1] weights off the diagonal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    w = rng.random(iu.size)
    A = np.zeros((n, n))
    A[iu, ju] = w
    A = A + A.T
    return Graph(n=n, adjacency=_freeze(A), model_tag="random-weighted", seed=int(seed))


def spectral_basis(graph: Graph | np.ndarray) -> SpectralBasis:
    """Eigendecomposition of the adjacency with deterministic ordering.

    Raises ValueError if the matrix is asymmetric beyond ``SYMMETRY_TOL``.
    Ordering: descending |lambda|, ties by descending signed lambda, then
    ascending original index, so repeated runs agree exactly.
    """
    A = graph.adjacency if isinstance(graph, Graph) else np.asarray(graph, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOL:
        raise ValueError("adjacency is not symmetric within 1e-12")
    A = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(A)
    order = np.lexsort((np.arange(w.size), -w, -np.abs(w)))
    return SpectralBasis(V=_freeze(V[:, order].copy()), D=_freeze(w[order].copy()),
                         K=_freeze(np.empty(0, dtype=np.intp)))


def select_band(basis: SpectralBasis, k: int) -> SpectralBasis:
    """Restrict to the k largest-magnitude frequencies (1 <= k <= n)."""
    if not 1 <= k <= basis.n:
        raise ValueError(f"band size k={k} out of range [1, {basis.n}]")
    return replace(basis, K=_freeze(np.arange(k, dtype=np.intp)))


def gft(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    """Analysis transform V^T x for a length-n vertex signal."""
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.n,):
        raise ValueError(f"signal must have shape ({basis.n},)")
    return basis.V.T @ x


def igft(basis: SpectralBasis, xbar_K: np.ndarray) -> np.ndarray:
    """Bandlimited synthesis V_K xbar_K; input must match the band size."""
    xbar_K = np.asarray(xbar_K, dtype=float)
    if xbar_K.shape != (basis.bandwidth,):
        raise ValueError(f"coefficients must have shape ({basis.bandwidth},)")
    return basis.V_K @ xbar_K


def graph_to_json(graph: Graph) -> dict:
    """Edge-list dict: {n, model_tag, seed, edges: [[i, j, w], ...]} with i < j."""
    iu, ju = np.triu_indices(graph.n, k=1)
    w = graph.adjacency[iu, ju]
    nz = w != 0.0
    edges = [[int(i), int(j), float(v)] for i, j, v in zip(iu[nz], ju[nz], w[nz])]
    return {"n": graph.n, "model_tag": graph.model_tag, "seed": graph.seed,
            "edges": edges}


def graph_from_json(obj: dict) -> Graph:
    n = int(obj["n"])
    if n < 1:
        raise ValueError("n must be >= 1")
    A = np.zeros((n, n))
    for i, j, w in obj["edges"]:
        i, j = int(i), int(j)
        if not 0 <= i < j < n:
            raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
        A[i, j] = A[j, i] = float(w)
    return Graph(n=n, adjacency=_freeze(A), model_tag=str(obj["model_tag"]),
                 seed=int(obj["seed"]))
