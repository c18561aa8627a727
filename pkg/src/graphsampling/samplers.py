"""Sampling-set selection: greedy, exhaustive, and randomized baselines.

greedy_mse implements cost-function minimization with rank-1 updates:
adding node u to a set with inner error covariance Kbar changes the MSE
by exactly

    score(u) = v_u^T Kbar W Kbar v_u / (lam_w[u] + v_u^T Kbar v_u),

and Kbar itself by a Sherman-Morrison downdate with the same
denominator, so each of the budget steps costs O(n |K|^2) instead of a
fresh inversion per candidate. A residual check on Z Kbar = I triggers
re-inversion if the recursion ever drifts.

exhaustive_optimal enumerates all C(n, k) sets (refusing beyond a cap)
and is the oracle the greedy and randomized rules are judged against.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .interp import SamplingSet, error_state, mse
from .seeding import make_rng

ENUM_CAP = 2_000_000
_RESID_TOL = 1e-6


class InfeasibleEnumerationError(RuntimeError):
    """Exhaustive enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class Objective:
    """Set function to minimize; eval maps an index sequence to a float."""

    name: str
    eval: Callable[[Sequence[int]], float]


def mse_objective(prior) -> Objective:
    return Objective(name="mse", eval=lambda S: mse(prior, S))


def logdet_objective(prior) -> Objective:
    """log det Kbar(S); supermodular and monotone decreasing."""

    def _eval(S) -> float:
        state = error_state(prior, S)
        sign, ld = np.linalg.slogdet(state.Z)
        if sign <= 0:
            raise ValueError("Z(S) must be positive definite")
        return -float(ld)

    return Objective(name="logdet", eval=_eval)


@dataclass(frozen=True)
class GreedyResult:
    """Selected set plus the objective value and gain after each step."""

    sampling_set: SamplingSet
    objective_trajectory: np.ndarray
    per_step_gain: np.ndarray

    @property
    def indices(self) -> tuple[int, ...]:
        return self.sampling_set.indices


def greedy_mse(prior, budget: int) -> GreedyResult:
    """Greedy MSE minimization with rank-1 covariance downdates.

    Ties in the per-step score break toward the lowest node index. The
    trajectory records trace(W Kbar) after each selection.
    """
    n, k = prior.n, prior.bandwidth
    if not 1 <= budget <= n:
        raise ValueError(f"budget must lie in [1, {n}]")
    V = prior.basis.V_K
    Kbar = np.diag(prior.lam)
    Z = np.diag(1.0 / prior.lam)
    eye = np.eye(k)
    available = np.ones(n, dtype=bool)
    chosen: list[int] = []
    traj: list[float] = []
    gains: list[float] = []
    for _ in range(budget):
        KV = Kbar @ V.T                          # columns are Kbar v_u
        a = np.einsum("uk,ku->u", V, KV)
        b = np.einsum("ku,ku->u", prior.W @ KV, KV)
        scores = b / (prior.lam_w + a)
        scores[~available] = -np.inf
        u = int(np.argmax(scores))               # first max = lowest index
        Kv = KV[:, u]
        denom = prior.lam_w[u] + a[u]
        Kbar = Kbar - np.outer(Kv, Kv) / denom
        Kbar = 0.5 * (Kbar + Kbar.T)
        Z = Z + np.outer(V[u], V[u]) / prior.lam_w[u]
        if np.max(np.abs(Z @ Kbar - eye)) > _RESID_TOL:
            Kbar = np.linalg.inv(Z)
            Kbar = 0.5 * (Kbar + Kbar.T)
        available[u] = False
        chosen.append(u)
        gains.append(float(scores[u]))
        traj.append(float(np.sum(prior.W * Kbar)))
    return GreedyResult(
        sampling_set=SamplingSet(indices=tuple(chosen), trajectory=tuple(traj)),
        objective_trajectory=np.asarray(traj),
        per_step_gain=np.asarray(gains))


def greedy_generic(objective: Objective, n: int, budget: int) -> GreedyResult:
    """Greedy minimization of an arbitrary set function by re-evaluation.

    O(n * budget) objective calls; use greedy_mse for the MSE objective.
    """
    if not 1 <= budget <= n:
        raise ValueError(f"budget must lie in [1, {n}]")
    selected: list[int] = []
    remaining = list(range(n))
    f_prev = objective.eval(())
    traj: list[float] = []
    gains: list[float] = []
    for _ in range(budget):
        best_u, best_val = -1, np.inf
        for u in remaining:                      # ascending: ties pick lowest
            val = objective.eval(selected + [u])
            if val < best_val:
                best_u, best_val = u, val
        selected.append(best_u)
        remaining.remove(best_u)
        gains.append(f_prev - best_val)
        traj.append(best_val)
        f_prev = best_val
    return GreedyResult(
        sampling_set=SamplingSet(indices=tuple(selected), trajectory=tuple(traj)),
        objective_trajectory=np.asarray(traj),
        per_step_gain=np.asarray(gains))


# ===== Exhaustive enumeration =====

def _node_outers(prior) -> np.ndarray:
    """R[i] = lam_w[i]^{-1} v_i v_i^T for every node, shape (n, |K|, |K|)."""
    V = prior.basis.V_K
    return np.einsum("i,ik,il->ikl", 1.0 / prior.lam_w, V, V)


def _batch_Z(prior, combos: np.ndarray, R: np.ndarray) -> np.ndarray:
    Z = R[combos].sum(axis=1)
    r = np.arange(prior.bandwidth)
    Z[:, r, r] += 1.0 / prior.lam
    return Z


def batch_mse(prior, combos: np.ndarray) -> np.ndarray:
    """MSE for a (c, k) array of index combinations, vectorized."""
    combos = np.asarray(combos, dtype=np.intp)
    Z = _batch_Z(prior, combos, _node_outers(prior))
    Kbar = np.linalg.inv(Z)
    return np.einsum("kl,blk->b", prior.W, Kbar)


def batch_logdet(prior, combos: np.ndarray) -> np.ndarray:
    """log det Kbar for a (c, k) array of index combinations."""
    combos = np.asarray(combos, dtype=np.intp)
    Z = _batch_Z(prior, combos, _node_outers(prior))
    sign, ld = np.linalg.slogdet(Z)
    if np.any(sign <= 0):
        raise ValueError("Z(S) must be positive definite")
    return -ld


def _check_enum_size(n: int, k: int, cap: int) -> int:
    total = math.comb(n, k)
    if total > cap:
        raise InfeasibleEnumerationError(
            f"enumerating C({n}, {k}) = {total} sets exceeds the cap of {cap}")
    return total


def exhaustive_mse_table(prior, k: int, cap: int = ENUM_CAP):
    """All size-k sets (lexicographic) and their MSEs; cap-guarded."""
    if not 0 <= k <= prior.n:
        raise ValueError(f"set size k={k} out of range [0, {prior.n}]")
    _check_enum_size(prior.n, k, cap)
    combos = np.array(list(itertools.combinations(range(prior.n), k)),
                      dtype=np.intp).reshape(-1, k)
    return combos, batch_mse(prior, combos)


def exhaustive_optimal(prior, k: int, cap: int = ENUM_CAP,
                       objective: str = "mse",
                       chunk: int = 65536) -> tuple[SamplingSet, float]:
    """Global minimizer over all C(n, k) sampling sets of size k.

    Enumerates in lexicographic order with chunked batch evaluation;
    exact ties resolve to the lexicographically smallest set. Raises
    InfeasibleEnumerationError (reporting the count) beyond the cap.
    objective is "mse" or "logdet".
    """
    if not 0 <= k <= prior.n:
        raise ValueError(f"set size k={k} out of range [0, {prior.n}]")
    if objective not in ("mse", "logdet"):
        raise ValueError('objective must be "mse" or "logdet"')
    _check_enum_size(prior.n, k, cap)
    evaluate = batch_mse if objective == "mse" else batch_logdet
    it = itertools.combinations(range(prior.n), k)
    best_val = np.inf
    best_set: tuple[int, ...] | None = None
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            break
        combos = np.array(block, dtype=np.intp).reshape(len(block), k)
        vals = evaluate(prior, combos)
        j = int(np.argmin(vals))                 # first min = lex-smallest
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_set = tuple(int(i) for i in combos[j])
    assert best_set is not None
    return SamplingSet(indices=best_set), best_val


# ===== Randomized and ranking baselines =====

def leverage_scores(basis) -> np.ndarray:
    """Squared row norms of V_K; they sum to |K|."""
    V = basis.V_K
    return np.einsum("ik,ik->i", V, V)


def sample_uniform(n: int, k: int, seed: int) -> SamplingSet:
    """k distinct nodes uniformly at random."""
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    rng = make_rng(seed)
    idx = rng.choice(n, size=k, replace=False)
    return SamplingSet(indices=tuple(int(i) for i in idx))


def sample_leverage(prior, k: int, seed: int) -> SamplingSet:
    """Sequential draws without replacement, proportional to leverage."""
    n = prior.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    rng = make_rng(seed)
    lev = leverage_scores(prior.basis)
    remaining = list(range(n))
    chosen: list[int] = []
    for _ in range(k):
        wts = lev[remaining]
        tot = wts.sum()
        if tot <= 0.0:
            p = np.full(len(remaining), 1.0 / len(remaining))
        else:
            p = wts / tot
        pick = int(rng.choice(len(remaining), p=p))
        chosen.append(remaining.pop(pick))
    return SamplingSet(indices=tuple(chosen))


def rank_leverage(prior, k: int) -> SamplingSet:
    """Deterministic top-k by leverage; ties toward the lowest index."""
    n = prior.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    lev = leverage_scores(prior.basis)
    order = np.lexsort((np.arange(n), -lev))
    return SamplingSet(indices=tuple(int(i) for i in order[:k]))


# ===== Serialization =====

def greedy_result_to_json(res: GreedyResult) -> dict:
    return {"indices": [int(i) for i in res.indices],
            "trajectory": [float(v) for v in res.objective_trajectory],
            "gains": [float(v) for v in res.per_step_gain]}


def greedy_result_from_json(obj: dict) -> GreedyResult:
    traj = [float(v) for v in obj["trajectory"]]
    return GreedyResult(
        sampling_set=SamplingSet(indices=tuple(int(i) for i in obj["indices"]),
                                 trajectory=tuple(traj)),
        objective_trajectory=np.asarray(traj),
        per_step_gain=np.asarray([float(v) for v in obj["gains"]]))
