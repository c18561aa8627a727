"""Reproducible experiment runner.

Each experiment maps a JSON config to a long-format result table with
rows (experiment, trial, sampler, set_size, metric, value). Per-trial
randomness derives from SeedSequence(seed, (trial, stream)), so results
do not depend on execution order and parallel runs (--jobs) reproduce
serial ones bit for bit. CSV output carries no timestamps: reruns of
the same config are byte-identical.

Experiments
    bounds-sandwich     exhaustive per-size MSE minima vs universal bounds
    bound-tightness     greedy trajectory vs inverted set-size bound
    alpha-spectrum      exact alpha vs its spectral lower bounds
    sampler-suboptimality  relative gap to the exhaustive optimum per sampler
    objective-comparison   greedy on MSE vs greedy on log det
    set-size            samples needed for 90% MSE reduction per sampler
    kpca-reduction      subsampled kernel-PCA projection error vs budget
"""
from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .alpha import alpha_exact, relative_suboptimality
from .bounds import bounds_report, min_set_size_bound
from .graphs import (gen_erdos_renyi, gen_preferential_attachment,
                     gen_random_weighted, select_band, spectral_basis)
from .interp import mse
from .kpca import (PolyKernel, build_reduced_projector, gram_matrix, kpca_basis,
                   kpca_project, sub_project, two_circles)
from .samplers import (ENUM_CAP, exhaustive_mse_table, exhaustive_optimal,
                       greedy_generic, greedy_mse, logdet_objective,
                       rank_leverage, sample_leverage, sample_uniform)
from .seeding import child_seed, make_rng
from .signals import make_prior

EXPERIMENTS = ("bounds-sandwich", "bound-tightness", "alpha-spectrum",
               "sampler-suboptimality", "objective-comparison", "set-size",
               "kpca-reduction")
GRAPH_MODELS = ("erdos-renyi", "preferential-attachment", "random-weighted")
SAMPLERS = ("greedy", "uniform", "leverage", "rank-leverage")

CONFIG_SCHEMA = {
    "experiment": f"str, required; one of {list(EXPERIMENTS)}",
    "graph_model": f"str, one of {list(GRAPH_MODELS)} (default erdos-renyi)",
    "n": "int >= 2, number of nodes (default 20)",
    "edge_probability": "float in [0,1], erdos-renyi only (default 0.2)",
    "bandwidth": "int >= 1, band size |K| (default 5)",
    "sigma_x2": "float > 0, spectral signal variance (default 1.0)",
    "sigma_w2": "float > 0, observation noise variance (default 0.01)",
    "heteroscedastic": "bool, bounds-sandwich only: random H and per-node "
                       "noise variances (default false)",
    "h_rows": "int >= bandwidth or null, rows of the random H when "
              "heteroscedastic (default n)",
    "trials": "int >= 1 (default 100)",
    "seed": "int >= 0, master seed (default 0)",
    "samplers": f"list of {list(SAMPLERS)} (default all four)",
    "budget": "int or null; sampling budget (default bandwidth; "
              "bound-tightness default 3*bandwidth)",
    "reduction": "float in (0,1), set-size target MSE reduction (default 0.9)",
    "kpca_points": "int >= 2, training points for kpca-reduction (default 200)",
    "kpca_components": "int >= 1, retained components (default 4)",
    "enum_cap": "int, refusal threshold for exhaustive enumeration "
                f"(default {ENUM_CAP})",
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    graph_model: str = "erdos-renyi"
    n: int = 20
    edge_probability: float = 0.2
    bandwidth: int = 5
    sigma_x2: float = 1.0
    sigma_w2: float = 0.01
    heteroscedastic: bool = False
    h_rows: int | None = None
    trials: int = 100
    seed: int = 0
    samplers: tuple[str, ...] = SAMPLERS
    budget: int | None = None
    reduction: float = 0.9
    kpca_points: int = 200
    kpca_components: int = 4
    enum_cap: int = ENUM_CAP


def config_from_dict(obj: dict) -> ExperimentConfig:
    """Validate a raw JSON dict against the schema."""
    if not isinstance(obj, dict):
        raise ValueError("config must be a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" not in obj:
        raise ValueError("config is missing the required 'experiment' key")
    cfg = ExperimentConfig(**{**obj, "samplers": tuple(obj.get("samplers", SAMPLERS))})
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}; "
                         f"expected one of {list(EXPERIMENTS)}")
    if cfg.graph_model not in GRAPH_MODELS:
        raise ValueError(f"unknown graph_model {cfg.graph_model!r}")
    bad = [s for s in cfg.samplers if s not in SAMPLERS]
    if bad:
        raise ValueError(f"unknown samplers: {bad}")
    if cfg.n < 2 or cfg.trials < 1 or cfg.seed < 0:
        raise ValueError("need n >= 2, trials >= 1, seed >= 0")
    if not 0.0 <= cfg.edge_probability <= 1.0:
        raise ValueError("edge_probability must lie in [0, 1]")
    if not 1 <= cfg.bandwidth <= cfg.n:
        raise ValueError("bandwidth must lie in [1, n]")
    if cfg.sigma_x2 <= 0 or cfg.sigma_w2 <= 0:
        raise ValueError("variances must be strictly positive")
    if not 0.0 < cfg.reduction < 1.0:
        raise ValueError("reduction must lie in (0, 1)")
    if cfg.budget is not None and not 1 <= cfg.budget <= cfg.n:
        raise ValueError("budget must lie in [1, n]")
    return cfg


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(dataclasses.asdict(cfg), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ===== Result table =====

Row = tuple[str, int, str, int | None, str, float]


@dataclass(frozen=True)
class ResultTable:
    """Long-format rows plus run metadata (hash, version, key settings)."""

    meta: dict
    rows: tuple[Row, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.meta):
            buf.write(f"# {key}={self.meta[key]}\n")
        buf.write("experiment,trial,sampler,set_size,metric,value\n")
        for exp, trial, sampler, size, metric, value in self.rows:
            size_s = "" if size is None else str(int(size))
            buf.write(f"{exp},{trial},{sampler},{size_s},{metric},{value:.17g}\n")
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "ResultTable":
        meta: dict = {}
        rows: list[Row] = []
        lines = text.splitlines()
        header_seen = False
        for line in lines:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val
                continue
            if not line.strip():
                continue
            if not header_seen:
                header_seen = True
                continue
            exp, trial, sampler, size_s, metric, value = line.split(",")
            rows.append((exp, int(trial), sampler,
                         None if size_s == "" else int(size_s),
                         metric, float(value)))
        return ResultTable(meta=meta, rows=tuple(rows))


# ===== Shared per-trial setup =====

def _make_graph(cfg: ExperimentConfig, trial: int):
    seed = child_seed(cfg.seed, trial, 0)
    if cfg.graph_model == "erdos-renyi":
        return gen_erdos_renyi(cfg.n, cfg.edge_probability, seed)
    if cfg.graph_model == "preferential-attachment":
        return gen_preferential_attachment(cfg.n, seed)
    return gen_random_weighted(cfg.n, seed)


def _make_prior(cfg: ExperimentConfig, basis, trial: int):
    if cfg.heteroscedastic:
        rng = make_rng(cfg.seed, trial, 1)
        lam_w = rng.uniform(1e-3, 1e-1, size=cfg.n)
        m = cfg.h_rows if cfg.h_rows is not None else cfg.n
        if m < cfg.bandwidth:
            raise ValueError("h_rows must be >= bandwidth to keep W nonsingular")
        H = rng.standard_normal((m, cfg.n))
        return make_prior(basis, np.full(cfg.bandwidth, cfg.sigma_x2), lam_w, H)
    return make_prior(basis, np.full(cfg.bandwidth, cfg.sigma_x2),
                      np.full(cfg.n, cfg.sigma_w2))


def _trial_prior(cfg: ExperimentConfig, trial: int):
    basis = select_band(spectral_basis(_make_graph(cfg, trial)), cfg.bandwidth)
    return _make_prior(cfg, basis, trial)


def _draw_set(cfg: ExperimentConfig, prior, sampler: str, budget: int,
              trial: int):
    if sampler == "greedy":
        return greedy_mse(prior, budget).sampling_set
    if sampler == "uniform":
        return sample_uniform(prior.n, budget, child_seed(cfg.seed, trial, 2))
    if sampler == "leverage":
        return sample_leverage(prior, budget, child_seed(cfg.seed, trial, 3))
    return rank_leverage(prior, budget)


# ===== Per-trial workers =====

def _trial_bounds_sandwich(cfg: ExperimentConfig, trial: int) -> list[Row]:
    prior = _trial_prior(cfg, trial)
    rep = bounds_report(prior)
    rows: list[Row] = []
    for m in range(cfg.n + 1):
        _, vals = exhaustive_mse_table(prior, m, cap=cfg.enum_cap)
        rows.append((cfg.experiment, trial, "exhaustive", m, "min_mse",
                     float(vals.min())))
        rows.append((cfg.experiment, trial, "bound", m, "lower_bound",
                     rep.lower(m)))
        rows.append((cfg.experiment, trial, "bound", m, "upper_bound", rep.upper))
    return rows


def _trial_bound_tightness(cfg: ExperimentConfig, trial: int) -> list[Row]:
    prior = _trial_prior(cfg, trial)
    budget = cfg.budget if cfg.budget is not None else min(cfg.n, 3 * cfg.bandwidth)
    result = greedy_mse(prior, budget)
    rows: list[Row] = []
    last_tight = 1
    for s, eta in enumerate(result.objective_trajectory, start=1):
        sb = min_set_size_bound(prior, float(eta))
        tight = sb.size_tight if sb.size_tight is not None else float("nan")
        rows.append((cfg.experiment, trial, "greedy", s, "mse", float(eta)))
        rows.append((cfg.experiment, trial, "bound", s, "min_size_tight",
                     float(tight)))
        rows.append((cfg.experiment, trial, "bound", s, "min_size_simple",
                     float(sb.size_simple)))
        if sb.size_tight is not None:
            last_tight = max(1, sb.size_tight)
    rows.append((cfg.experiment, trial, "greedy", budget, "terminal_size_ratio",
                 budget / last_tight))
    return rows


def _trial_alpha_spectrum(cfg: ExperimentConfig, trial: int) -> list[Row]:
    prior = _trial_prior(cfg, trial)
    est = alpha_exact(prior)
    rows = [(cfg.experiment, trial, "exact", None, "alpha", est.alpha_exact),
            (cfg.experiment, trial, "bound", None, "alpha_lb_general",
             float(est.alpha_lb_general))]
    if est.alpha_lb_homeo is not None:
        rows.append((cfg.experiment, trial, "bound", None, "alpha_lb_homeo",
                     float(est.alpha_lb_homeo)))
    return rows


def _trial_suboptimality(cfg: ExperimentConfig, trial: int) -> list[Row]:
    prior = _trial_prior(cfg, trial)
    budget = cfg.budget if cfg.budget is not None else cfg.bandwidth
    _, f_star = exhaustive_optimal(prior, budget, cap=cfg.enum_cap)
    f_empty = mse(prior, ())
    rows: list[Row] = [(cfg.experiment, trial, "exhaustive", budget, "mse",
                        f_star)]
    for sampler in cfg.samplers:
        S = _draw_set(cfg, prior, sampler, budget, trial)
        f_val = mse(prior, S)
        rows.append((cfg.experiment, trial, sampler, budget, "mse", f_val))
        rows.append((cfg.experiment, trial, sampler, budget, "relsub",
                     relative_suboptimality(f_val, f_star, f_empty)))
    return rows


def _trial_objective_comparison(cfg: ExperimentConfig, trial: int) -> list[Row]:
    prior = _trial_prior(cfg, trial)
    budget = cfg.budget if cfg.budget is not None else cfg.bandwidth
    rows: list[Row] = []

    _, f_star = exhaustive_optimal(prior, budget, cap=cfg.enum_cap)
    g_mse = greedy_mse(prior, budget)
    rel = relative_suboptimality(float(g_mse.objective_trajectory[-1]),
                                 f_star, mse(prior, ()))
    rows.append((cfg.experiment, trial, "greedy-mse", budget, "relsub", rel))

    obj = logdet_objective(prior)
    _, f_star_ld = exhaustive_optimal(prior, budget, cap=cfg.enum_cap,
                                      objective="logdet")
    g_ld = greedy_generic(obj, prior.n, budget)
    rel_ld = relative_suboptimality(float(g_ld.objective_trajectory[-1]),
                                    f_star_ld, obj.eval(()))
    rows.append((cfg.experiment, trial, "greedy-logdet", budget, "relsub",
                 rel_ld))
    return rows


def _growth_size(prior, order, target: float) -> float:
    """First prefix length of `order` whose MSE reaches the target."""
    for s in range(1, len(order) + 1):
        if mse(prior, order[:s]) <= target:
            return float(s)
    return float("nan")


def _trial_set_size(cfg: ExperimentConfig, trial: int) -> list[Row]:
    prior = _trial_prior(cfg, trial)
    target = (1.0 - cfg.reduction) * mse(prior, ())
    rows: list[Row] = []
    for sampler in cfg.samplers:
        if sampler == "greedy":
            traj = greedy_mse(prior, cfg.n).objective_trajectory
            hit = np.nonzero(traj <= target)[0]
            size = float(hit[0] + 1) if hit.size else float("nan")
        else:
            order = _draw_set(cfg, prior, sampler, cfg.n, trial).indices
            size = _growth_size(prior, order, target)
        rows.append((cfg.experiment, trial, sampler, None, "size_for_reduction",
                     size))
    return rows


def _trial_kpca(cfg: ExperimentConfig, trial: int) -> list[Row]:
    X, _ = two_circles(cfg.kpca_points, seed=child_seed(cfg.seed, trial, 4))
    holdout, _ = two_circles(100, seed=child_seed(cfg.seed, trial, 5))
    kernel = PolyKernel(degree=2)
    model = kpca_basis(gram_matrix(X, kernel), cfg.kpca_components)
    full = np.stack([kpca_project(model, y) for y in holdout])
    k = cfg.kpca_components
    rows: list[Row] = []
    for budget in (k, 2 * k, 4 * k):
        proj = build_reduced_projector(model, budget, cfg.sigma_w2)
        before = kernel.evals
        approx = np.stack([sub_project(proj, X, kernel, y) for y in holdout])
        per_point = (kernel.evals - before) / len(holdout)
        err = float(np.mean(np.sum((approx - full) ** 2, axis=1)))
        rows.append((cfg.experiment, trial, "greedy", budget,
                     "mean_sq_proj_err", err))
        rows.append((cfg.experiment, trial, "greedy", budget,
                     "kernel_evals_per_point", per_point))
    return rows


_TRIAL_FN = {
    "bounds-sandwich": _trial_bounds_sandwich,
    "bound-tightness": _trial_bound_tightness,
    "alpha-spectrum": _trial_alpha_spectrum,
    "sampler-suboptimality": _trial_suboptimality,
    "objective-comparison": _trial_objective_comparison,
    "set-size": _trial_set_size,
    "kpca-reduction": _trial_kpca,
}


def _run_one(args) -> list[Row]:
    cfg, trial = args
    return _TRIAL_FN[cfg.experiment](cfg, trial)


def _validate_rows(cfg: ExperimentConfig, rows: list[Row]) -> None:
    """Re-check structural invariants before anything is written."""
    if cfg.experiment == "bounds-sandwich":
        by_key: dict[tuple[int, int], dict[str, float]] = {}
        for _, trial, _, size, metric, value in rows:
            by_key.setdefault((trial, size), {})[metric] = value
        for (trial, size), vals in by_key.items():
            if not (vals["lower_bound"] <= vals["min_mse"] * (1 + 1e-12) and
                    vals["min_mse"] <= vals["upper_bound"] * (1 + 1e-12)):
                raise RuntimeError(
                    f"bound violation at trial {trial}, size {size}: {vals}")
    if cfg.experiment in ("sampler-suboptimality", "objective-comparison"):
        for _, trial, sampler, _, metric, value in rows:
            if metric == "relsub" and not -1e-12 <= value <= 1 + 1e-12:
                raise RuntimeError(
                    f"relative suboptimality out of [0,1] at trial {trial}, "
                    f"sampler {sampler}: {value}")


def run(cfg: ExperimentConfig, jobs: int = 1,
        out_dir: str | None = None) -> ResultTable:
    """Execute all trials (optionally in parallel) and assemble the table.

    With out_dir set, writes results.csv and summary.json there.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    tasks = [(cfg, t) for t in range(cfg.trials)]
    if jobs == 1 or cfg.trials == 1:
        per_trial = [_run_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            per_trial = list(ex.map(_run_one, tasks))
    rows: list[Row] = [row for block in per_trial for row in block]
    _validate_rows(cfg, rows)
    meta = {"experiment": cfg.experiment, "config_hash": config_hash(cfg),
            "package_version": __version__, "n": cfg.n,
            "bandwidth": cfg.bandwidth, "trials": cfg.trials, "seed": cfg.seed}
    table = ResultTable(meta=meta, rows=tuple(rows))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "results.csv"), "w") as fh:
            fh.write(table.to_csv())
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump(summarize(table), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return table


def summarize(table: ResultTable) -> dict:
    """Aggregate a result table into per-(sampler, metric) statistics."""
    if not table.rows:
        raise ValueError("cannot summarize an empty result table")
    groups: dict[tuple[str, str], list[float]] = {}
    for _, _, sampler, _, metric, value in table.rows:
        groups.setdefault((sampler, metric), []).append(value)
    metrics: dict[str, dict] = {}
    for (sampler, metric), vals in sorted(groups.items()):
        arr = np.asarray(vals)
        finite = arr[np.isfinite(arr)]
        stats = {"count": int(arr.size),
                 "mean": float(finite.mean()) if finite.size else None,
                 "median": float(np.median(finite)) if finite.size else None,
                 "std": float(finite.std()) if finite.size else None,
                 "min": float(finite.min()) if finite.size else None,
                 "max": float(finite.max()) if finite.size else None}
        if metric == "relsub":
            stats["frac_zero"] = float(np.mean(finite <= 1e-9))
        if metric == "size_for_reduction":
            stats["unreached"] = int(np.sum(~np.isfinite(arr)))
            bw = table.meta.get("bandwidth")
            if bw is not None and finite.size:
                stats["frac_at_bandwidth"] = float(np.mean(finite == int(bw)))
            if finite.size:
                stats["quantiles"] = {
                    f"p{q}": float(np.percentile(finite, q))
                    for q in (10, 25, 50, 75, 90)}
        metrics[f"{sampler}/{metric}"] = stats
    return {"experiment": table.meta.get("experiment"),
            "config_hash": table.meta.get("config_hash"),
            "rows": len(table.rows), "metrics": metrics}
