"""Command-line front end.

Thin argparse shim over the library: every subcommand parses arguments,
calls one library entry point, and serializes the result. Exit codes:
0 success, 2 configuration or input error, 3 exhaustive enumeration
refused as infeasible.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .alpha import alpha_estimate_to_json, alpha_exact
from .bounds import bounds_report
from .experiments import (CONFIG_SCHEMA, ResultTable, config_from_dict, run,
                          summarize)
from .graphs import (gen_erdos_renyi, gen_preferential_attachment,
                     gen_random_weighted, graph_from_json, graph_to_json,
                     select_band, spectral_basis)
from .interp import mse
from .kpca import (PolyKernel, build_reduced_projector, gram_matrix,
                   kpca_basis, projector_from_json, projector_to_json,
                   sub_project)
from .samplers import (InfeasibleEnumerationError, greedy_mse,
                       greedy_result_to_json, rank_leverage, sample_leverage,
                       sample_uniform)
from .signals import make_prior

GRAPH_MODELS = ("erdos-renyi", "preferential-attachment", "random-weighted")


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _load_graph_prior(args):
    with open(args.graph) as fh:
        graph = graph_from_json(json.load(fh))
    basis = select_band(spectral_basis(graph), args.bandwidth)
    lam = np.full(args.bandwidth, args.sigma_x2)
    lam_w = np.full(graph.n, args.sigma_w2)
    return graph, make_prior(basis, lam, lam_w)


def _cmd_generate(args) -> int:
    if args.model == "erdos-renyi":
        g = gen_erdos_renyi(args.n, args.p, args.seed)
    elif args.model == "preferential-attachment":
        g = gen_preferential_attachment(args.n, args.seed)
    else:
        g = gen_random_weighted(args.n, args.seed)
    _write(json.dumps(graph_to_json(g), indent=2), args.out)
    return 0


def _cmd_sample(args) -> int:
    _, prior = _load_graph_prior(args)
    if args.method == "greedy":
        result = greedy_mse(prior, args.size)
        payload = greedy_result_to_json(result)
    else:
        if args.method == "uniform":
            S = sample_uniform(prior.n, args.size, args.seed)
        elif args.method == "leverage":
            S = sample_leverage(prior, args.size, args.seed)
        else:
            S = rank_leverage(prior, args.size)
        payload = {"indices": list(S.indices), "trajectory": None, "gains": None,
                   "mse": mse(prior, S)}
    _write(json.dumps(payload, indent=2), args.out)
    return 0


def _cmd_bounds(args) -> int:
    _, prior = _load_graph_prior(args)
    rep = bounds_report(prior)
    lines = ["m,lower,upper"]
    for m in range(prior.n + 1):
        lines.append(f"{m},{rep.lower(m):.17g},{rep.upper:.17g}")
    _write("\n".join(lines), args.out)
    return 0


def _cmd_alpha(args) -> int:
    _, prior = _load_graph_prior(args)
    est = alpha_exact(prior, cap=args.exact_cap)
    _write(json.dumps(alpha_estimate_to_json(est), indent=2), args.out)
    return 0


def _cmd_experiment_run(args) -> int:
    if args.print_schema:
        sys.stdout.write(json.dumps(CONFIG_SCHEMA, indent=2) + "\n")
        return 0
    if args.config is None:
        raise ValueError("--config is required (or use --print-schema)")
    with open(args.config) as fh:
        raw = json.load(fh)
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = config_from_dict(raw)
    table = run(cfg, jobs=args.jobs, out_dir=args.out)
    if args.out is None:
        sys.stdout.write(table.to_csv())
    return 0


def _cmd_experiment_summarize(args) -> int:
    with open(args.table) as fh:
        table = ResultTable.from_csv(fh.read())
    _write(json.dumps(summarize(table), indent=2, sort_keys=True), args.out)
    return 0


def _load_points(path: str) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.size == 0:
        raise ValueError(f"no data rows in {path}")
    return data


def _cmd_kpca_train(args) -> int:
    data = _load_points(args.data)
    kernel = PolyKernel(degree=args.degree)
    model = kpca_basis(gram_matrix(data, kernel), args.components)
    proj = build_reduced_projector(model, args.budget, args.sigma_w2)
    _write(json.dumps(projector_to_json(proj), indent=2), args.out)
    return 0


def _cmd_kpca_project(args) -> int:
    with open(args.projector) as fh:
        proj = projector_from_json(json.load(fh))
    data = _load_points(args.data)
    points = _load_points(args.points)
    if points.shape[1] != data.shape[1]:
        raise ValueError("points and training data disagree on dimension")
    kernel = proj.kernel
    rows = [sub_project(proj, data, kernel, y) for y in points]
    text = "\n".join(",".join(f"{v:.17g}" for v in row) for row in rows)
    _write(text, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="graphsampling",
        description="Sampling-set selection and Bayesian interpolation of "
                    "bandlimited graph signals")
    sub = p.add_subparsers(dest="command", required=True)

    def add_prior_args(sp):
        sp.add_argument("--graph", required=True, help="graph JSON file")
        sp.add_argument("--bandwidth", type=int, required=True,
                        help="band size |K|")
        sp.add_argument("--sigma-x2", type=float, default=1.0,
                        help="spectral signal variance (default 1.0)")
        sp.add_argument("--sigma-w2", type=float, default=0.01,
                        help="noise variance (default 0.01)")

    sp = sub.add_parser("generate", help="generate a random graph as JSON")
    sp.add_argument("--model", choices=GRAPH_MODELS, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, default=0.2,
                    help="edge probability (erdos-renyi only)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output file (default stdout)")
    sp.set_defaults(func=_cmd_generate)

    sp = sub.add_parser("sample", help="select a sampling set on a graph")
    add_prior_args(sp)
    sp.add_argument("--method", default="greedy",
                    choices=("greedy", "uniform", "leverage", "rank-leverage"))
    sp.add_argument("--size", type=int, required=True, help="sampling budget")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("bounds", help="emit the universal MSE bound curve")
    add_prior_args(sp)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_bounds)

    sp = sub.add_parser("alpha", help="exact alpha and its lower bounds")
    add_prior_args(sp)
    sp.add_argument("--exact-cap", type=int, default=12,
                    help="refuse enumeration beyond this n (default 12)")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_alpha)

    sp = sub.add_parser("experiment", help="run or summarize experiments")
    esub = sp.add_subparsers(dest="subcommand", required=True)
    spr = esub.add_parser("run", help="run an experiment from a JSON config")
    spr.add_argument("--config", default=None, help="config JSON path")
    spr.add_argument("--out", default=None, help="output directory")
    spr.add_argument("--seed", type=int, default=None,
                     help="override the config seed")
    spr.add_argument("--jobs", type=int, default=1,
                     help="parallel worker processes (default 1)")
    spr.add_argument("--print-schema", action="store_true",
                     help="print the config schema and exit")
    spr.set_defaults(func=_cmd_experiment_run)
    sps = esub.add_parser("summarize", help="aggregate a results CSV")
    sps.add_argument("--table", required=True, help="results.csv path")
    sps.add_argument("--out", default=None)
    sps.set_defaults(func=_cmd_experiment_summarize)

    sp = sub.add_parser("kpca", help="train or apply a reduced kPCA projector")
    ksub = sp.add_subparsers(dest="subcommand", required=True)
    spt = ksub.add_parser("train", help="fit a reduced projector")
    spt.add_argument("--data", required=True, help="training CSV, one point per row")
    spt.add_argument("--components", type=int, required=True)
    spt.add_argument("--budget", type=int, required=True)
    spt.add_argument("--sigma-w2", type=float, default=0.01)
    spt.add_argument("--degree", type=int, default=2, help="polynomial degree")
    spt.add_argument("--out", default=None)
    spt.set_defaults(func=_cmd_kpca_train)
    spp = ksub.add_parser("project", help="project new points with a projector")
    spp.add_argument("--projector", required=True, help="projector JSON path")
    spp.add_argument("--data", required=True, help="training CSV used to fit")
    spp.add_argument("--points", required=True, help="CSV of points to project")
    spp.add_argument("--out", default=None)
    spp.set_defaults(func=_cmd_kpca_project)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:             # argparse uses 2 for usage errors
        return int(exc.code or 0)
    try:
        return int(args.func(args) or 0)
    except InfeasibleEnumerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
