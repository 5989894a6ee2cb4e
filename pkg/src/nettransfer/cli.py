"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed data.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import estimators, evaluation, ingest, matrixio, models
from .distance import DEFAULT_GRID, graph_distance_matrix, rankings_constant
from .validation import check_adjacency, check_prob_matrix


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this tool reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="nettransfer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[], help="draw one source/target instance")
    gen.add_argument("--config", required=True, help="config with [source] and [target]")
    gen.add_argument("--n", type=int, help="node count (overrides [experiment])")
    gen.add_argument("--n-observed", type=int, help="observed node count (overrides)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-dir", required=True)

    est = sub.add_parser("estimate", help="estimate the full target matrix")
    est.add_argument("--source-adj", required=True)
    est.add_argument("--target-adj", required=True)
    est.add_argument("--subset", required=True, help="file with one observed index per line")
    est.add_argument("--method", choices=["rowwise", "block", "oracle"], default="rowwise")
    est.add_argument("--h", default="auto", help="quantile bandwidth or 'auto'")
    est.add_argument("--no-diagonal", action="store_true", help="leave the diagonal at zero")
    est.add_argument("--k-source", type=int)
    est.add_argument("--k-target", type=int)
    est.add_argument("--map-mode", choices=["exact", "lsq"], default="exact")
    est.add_argument("--truth", help="true matrix (oracle method only)")
    est.add_argument("--p-flip", type=float, default=0.1)
    est.add_argument("--threshold-factor", type=float, default=2.02)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--out", required=True)

    exp = sub.add_parser("experiment", help="repeated-trial comparison of estimators")
    exp.add_argument("--config", required=True)
    exp.add_argument("--trials", type=int, help="override [experiment] trials")
    exp.add_argument("--seed", type=int, help="override [experiment] seed")
    exp.add_argument("--jobs", type=int, default=1)
    exp.add_argument("--out-prefix", required=True, help="writes <prefix>.csv and <prefix>.json")

    ing = sub.add_parser("ingest", help="edge lists or a contact log to adjacency CSVs")
    ing.add_argument("--edge-list", action="append", default=[])
    ing.add_argument("--temporal")
    ing.add_argument("--bins", type=int, default=10)
    ing.add_argument("--intersect", action="store_true", help="restrict edge lists to common nodes")
    ing.add_argument("--out-dir", required=True)

    chk = sub.add_parser("check-rankings", help="test neighbor-rank transfer between two matrices")
    chk.add_argument("--source", required=True)
    chk.add_argument("--target", required=True)
    chk.add_argument("--h", type=float, required=True)
    chk.add_argument("--grid", help="comma separated multipliers")
    chk.add_argument("--out", help="write the JSON report here (default stdout)")

    heat = sub.add_parser("heatmap", help="export a truth/estimate pair as plot-ready CSVs")
    heat.add_argument("--truth", required=True)
    heat.add_argument("--estimate", required=True)
    heat.add_argument("--out-prefix", required=True)
    return parser


def _read_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    found = parser.read(path)
    if not found:
        raise ValueError(f"cannot read config {path}")
    return parser


def _experiment_settings(config, args):
    section = config["experiment"] if config.has_section("experiment") else {}
    n = args.n if getattr(args, "n", None) else int(section.get("n", 0))
    n_obs_arg = getattr(args, "n_observed", None)
    n_observed = n_obs_arg if n_obs_arg else int(section.get("n_observed", section.get("n_q", 0)))
    if n < 1 or n_observed < 1:
        raise ValueError("config needs positive n and n_observed")
    return n, n_observed, section


def _specs_from_config(config, n, n_observed):
    for name in ("source", "target"):
        if not config.has_section(name):
            raise ValueError(f"config is missing the [{name}] section")
    source = models.model_from_config(
        config["source"], n=n, default_k=int(np.floor(np.sqrt(n)))
    )
    target = models.model_from_config(
        config["target"], n=n, default_k=int(np.floor(np.sqrt(n_observed)))
    )
    return source, target


def _parse_estimator(token):
    name, _, arg = token.partition(":")
    name = name.strip()
    arg = arg.strip()
    if name == "rowwise":
        return token.strip(), estimators.RowwiseTransfer(bandwidth=arg if arg else "auto")
    if name == "block":
        return token.strip(), estimators.BlockModelTransfer(map_mode=arg if arg else "exact")
    if name == "oracle":
        return token.strip(), estimators.FlipOracle(p_flip=float(arg) if arg else 0.1)
    raise ValueError(f"unknown estimator {token!r}")


def _cmd_generate(args):
    config = _read_config(args.config)
    n, n_observed, _ = _experiment_settings(config, args)
    source, target = _specs_from_config(config, n, n_observed)

    base = np.random.SeedSequence(args.seed)
    seeds = [int(s.generate_state(1)[0]) for s in base.spawn(4)]
    if models.latent_space(source) is not None:
        latents = models.sample_latents(source, n, seeds[0])
    else:
        latents = None
    p = models.build_prob_matrix(source, latents)
    q = models.build_prob_matrix(target, latents)
    a_p = models.sample_adjacency(p, seeds[1])
    split = models.sample_target_split(n, n_observed, seeds[2])
    a_q = models.sample_adjacency(models.restrict(q, split), seeds[3])

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrixio.save_matrix(out / "source_prob.csv", p)
    matrixio.save_matrix(out / "target_prob.csv", q)
    matrixio.save_matrix(out / "source_adj.csv", a_p)
    matrixio.save_matrix(out / "target_adj.csv", a_q)
    matrixio.save_indices(out / "subset.csv", split.indices)
    print(f"wrote instance (n={n}, observed={n_observed}) to {out}")
    return 0


def _cmd_estimate(args):
    a_p = check_adjacency(matrixio.load_matrix(args.source_adj), "source adjacency")
    a_q = check_adjacency(matrixio.load_matrix(args.target_adj), "target adjacency")
    subset = matrixio.load_indices(args.subset)
    split = models.ObservationSplit(n=a_p.shape[0], indices=subset)

    if args.method == "rowwise":
        bandwidth = "auto" if args.h == "auto" else float(args.h)
        qhat, _ = estimators.estimate_rowwise(
            a_p, a_q, split, bandwidth=bandwidth, fill_diagonal=not args.no_diagonal
        )
    elif args.method == "block":
        qhat, _ = estimators.estimate_sbm(
            a_p,
            a_q,
            split,
            k_source=args.k_source,
            k_target=args.k_target,
            map_mode=args.map_mode,
            seed=args.seed,
        )
    else:
        if not args.truth:
            raise ValueError("--method oracle needs --truth")
        truth = check_prob_matrix(matrixio.load_matrix(args.truth), "truth")
        qhat, _ = estimators.oracle_estimate(
            truth,
            split,
            p_flip=args.p_flip,
            threshold_factor=args.threshold_factor,
            seed=args.seed,
        )
    matrixio.save_matrix(args.out, qhat)
    print(f"wrote {args.out}")
    return 0


def _cmd_experiment(args):
    config = _read_config(args.config)
    n, n_observed, section = _experiment_settings(config, args)
    source, target = _specs_from_config(config, n, n_observed)

    trials = args.trials if args.trials else int(section.get("trials", 50))
    seed = args.seed if args.seed is not None else int(section.get("seed", 0))
    tokens = [t.strip() for t in section.get("estimators", "rowwise").split(",") if t.strip()]
    ests = dict(_parse_estimator(t) for t in tokens)

    results = evaluation.run_experiment(
        source,
        target,
        n,
        n_observed,
        ests,
        trials=trials,
        base_seed=seed,
        n_jobs=args.jobs,
    )
    evaluation.write_results_csv(results, f"{args.out_prefix}.csv")
    evaluation.write_results_json(results, f"{args.out_prefix}.json")
    for name, stats in results.items():
        print(f"{name}: mean={stats.mean:.6g} two_sigma={stats.two_sigma:.6g}")
    print(f"wrote {args.out_prefix}.csv and {args.out_prefix}.json")
    return 0


def _write_labeled(out_dir, stem, graph):
    matrixio.save_matrix(out_dir / f"{stem}_adj.csv", graph.adjacency)
    (out_dir / f"{stem}_labels.txt").write_text(
        "".join(f"{lab}\n" for lab in graph.labels)
    )


def _cmd_ingest(args):
    if bool(args.edge_list) == bool(args.temporal):
        raise ValueError("give either --edge-list (one or more) or --temporal")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if args.temporal:
        log = ingest.load_temporal_log(args.temporal)
        graphs = ingest.bin_temporal(log, bins=args.bins)
        for i, g in enumerate(graphs):
            _write_labeled(out, f"bin_{i:02d}", g)
        print(f"wrote {len(graphs)} window graphs over {graphs[0].n} nodes to {out}")
        return 0

    graphs = [ingest.load_edge_list(p) for p in args.edge_list]
    if args.intersect:
        graphs = ingest.intersect_nodes(graphs)
    for path, g in zip(args.edge_list, graphs):
        _write_labeled(out, Path(path).stem, g)
    print(f"wrote {len(graphs)} graphs to {out}")
    return 0


def _cmd_check_rankings(args):
    source = matrixio.load_matrix(args.source)
    target = matrixio.load_matrix(args.target)
    grid = DEFAULT_GRID
    if args.grid:
        grid = tuple(float(v) for v in args.grid.split(","))
    report = rankings_constant(
        graph_distance_matrix(source), graph_distance_matrix(target), args.h, grid=grid
    )
    payload = json.dumps(
        {
            "h": report.bandwidth,
            "c_hat": report.c_hat,
            "witness": list(report.witness) if report.witness else None,
            "grid": list(report.grid),
            "required_quantile": report.required_quantile,
        },
        indent=2,
    )
    if args.out:
        Path(args.out).write_text(payload + "\n")
        print(f"wrote {args.out}")
    else:
        print(payload)
    return 0


def _cmd_heatmap(args):
    truth = check_prob_matrix(matrixio.load_matrix(args.truth), "truth")
    estimate = check_prob_matrix(matrixio.load_matrix(args.estimate), "estimate")
    if truth.shape != estimate.shape:
        raise ValueError("truth and estimate must have equal shapes")
    matrixio.save_matrix(f"{args.out_prefix}_truth.csv", truth)
    matrixio.save_matrix(f"{args.out_prefix}_estimate.csv", estimate)
    print(f"wrote {args.out_prefix}_truth.csv and {args.out_prefix}_estimate.csv")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "estimate": _cmd_estimate,
    "experiment": _cmd_experiment,
    "ingest": _cmd_ingest,
    "check-rankings": _cmd_check_rankings,
    "heatmap": _cmd_heatmap,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError, configparser.Error) as exc:
        print(f"nettransfer: {exc}", file=sys.stderr)
        return 2


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
