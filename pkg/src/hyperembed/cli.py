"""Command-line entry point: ``hyperembed <subcommand> ...``.

Exit codes: 0 success, 2 parse/config error, 3 disconnected hypergraph,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .dataio import read_dataset, read_labels, write_edge_list, write_labels, write_report
from .errors import AssumptionViolation, ConfigError, HyperembedError, InsufficientSpectrumError
from .evalkit import ari, kmeans, unit_circle
from .hypercore import CardinalityWeights, restrict, trim_by_degree, unweighted_components
from .predict import DEFAULT_C3_GRID, PredictionConfig, SplitSpec, run_prediction
from .rangedep import DEFAULT_GAMMA_RANGE, compare_models, embed
from .report import Report
from .spectral import DEFAULT_EIG_FLOOR, LinearEmbedding
from .synthgen import ClusterPlan, generate_until_connected


def _grid(text: str) -> tuple[float, ...]:
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"empty grid {text!r}")
    count = int(round((hi - lo) / step))
    return tuple(round(lo + k * step, 10) for k in range(count + 1))


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError(f"need 0 < lo < hi, got {text!r}")
    return lo, hi


def _add_input(p):
    p.add_argument("--input", required=True, help="edge-list file or simplex-triple prefix")
    p.add_argument("--format", choices=("triple", "edgelist"), default=None)
    p.add_argument("--max-cardinality", type=int, default=3)
    p.add_argument("--trim", type=float, default=0.0, help="drop this fraction of top/bottom degree nodes")
    p.add_argument("--lcc", action="store_true", help="restrict to the largest connected component")


def _add_embedding(p, c3_required=False):
    p.add_argument("--c2", type=float, default=1.0)
    if c3_required:
        p.add_argument("--c3", type=float, required=True)
    else:
        p.add_argument("--c3", type=float, default=1.0 / 3.0)
    p.add_argument("--dims", type=int, default=1)
    p.add_argument("--eig-floor", type=float, default=DEFAULT_EIG_FLOOR)


def _load(args):
    ds = read_dataset(args.input, args.format, args.max_cardinality)
    h, kept = ds.hypergraph, np.arange(ds.hypergraph.n)
    if args.trim:
        h, idx = trim_by_degree(h, args.trim)
        kept = kept[idx]
    if args.lcc:
        h, idx = restrict(h, unweighted_components(h)[0])
        kept = kept[idx]
    names = [ds.names[i] for i in kept]
    return ds, h, names


def _meta(ds, h):
    return {"input_sha256": ds.content_hash, "nodes": h.n, "hyperedges": h.num_edges}


def cmd_embed(args):
    ds, h, names = _load(args)
    weights = CardinalityWeights({2: args.c2, 3: args.c3})
    emb = embed(h, weights, args.geometry, args.dims, args.eig_floor)
    if isinstance(emb, LinearEmbedding):
        cols = ["node"] + [f"x{k + 1}" for k in range(emb.dim)]
        rows = [[nm] + emb.coords[i].tolist() for i, nm in enumerate(names)]
    else:
        cols = ["node", "theta"]
        rows = [[nm, float(emb.theta[i])] for i, nm in enumerate(names)]
    meta = _meta(ds, h) | {
        "geometry": args.geometry,
        "c2": args.c2,
        "c3": args.c3,
        "eigenvalues": emb.selected_eigenvalues.tolist(),
    }
    write_report(Report("embedding", cols, rows, meta), args.out)


def cmd_compare(args):
    ds, h, _ = _load(args)
    rows, skipped, last_error = [], [], None
    for c3 in args.c3_grid:
        try:
            cmp = compare_models(
                h, {2: args.c2, 3: c3}, args.eig_floor, args.gamma_range, args.dims, args.max_cardinality
            )
        except (AssumptionViolation, InsufficientSpectrumError) as exc:
            skipped.append(c3)
            last_error = exc
            print(f"hyperembed compare: skipping c3={c3}: {exc}", file=sys.stderr)
            continue
        for geom in ("linear", "periodic"):
            rep = cmp.report(geom)
            rows.append([geom, c3, rep.gamma_star, rep.log_likelihood, rep.at_boundary])
    if not rows:
        raise last_error
    best = {}
    for geom in ("linear", "periodic"):
        top = max((r for r in rows if r[0] == geom), key=lambda r: r[3])
        best[geom] = {"c3_star": top[1], "gamma_star": top[2], "log_likelihood": top[3]}
    winner = max(best, key=lambda g: best[g]["log_likelihood"])
    meta = _meta(ds, h) | {"c2": args.c2, "best": best, "winner": winner, "skipped_c3": skipped}
    cols = ["geometry", "c3_star", "gamma_star", "log_likelihood", "at_boundary"]
    write_report(Report("model_comparison", cols, rows, meta), args.out)


def cmd_cluster(args):
    ds, h, names = _load(args)
    labels = read_labels(args.labels, names)
    emb = embed(h, {2: args.c2, 3: args.c3}, args.geometry, args.dims, args.eig_floor)
    pts = emb.coords if isinstance(emb, LinearEmbedding) else unit_circle(emb.theta)
    cl = kmeans(pts, args.k, seed=args.seed, restarts=args.restarts)
    mask = labels.labeled
    score = ari(labels.labels[mask].astype(str), cl.labels[mask])
    cols = ["geometry", "k", "seed", "c3", "ari", "inertia", "n_labeled"]
    rows = [[args.geometry, args.k, args.seed, args.c3, score, cl.inertia, int(mask.sum())]]
    write_report(Report("clustering", cols, rows, _meta(ds, h)), args.out)
    if args.assignments_out:
        write_report(
            Report("assignments", ["node", "cluster"], [[nm, int(c)] for nm, c in zip(names, cl.labels)]),
            args.assignments_out,
        )


def cmd_predict(args):
    ds, h, _ = _load(args)
    spec = SplitSpec(args.train_frac, args.split, args.seed)
    config = PredictionConfig(
        c3_grid=args.c3_grid, gamma_range=args.gamma_range, dims=args.dims, eig_floor=args.eig_floor, seed=args.seed
    )
    result = run_prediction(h, spec, config)
    report = result.report()
    report.meta = _meta(ds, h) | report.meta
    write_report(report, args.out)


def cmd_synth(args):
    plan = ClusterPlan(
        K=args.k,
        m=args.m,
        a=args.a,
        geometry=args.geometry,
        gamma0=args.gamma0,
        weights=CardinalityWeights({2: args.c2, 3: args.c3}),
        seed=args.seed,
    )
    syn = generate_until_connected(plan, args.max_attempts)
    names = [str(i) for i in range(plan.n)]
    write_edge_list(syn.hypergraph, names, args.out)
    labels_out = args.labels_out or f"{args.out}.labels"
    write_labels(syn.labels, names, labels_out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperembed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="linear or periodic spectral embedding")
    _add_input(p)
    p.add_argument("--geometry", choices=("linear", "periodic"), required=True)
    _add_embedding(p, c3_required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("compare", help="linear vs periodic maximum likelihood over a c3 grid")
    _add_input(p)
    p.add_argument("--c3-grid", type=_grid, required=True)
    p.add_argument("--gamma-range", type=_range, default=DEFAULT_GAMMA_RANGE)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--dims", type=int, default=1)
    p.add_argument("--eig-floor", type=float, default=DEFAULT_EIG_FLOOR)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("cluster", help="k-means on an embedding, scored by ARI")
    _add_input(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--geometry", choices=("linear", "periodic"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--assignments-out", default=None)
    _add_embedding(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("predict", help="triangle prediction with AUC-PR")
    _add_input(p)
    p.add_argument("--train-frac", type=float, required=True)
    p.add_argument("--split", choices=("time", "random"), default="time")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c3-grid", type=_grid, default=DEFAULT_C3_GRID)
    p.add_argument("--gamma-range", type=_range, default=DEFAULT_GAMMA_RANGE)
    p.add_argument("--dims", type=int, default=3)
    p.add_argument("--eig-floor", type=float, default=0.01)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("synth", help="sample a planted-cluster hypergraph")
    p.add_argument("--geometry", choices=("linear", "periodic"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--gamma0", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--c3", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-attempts", type=int, default=100)
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out", default=None)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except HyperembedError as exc:
        print(f"hyperembed {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"hyperembed {args.command}: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
