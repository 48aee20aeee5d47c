"""Command-line entry point: ``fpplab <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from fpplab import harness
from fpplab.branching import simulate_branching
from fpplab.broadcast import async_push, broadcast_constants, coupled_async, sync_push
from fpplab.degrees import distribution_from_arg, sample_degree_sequence, theoretical_constants
from fpplab.errors import (ConfigError, DegenerateDistributionError, DisconnectedGraphError,
                           FPPLabError, OutOfScopeError, ParityError, RegularityError, RejectionError)
from fpplab.exploration import explore
from fpplab.fpp import (WeightedGraph, assign_weights, hop_diameter, shortest_weighted_distances,
                        weighted_diameter)
from fpplab.graph import (format_edge_list, pair_half_edges, read_edge_list, sample_simple,
                          write_edge_list)

EXIT_CONFIG = 2
EXIT_SIMULATION = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _graph(args, rng):
    p = distribution_from_arg(args.dist)
    seq = sample_degree_sequence(p, args.n, rng)
    if args.multigraph:
        return p, pair_half_edges(seq, rng)
    g, _ = sample_simple(seq, rng, args.max_attempts)
    return p, g


def cmd_gen(args) -> None:
    rng = np.random.default_rng(args.seed)
    _, g = _graph(args, rng)
    weights = assign_weights(g, 1.0, rng).weights if args.weights else None
    if args.out:
        write_edge_list(args.out, g, weights)
    else:
        sys.stdout.write(format_edge_list(g, weights))


def cmd_fpp(args) -> None:
    rng = np.random.default_rng(args.seed)
    if args.graph:
        g, weights = read_edge_list(args.graph)
        wg = WeightedGraph(g, weights) if weights is not None else assign_weights(g, 1.0, rng)
    else:
        _, g = _graph(args, rng)
        wg = assign_weights(g, 1.0, rng)
    source = int(rng.integers(g.n)) if args.source is None else args.source
    prof = shortest_weighted_distances(wg, source)
    if args.out:
        Path(args.out).write_text(prof.to_csv())
    if not prof.reachable.all():
        raise DisconnectedGraphError(int(np.flatnonzero(~prof.reachable)[0]), source)
    print(f"source,{source}")
    print(f"flood_time,{float(prof.dist.max())!r}")
    if args.diameter:
        print(f"weighted_diameter,{weighted_diameter(wg, threads=args.threads)!r}")
        print(f"hop_diameter,{hop_diameter(g, threads=args.threads)}")


def cmd_broadcast(args) -> None:
    rng = np.random.default_rng(args.seed)
    p, g = _graph(args, rng)
    if not g.is_regular():
        raise ConfigError("broadcast needs a regular degree distribution")
    r = int(g.degrees[0])
    run = {"async": async_push, "sync": sync_push, "coupled": coupled_async}[args.mode]
    rows = [["n", "r", "seed", "metric", "value"]]
    trace = None
    for rep in range(args.reps):
        seed = harness.replicate_seed(args.seed, args.n, rep)
        source = int(np.random.default_rng(seed).integers(g.n))
        trace = run(g, source, seed, record=bool(args.log) and rep == 0)
        if rep == 0 and args.log:
            Path(args.log).write_text(trace.log_csv())
        rows.append([args.n, r, seed, f"{args.mode}_completion", repr(trace.completion)])
    if r >= 3:
        c = broadcast_constants(r)
        rows.append([args.n, r, args.seed, "async_prefactor", repr(c.async_prefactor)])
        rows.append([args.n, r, args.seed, "sync_prefactor", repr(c.sync_prefactor)])
        rows.append([args.n, r, args.seed, "sync_lower", repr(c.sync_lower)])
    buf = "\n".join(",".join(str(x) for x in row) for row in rows) + "\n"
    _emit(buf, args.out)


def cmd_branching(args) -> None:
    p = distribution_from_arg(args.dist)
    tr = simulate_branching(p, target_pop=args.target, seed=args.seed)
    if args.out:
        if tr.T is None:
            raise ConfigError("per-step CSV only available below 10^5 splits")
        Path(args.out).write_text(tr.to_csv())
    print(f"splits,{tr.splits}")
    print(f"T_last,{tr.T_last!r}")
    print(f"population,{tr.Sigma_last}")


def cmd_explore(args) -> None:
    rng = np.random.default_rng(args.seed)
    p = distribution_from_arg(args.dist)
    seq = sample_degree_sequence(p, args.n, rng)
    source = int(rng.integers(args.n)) if args.source is None else args.source
    tr = explore(seq, source, args.steps, rng)
    _emit(tr.to_csv(), args.out)


def cmd_sweep(args) -> None:
    cfg = harness.load_config(args.config)
    records = harness.run_sweep(cfg, threads=args.threads)
    _emit(harness.format_records(records), args.out)
    if args.plot:
        ref = None
        if len(cfg.experiments) == 1:
            ref = _reference(cfg.experiments[0], cfg.dist)
        Path(args.plot).write_text(harness.plot_svg(records, ref, title=",".join(cfg.experiments)))


def _reference(experiment, p):
    try:
        c = theoretical_constants(p)
    except OutOfScopeError:
        return None
    if experiment in ("abt", "sync"):
        if len(p.pmf) != 1:
            return None
        b = broadcast_constants(p.support_min)
        return b.async_prefactor if experiment == "abt" else b.sync_prefactor
    return {"flood": c.flood, "diam": c.diam, "hop_diam": c.unweighted,
            "branching": c.typical}[experiment]


def cmd_fit(args) -> None:
    records = harness.read_records(args.csv)
    exps = sorted({r.experiment for r in records})
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["experiment", "method", "slope", "intercept", "stderr"])
    for exp in exps:
        sub = [r for r in records if r.experiment == exp]
        for method in args.method:
            fit = harness.fit_prefactor(sub, method, args.metric)
            w.writerow([exp, fit.method, repr(fit.slope), repr(fit.intercept), repr(fit.stderr)])


def _graph_args(p):
    p.add_argument("--dist", default="regular 3", help="'regular r', 'r:p,...' or a file")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--multigraph", action="store_true", help="keep self-loops and multi-edges")
    p.add_argument("--max-attempts", type=int, default=1000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpplab", description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    ap.add_argument("--threads", type=int, default=None, help="overridden by FPPLAB_THREADS")
    # the shared flags are accepted before or after the command name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="sample a graph and write its edge list")
    _graph_args(p)
    p.add_argument("--weights", action="store_true", help="attach Exp(1) weights")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("fpp", parents=[common], help="weighted distances from one source")
    _graph_args(p)
    p.add_argument("--graph", help="edge-list file instead of sampling")
    p.add_argument("--source", type=int)
    p.add_argument("--diameter", action="store_true")
    p.set_defaults(func=cmd_fpp)

    p = sub.add_parser("broadcast", parents=[common], help="push broadcast on a regular graph")
    _graph_args(p)
    p.add_argument("--mode", choices=("async", "sync", "coupled"), default="async")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--log", help="transmission CSV of the first run")
    p.set_defaults(func=cmd_broadcast)

    p = sub.add_parser("branching", parents=[common], help="split times of the branching approximation")
    p.add_argument("--dist", default="regular 3")
    p.add_argument("--target", type=int, default=10**6)
    p.set_defaults(func=cmd_branching)

    p = sub.add_parser("explore", parents=[common], help="lazy exploration trace from one vertex")
    p.add_argument("--dist", default="regular 3")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--source", type=int)
    p.add_argument("--steps", type=int, default=100)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("sweep", parents=[common], help="run a key=value sweep config")
    p.add_argument("config")
    p.add_argument("--plot", help="write an SVG of mean/log n")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", parents=[common], help="prefactor fits from a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--method", action="append", choices=("pairwise-difference", "least-squares"))
    p.add_argument("--metric")
    p.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "method", "x") is None:
        args.method = ["pairwise-difference", "least-squares"]
    try:
        args.func(args)
    except (ConfigError, DegenerateDistributionError, OutOfScopeError, ParityError,
            RegularityError, OSError) as exc:
        print(f"fpplab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RejectionError, DisconnectedGraphError, FPPLabError) as exc:
        print(f"fpplab: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except ValueError as exc:
        print(f"fpplab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
