"""Command-line interface.

Subcommands:

* ``simulate``   -- run a Monte Carlo sweep and emit CSV or JSON rows
* ``budget``     -- evaluate a closed-form budget threshold
* ``rstar``      -- evaluate a closed-form repetition count
* ``centrality`` -- print the top-k likelihood table of a snapshot file
* ``oracle``     -- exact reference computations (distance law, ordering counts)
"""

from __future__ import annotations

import argparse
import json
import sys

from . import budget as _budget
from .centrality import brute_force_rumor_centrality, log_rumor_centralities
from .diffusion import Snapshot, distance_distribution
from .errors import RQSimError
from .estimators import choose_r_star
from .harness import ExperimentConfig, rows_to_csv, rows_to_json, run_experiment


def _csv_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _add_simulate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("simulate", help="run a Monte Carlo detection sweep")
    p.add_argument("--config", help="JSON file of flat key/value options (flags override)")
    p.add_argument("--graph", help="graph spec, e.g. regular:3, gw:10, er:2000:4, sf:2000:1.5, edgelist:PATH")
    p.add_argument("--n", type=int, help="number of infected nodes (default 400)")
    p.add_argument("--scheme", choices=("na", "ad"), help="querying scheme")
    p.add_argument("--k", type=_csv_ints, help="budget value or comma list; 0 = no-query baseline")
    p.add_argument("--r", type=int, help="fixed repetition count (overrides --rstar)")
    p.add_argument("--rstar", choices=("necessary", "sufficient"),
                   help="derive r from the closed form (default: sufficient)")
    p.add_argument("--p", type=_csv_floats, help="identity truth probability, value or comma list")
    p.add_argument("--q", type=_csv_floats, help="direction truth probability, value or comma list")
    p.add_argument("--trials", type=int, help="trials per combination (default 200)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--candidate-order", choices=("hop", "centrality"),
                   help="batch candidate ordering (default hop)")
    p.add_argument("--fixed-graph", action="store_true",
                   help="pin one random graph instance instead of regenerating per trial")
    p.add_argument("--threads", type=int, help="worker processes (default: all cores; env RQS_THREADS)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="output path (default: stdout)")
    p.add_argument("--zero-timing", action="store_true",
                   help="blank the wall_time_ms column for byte-reproducible output")


def _cmd_simulate(args: argparse.Namespace) -> int:
    opts: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            opts.update(json.load(fh))

    def pick(flag, key, default=None):
        return flag if flag is not None else opts.get(key, default)

    graph = pick(args.graph, "graph")
    scheme = pick(args.scheme, "scheme")
    budgets = pick(args.k, "k")
    p_values = pick(args.p, "p")
    q_values = pick(args.q, "q")
    if graph is None or scheme is None or budgets is None or p_values is None or q_values is None:
        print("simulate: --graph, --scheme, --k, --p and --q are required", file=sys.stderr)
        return 2
    if isinstance(budgets, (int, float)):
        budgets = (int(budgets),)
    if isinstance(p_values, (int, float)):
        p_values = (float(p_values),)
    if isinstance(q_values, (int, float)):
        q_values = (float(q_values),)
    if isinstance(budgets, str):
        budgets = _csv_ints(budgets)
    if isinstance(p_values, str):
        p_values = _csv_floats(p_values)
    if isinstance(q_values, str):
        q_values = _csv_floats(q_values)

    if args.r is not None:
        r_mode = f"fixed:{args.r}"
    elif args.rstar is not None:
        r_mode = f"rstar:{args.rstar}"
    else:
        r_mode = str(opts.get("r_mode", "rstar:sufficient"))

    config = ExperimentConfig(
        graph=str(graph),
        scheme=str(scheme),
        budgets=tuple(int(k) for k in budgets),
        p_values=tuple(float(x) for x in p_values),
        q_values=tuple(float(x) for x in q_values),
        n_infected=int(pick(args.n, "n", 400)),
        r_mode=r_mode,
        trials=int(pick(args.trials, "trials", 200)),
        master_seed=int(pick(args.seed, "seed", 0)),
        fixed_graph=bool(args.fixed_graph or opts.get("fixed_graph", False)),
        candidate_order=str(pick(args.candidate_order, "candidate_order", "hop")),
        threads=pick(args.threads, "threads"),
    )
    rows = run_experiment(config)
    fmt = args.format or opts.get("format", "csv")
    text = rows_to_json(rows, args.zero_timing) if fmt == "json" else rows_to_csv(rows, args.zero_timing)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_budget(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("budget", help="closed-form budget threshold")
    p.add_argument("--scheme", choices=("na", "ad"), required=True)
    p.add_argument("--kind", choices=("necessary", "sufficient"), required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--ht", type=float, help="entropy of the infection-time vector")
    p.add_argument("--c", type=float, default=1.0, help="leading constant (necessary bounds)")
    p.add_argument("--u1", type=float, default=1.0)
    p.add_argument("--u2", type=float, default=1.0)
    p.add_argument("--r", type=int, help="repetition count for the default H(T) bound")


def _cmd_budget(args: argparse.Namespace) -> int:
    inputs = _budget.BudgetInputs(
        delta=args.delta, d=args.d, p=args.p, q=args.q,
        h_t=args.ht, c_const=args.c, u1=args.u1, u2=args.u2,
    )
    fns = {
        ("na", "necessary"): lambda: _budget.na_necessary(inputs, args.r),
        ("na", "sufficient"): lambda: _budget.na_sufficient(inputs),
        ("ad", "necessary"): lambda: _budget.ad_necessary(inputs, args.r),
        ("ad", "sufficient"): lambda: _budget.ad_sufficient(inputs),
    }
    value = fns[(args.scheme, args.kind)]()
    print("scheme,kind,delta,d,p,q,K")
    print(f"{args.scheme},{args.kind},{args.delta:g},{args.d},{args.p:g},{args.q:g},{value:.6g}")
    return 0


def _add_rstar(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("rstar", help="closed-form repetition count")
    p.add_argument("--scheme", choices=("na", "ad"), required=True)
    p.add_argument("--kind", choices=("necessary", "sufficient"), required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--k", type=int, required=True)


def _cmd_rstar(args: argparse.Namespace) -> int:
    print(choose_r_star(args.scheme, args.kind, args.k, args.d, args.p, args.q))
    return 0


def _add_centrality(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("centrality", help="top-k likelihood table for a snapshot JSON file")
    p.add_argument("--snapshot", required=True, help="snapshot JSON path (see Snapshot.to_json)")
    p.add_argument("--top", type=int, default=10)


def _cmd_centrality(args: argparse.Namespace) -> int:
    with open(args.snapshot, "r", encoding="utf-8") as fh:
        snap = Snapshot.from_json(fh)
    table = log_rumor_centralities(snap.tree_adjacency)
    ranked = sorted(table.log_r.items(), key=lambda kv: (-kv[1], kv[0]))
    print("rank,node,log_score,is_center")
    for rank, (node, score) in enumerate(ranked[: args.top], start=1):
        print(f"{rank},{node},{score:.6f},{int(node == table.center)}")
    return 0


def _add_oracle(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("oracle", help="exact reference computations")
    kinds = p.add_subparsers(dest="oracle_kind", required=True)

    dist = kinds.add_parser("distance", help="law of the k-th infection's hop distance")
    dist.add_argument("--d", type=int, required=True)
    dist.add_argument("--k", type=int, required=True)

    brute = kinds.add_parser("orderings", help="brute-force infection-ordering counts")
    brute.add_argument("--snapshot", required=True, help="snapshot JSON path (at most 10 nodes)")


def _cmd_oracle(args: argparse.Namespace) -> int:
    if args.oracle_kind == "distance":
        print("l,probability")
        total = 0.0
        for l in range(1, args.k):
            prob = distance_distribution(args.d, args.k, l)
            total += prob
            print(f"{l},{prob:.10f}")
        print(f"sum,{total:.10f}")
        return 0
    with open(args.snapshot, "r", encoding="utf-8") as fh:
        snap = Snapshot.from_json(fh)
    print("root,orderings")
    for root in snap.infected:
        print(f"{root},{brute_force_rumor_centrality(snap.tree_adjacency, root)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rqsim",
        description="Diffusion source finding by budgeted querying of noisy respondents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_budget(sub)
    _add_rstar(sub)
    _add_centrality(sub)
    _add_oracle(sub)

    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "budget": _cmd_budget,
        "rstar": _cmd_rstar,
        "centrality": _cmd_centrality,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except RQSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
