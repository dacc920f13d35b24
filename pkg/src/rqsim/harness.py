"""Seeded Monte Carlo experiment runner with parameter sweeps.

Every trial's random stream is derived from (master seed, row index,
trial index) via ``numpy.random.SeedSequence`` spawn keys, so results are
independent of execution order and degree of parallelism: rerunning any
single trial with its derived seed reproduces it exactly, and sweeps with
the same master seed share identical snapshots row-for-row (useful for
paired scheme comparisons).

Random graph families are regenerated every trial from the trial stream;
``fixed_graph`` pins one instance derived from the master seed instead.
Edge-list graphs are always loaded once.
"""

from __future__ import annotations

import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from . import graphs as _graphs
from .centrality import likelihood_table, pick_best
from .diffusion import simulate_si
from .errors import InvalidParameterError, RQSimError
from .estimators import ADConfig, NAConfig, choose_r_star, run_mvad, run_mvna
from .respondent import TruthModel

logger = logging.getLogger(__name__)

#: Spawn key reserved for deriving a pinned graph instance (length-1 keys
#: never collide with the length-2 (row, trial) keys).
_GRAPH_SPAWN_KEY = (0x67726166,)

#: Default tree size multiple for branching-process graphs, relative to
#: the infection target, so the diffusion rarely hits the truncated rim.
_GW_SIZE_FACTOR = 4

CSV_COLUMNS = (
    "scheme,graph,d,n,K,r,p,q,trials,detections,p_hat,ci_lo,ci_hi,mean_budget,wall_time_ms"
)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise InvalidParameterError(f"successes must be in [0, {trials}], got {successes}")
    phat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class GraphSpec:
    """Parsed graph family descriptor (see :func:`parse_graph_spec`)."""

    family: str  # regular | gw | er | sf | edgelist
    d: int = 0
    d_max: int = 0
    n_nodes: int = 0
    avg_degree: float = 0.0
    edge_node_ratio: float = 0.0
    min_nodes: int = 0
    path: str = ""
    label: str = ""


def parse_graph_spec(text: str) -> GraphSpec:
    """Parse ``regular:3``, ``gw:10[:min_nodes]``, ``er:n:avg_deg``,
    ``sf:n:ratio``, or ``edgelist:path``."""
    parts = text.split(":")
    family = parts[0]
    try:
        if family == "regular" and len(parts) == 2:
            d = int(parts[1])
            if d < 3:
                raise InvalidParameterError(f"regular tree degree must be >= 3, got {d}")
            return GraphSpec(family="regular", d=d, label=text)
        if family == "gw" and len(parts) in (2, 3):
            d_max = int(parts[1])
            min_nodes = int(parts[2]) if len(parts) == 3 else 0
            if d_max < 2 or min_nodes < 0:
                raise InvalidParameterError(f"bad branching-tree parameters in {text!r}")
            return GraphSpec(family="gw", d_max=d_max, min_nodes=min_nodes, label=text)
        if family == "er" and len(parts) == 3:
            n, avg = int(parts[1]), float(parts[2])
            if n < 2 or avg <= 0:
                raise InvalidParameterError(f"bad ER parameters in {text!r}")
            return GraphSpec(family="er", n_nodes=n, avg_degree=avg, label=text)
        if family == "sf" and len(parts) == 3:
            n, ratio = int(parts[1]), float(parts[2])
            if n < 3 or ratio <= 0:
                raise InvalidParameterError(f"bad scale-free parameters in {text!r}")
            return GraphSpec(family="sf", n_nodes=n, edge_node_ratio=ratio, label=text)
        if family == "edgelist" and len(parts) >= 2:
            return GraphSpec(family="edgelist", path=text.split(":", 1)[1], label=text)
    except ValueError as exc:
        raise InvalidParameterError(f"cannot parse graph spec {text!r}: {exc}") from None
    raise InvalidParameterError(f"cannot parse graph spec {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: trials per (budget, p, q) combination on one graph family."""

    graph: str
    scheme: str  # "na" | "ad"
    budgets: tuple[int, ...]
    p_values: tuple[float, ...]
    q_values: tuple[float, ...]
    n_infected: int = 400
    r_mode: str = "rstar:sufficient"  # or "fixed:<r>"
    trials: int = 200
    master_seed: int = 0
    fixed_graph: bool = False
    candidate_order: str = "hop"
    threads: int | None = None

    def __post_init__(self):
        if self.scheme not in ("na", "ad"):
            raise InvalidParameterError(f"scheme must be 'na' or 'ad', got {self.scheme!r}")
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be >= 1, got {self.trials}")
        if self.n_infected < 1:
            raise InvalidParameterError(f"n_infected must be >= 1, got {self.n_infected}")
        if not self.budgets:
            raise InvalidParameterError("at least one budget value is required")
        if any(k < 0 for k in self.budgets):
            raise InvalidParameterError("budgets must be nonnegative (0 = no-query baseline)")
        parse_graph_spec(self.graph)
        _parse_r_mode(self.r_mode)


def _parse_r_mode(text: str) -> tuple[str, str | int]:
    parts = text.split(":")
    if len(parts) == 2 and parts[0] == "rstar" and parts[1] in ("necessary", "sufficient"):
        return "rstar", parts[1]
    if len(parts) == 2 and parts[0] == "fixed":
        try:
            r = int(parts[1])
        except ValueError:
            raise InvalidParameterError(f"bad r mode {text!r}") from None
        if r < 1:
            raise InvalidParameterError(f"fixed r must be >= 1, got {r}")
        return "fixed", r
    raise InvalidParameterError(f"bad r mode {text!r} (use 'fixed:<r>' or 'rstar:<kind>')")


@dataclass
class ResultRow:
    """Aggregated outcome for one parameter combination."""

    scheme: str
    graph: str
    d: int
    n: int
    K: int
    r: int
    p: float
    q: float
    trials: int
    detections: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    mean_budget: float
    wall_time_ms: float
    error: str | None = None


@dataclass(frozen=True)
class _RowParams:
    """Everything a worker needs to run one trial of one row."""

    graph: str
    n_infected: int
    scheme: str
    K: int
    r: int
    p: float
    q: float
    candidate_order: str
    master_seed: int
    row_index: int
    fixed_graph: bool


def effective_degree(spec: GraphSpec, graph=None) -> int:
    """Degree fed to the closed-form r*/budget formulas.

    Exact for regular trees; for other families a representative value:
    the branching cap, or the (rounded) average degree, floored at 3.
    """
    if spec.family == "regular":
        return spec.d
    if spec.family == "gw":
        return max(3, spec.d_max)
    if spec.family == "er":
        return max(3, round(spec.avg_degree))
    if spec.family == "sf":
        return max(3, round(2 * spec.edge_node_ratio))
    if graph is not None:
        return max(3, round(graph.avg_degree()))
    return 3


_graph_cache: dict[tuple, object] = {}


def _build_graph(spec: GraphSpec, n_infected: int, rng: np.random.Generator):
    if spec.family == "regular":
        return _graphs.make_regular_tree(spec.d)
    if spec.family == "gw":
        min_nodes = spec.min_nodes or _GW_SIZE_FACTOR * n_infected
        return _graphs.make_galton_watson(spec.d_max, min_nodes, rng)
    if spec.family == "er":
        return _graphs.make_erdos_renyi(spec.n_nodes, spec.avg_degree, rng)
    if spec.family == "sf":
        return _graphs.make_scale_free(spec.n_nodes, spec.edge_node_ratio, rng)
    return _graphs.load_edge_list(spec.path)


def _graph_for_trial(rp: _RowParams, rng: np.random.Generator):
    spec = parse_graph_spec(rp.graph)
    if spec.family == "regular":
        return _build_graph(spec, rp.n_infected, rng), spec
    if spec.family == "edgelist" or rp.fixed_graph:
        key = (rp.graph, rp.master_seed, rp.n_infected)
        cached = _graph_cache.get(key)
        if cached is None:
            pin_rng = np.random.default_rng(
                np.random.SeedSequence(entropy=rp.master_seed, spawn_key=_GRAPH_SPAWN_KEY)
            )
            cached = _build_graph(spec, rp.n_infected, pin_rng)
            _graph_cache[key] = cached
        return cached, spec
    return _build_graph(spec, rp.n_infected, rng), spec


def _run_single_trial(rp: _RowParams, trial_index: int) -> tuple[int, int]:
    """Returns (detected, budget_used) for one trial."""
    seq = np.random.SeedSequence(entropy=rp.master_seed, spawn_key=(rp.row_index, trial_index))
    rng = np.random.default_rng(seq)
    graph, _ = _graph_for_trial(rp, rng)

    if graph.is_finite:
        if graph.n < rp.n_infected:
            raise RQSimError(
                f"graph has {graph.n} nodes, cannot infect {rp.n_infected}"
            )
        source = int(rng.integers(graph.n))
    else:
        # Uniform choice is equivalent to the root on a vertex-transitive tree.
        source = 0
    snapshot = simulate_si(graph, source, rp.n_infected, rng)

    if rp.K == 0:
        table = likelihood_table(snapshot)
        estimate = pick_best(table, table)
        return int(estimate == source), 0

    model = TruthModel(p=rp.p, q=rp.q)
    if rp.scheme == "na":
        outcome = run_mvna(
            snapshot,
            NAConfig(budget=rp.K, repetitions=rp.r, candidate_order=rp.candidate_order),
            model,
            rng,
        )
    else:
        outcome = run_mvad(snapshot, ADConfig(budget=rp.K, repetitions=rp.r), model, rng)
    return int(outcome.estimate == source), outcome.budget_used


def _trial_star(args: tuple[_RowParams, int]) -> tuple[int, int]:
    return _run_single_trial(*args)


def _resolve_workers(config: ExperimentConfig) -> int:
    if config.threads is not None:
        return max(1, config.threads)
    env = os.environ.get("RQS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("ignoring non-integer RQS_THREADS=%r", env)
    return os.cpu_count() or 1


def _resolve_r(config: ExperimentConfig, K: int, d: int, p: float, q: float) -> int:
    mode, arg = _parse_r_mode(config.r_mode)
    if mode == "fixed":
        return min(int(arg), K) if K else int(arg)
    if K < 3:
        return 1
    return choose_r_star(config.scheme, str(arg), K, d, p, q)


def run_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """Run the full sweep; rows follow (budget, p, q) nesting order.

    A combination that fails (for example an infection target larger than
    the graph) produces a row carrying an error marker instead of
    aborting the sweep.
    """
    spec = parse_graph_spec(config.graph)
    d_eff = effective_degree(spec)
    workers = _resolve_workers(config)
    combos = list(product(config.budgets, config.p_values, config.q_values))

    rows: list[ResultRow] = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for row_index, (K, p, q) in enumerate(combos):
            t0 = time.perf_counter()
            base = ResultRow(
                scheme=config.scheme,
                graph=config.graph,
                d=d_eff,
                n=config.n_infected,
                K=K,
                r=0,
                p=p,
                q=q,
                trials=config.trials,
                detections=0,
                p_hat=math.nan,
                ci_lo=math.nan,
                ci_hi=math.nan,
                mean_budget=math.nan,
                wall_time_ms=0.0,
            )
            try:
                r = 0 if K == 0 else _resolve_r(config, K, d_eff, p, q)
                rp = _RowParams(
                    graph=config.graph,
                    n_infected=config.n_infected,
                    scheme=config.scheme,
                    K=K,
                    r=r,
                    p=p,
                    q=q,
                    candidate_order=config.candidate_order,
                    master_seed=config.master_seed,
                    row_index=row_index,
                    fixed_graph=config.fixed_graph,
                )
                tasks = [(rp, t) for t in range(config.trials)]
                if pool is None:
                    results = [_trial_star(task) for task in tasks]
                else:
                    chunk = max(1, config.trials // (4 * workers))
                    results = list(pool.map(_trial_star, tasks, chunksize=chunk))
                detections = sum(det for det, _ in results)
                mean_budget = sum(used for _, used in results) / config.trials
                lo, hi = wilson_interval(detections, config.trials)
                base = replace(
                    base,
                    r=r,
                    detections=detections,
                    p_hat=detections / config.trials,
                    ci_lo=lo,
                    ci_hi=hi,
                    mean_budget=mean_budget,
                )
            except RQSimError as exc:
                logger.error("row %d (K=%s, p=%s, q=%s) failed: %s", row_index, K, p, q, exc)
                base = replace(base, error=str(exc))
            base = replace(base, wall_time_ms=(time.perf_counter() - t0) * 1000.0)
            rows.append(base)
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def _fmt(x: float, places: int = 6) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.{places}f}".rstrip("0").rstrip(".") if isinstance(x, float) else str(x)


def rows_to_csv(rows: list[ResultRow], zero_timing: bool = False) -> str:
    """Render rows with the fixed column set; row errors go to the log only.

    ``zero_timing`` blanks the wall-clock column so byte-identical output
    can be compared across reruns.
    """
    out = io.StringIO()
    out.write(CSV_COLUMNS + "\n")
    for row in rows:
        wall = 0 if zero_timing else int(round(row.wall_time_ms))
        fields = [
            row.scheme,
            row.graph,
            str(row.d),
            str(row.n),
            str(row.K),
            str(row.r),
            _fmt(row.p),
            _fmt(row.q),
            str(row.trials),
            str(row.detections),
            _fmt(row.p_hat),
            _fmt(row.ci_lo),
            _fmt(row.ci_hi),
            _fmt(row.mean_budget),
            str(wall),
        ]
        out.write(",".join(fields) + "\n")
    return out.getvalue()


def rows_to_json(rows: list[ResultRow], zero_timing: bool = False) -> str:
    """JSON array mirroring the CSV fields, plus an ``error`` field."""
    docs = []
    for row in rows:
        doc = {
            "scheme": row.scheme,
            "graph": row.graph,
            "d": row.d,
            "n": row.n,
            "K": row.K,
            "r": row.r,
            "p": row.p,
            "q": row.q,
            "trials": row.trials,
            "detections": row.detections,
            "p_hat": None if math.isnan(row.p_hat) else row.p_hat,
            "ci_lo": None if math.isnan(row.ci_lo) else row.ci_lo,
            "ci_hi": None if math.isnan(row.ci_hi) else row.ci_hi,
            "mean_budget": None if math.isnan(row.mean_budget) else row.mean_budget,
            "wall_time_ms": 0 if zero_timing else int(round(row.wall_time_ms)),
            "error": row.error,
        }
        docs.append(doc)
    return json.dumps(docs, indent=2)
