"""Majority-voting source estimators for batch and adaptive querying.

Both schemes spend a budget of K question pairs, r per respondent:

* batch ("na"): query the floor(K/r) infected nodes closest to the
  likelihood center up front, majority-vote the identity answers into a
  set S_I and the direction answers into per-respondent predecessor
  edges, and score candidates by how many descendants they collect in
  the predecessor graph (S_D).
* adaptive ("ad"): walk from the likelihood center, each visit asking r
  pairs and following the majority-designated neighbor; S_D holds the
  most-visited nodes.

The final estimate is the maximum-likelihood node of S_I intersect S_D,
falling back to the union (S_I alone when identity answers are perfect)
and ultimately the full candidate pool.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import budget as _budget
from .centrality import likelihood_table, pick_best
from .diffusion import Snapshot
from .errors import InvalidParameterError
from .respondent import TruthModel, answer_dir, query_rounds

logger = logging.getLogger(__name__)

CANDIDATE_ORDERS = ("hop", "centrality")


@dataclass(frozen=True)
class NAConfig:
    """Batch-querying parameters: total budget K and repetitions r per node."""

    budget: int
    repetitions: int
    candidate_order: str = "hop"

    def __post_init__(self):
        _check_budget_pair(self.budget, self.repetitions)
        if self.candidate_order not in CANDIDATE_ORDERS:
            raise InvalidParameterError(
                f"candidate_order must be one of {CANDIDATE_ORDERS}, got {self.candidate_order!r}"
            )


@dataclass(frozen=True)
class ADConfig:
    """Adaptive-querying parameters: total budget K and repetitions r per visit."""

    budget: int
    repetitions: int

    def __post_init__(self):
        _check_budget_pair(self.budget, self.repetitions)


def _check_budget_pair(budget: int, repetitions: int) -> None:
    if repetitions < 1:
        raise InvalidParameterError(f"repetitions must be >= 1, got {repetitions}")
    if repetitions > budget:
        raise InvalidParameterError(
            f"repetitions ({repetitions}) cannot exceed the budget ({budget})"
        )


@dataclass
class EstimationOutcome:
    """Estimate plus the intermediate evidence that produced it."""

    estimate: int
    s_i: frozenset[int]
    s_d: frozenset[int]
    budget_used: int
    eta: dict[int, int] | None = None
    predecessor_edges: dict[int, int] | None = None
    e_counts: dict[int, int] | None = None
    candidates: tuple[int, ...] = field(default_factory=tuple)

    def to_json_dict(self) -> dict:
        doc = {
            "estimate": self.estimate,
            "s_i": sorted(self.s_i),
            "s_d": sorted(self.s_d),
            "budget_used": self.budget_used,
        }
        if self.eta is not None:
            doc["eta"] = {str(k): v for k, v in sorted(self.eta.items())}
        if self.predecessor_edges is not None:
            doc["predecessor_edges"] = {str(k): v for k, v in sorted(self.predecessor_edges.items())}
        if self.e_counts is not None:
            doc["e_counts"] = {str(k): v for k, v in sorted(self.e_counts.items())}
        if self.candidates:
            doc["candidates"] = list(self.candidates)
        return doc


def _validation_degree(graph) -> int:
    return graph.d if not graph.is_finite else graph.max_degree()


def _majority(counts: Mapping[int, int], rng: np.random.Generator) -> int | None:
    """Key with the largest count; uniform random tie break; None if empty."""
    best = -1
    args: list[int] = []
    for w in sorted(counts):
        c = counts[w]
        if c > best:
            best, args = c, [w]
        elif c == best:
            args.append(w)
    if not args:
        return None
    if len(args) == 1:
        return args[0]
    return args[int(rng.integers(len(args)))]


def select_candidates_na(
    snapshot: Snapshot,
    size: int,
    order: str = "hop",
    scores: Mapping[int, float] | None = None,
) -> list[int]:
    """Ordered respondent list for batch querying.

    ``hop`` mode (the analyzed default) starts at the likelihood center
    and adds infected nodes level by level outward, within-level ties by
    ascending node id.  ``centrality`` mode sorts by descending score.
    Sizes above the infected count are clamped with a warning.
    """
    if order not in CANDIDATE_ORDERS:
        raise InvalidParameterError(f"unknown candidate order {order!r}")
    if size < 1:
        raise InvalidParameterError(f"size must be >= 1, got {size}")
    n = snapshot.n
    if size > n:
        logger.warning("candidate size %d clamped to infected count %d", size, n)
        size = n
    if scores is None:
        scores = likelihood_table(snapshot)

    if order == "centrality":
        return sorted(scores, key=lambda v: (-scores[v], v))[:size]

    center = pick_best(scores, scores)
    adj = snapshot.induced_adjacency
    result = [center]
    seen = {center}
    level = [center]
    while level and len(result) < size:
        frontier = sorted({w for u in level for w in adj[u] if w not in seen})
        for w in frontier:
            seen.add(w)
            result.append(w)
            if len(result) == size:
                break
        level = frontier
    return result


def run_mvna(
    snapshot: Snapshot,
    config: NAConfig,
    model: TruthModel,
    rng: np.random.Generator,
) -> EstimationOutcome:
    """Batch majority-voting estimation; uses exactly r * floor(K/r) budget.

    Every candidate gets one predecessor edge (its most-designated
    neighbor, random tie break, even when no direction answer arrived);
    descendant counts over the resulting predecessor graph are collected
    with a cycle-safe traversal.
    """
    model.validate_for_degree(_validation_degree(snapshot.graph))
    r, K = config.repetitions, config.budget
    scores = likelihood_table(snapshot)
    candidates = select_candidates_na(snapshot, min(K // r, snapshot.n), config.candidate_order, scores)
    cand_set = set(candidates)
    graph = snapshot.graph

    s_i: set[int] = set()
    pred: dict[int, int] = {}
    for v in candidates:
        rec = query_rounds(v, snapshot, r, model, rng)
        if 2 * rec.yes_count >= r:
            s_i.add(v)
        counts = dict.fromkeys(graph.neighbors(v), 0)
        counts.update(rec.designations)
        pred[v] = _majority(counts, rng)

    # Descendants of v are the nodes whose predecessor chains lead to v.
    children: dict[int, list[int]] = {}
    for v, w in pred.items():
        children.setdefault(w, []).append(v)
    e_counts: dict[int, int] = {}
    for v in candidates:
        seen = {v}
        stack = list(children.get(v, ()))
        count = 0
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            count += 1
            stack.extend(children.get(u, ()))
        e_counts[v] = count

    max_e = max(e_counts.values())
    s_d = {v for v, c in e_counts.items() if c == max_e}

    inter = s_i & s_d
    if inter:
        pool = inter
    elif model.p == 1.0:
        pool = s_i or s_d or cand_set
    else:
        pool = (s_i | s_d) or cand_set
    estimate = pick_best(scores, pool)

    return EstimationOutcome(
        estimate=estimate,
        s_i=frozenset(s_i),
        s_d=frozenset(s_d),
        budget_used=r * len(candidates),
        predecessor_edges=pred,
        e_counts=e_counts,
        candidates=tuple(candidates),
    )


def run_mvad(
    snapshot: Snapshot,
    config: ADConfig,
    model: TruthModel,
    rng: np.random.Generator,
) -> EstimationOutcome:
    """Adaptive majority-voting estimation.

    The walk starts at the likelihood center and is steered by the
    majority direction answer of each visit.  Respondents are always
    infected nodes: the querier observes the snapshot, so designations
    pointing outside it are discarded as known-false, and a visit that
    yields no usable designation moves to a uniformly random infected
    neighbor.  Revisits are allowed and accumulate in eta.  With perfect
    identity answers the walk halts the moment it queries the source.
    """
    model.validate_for_degree(_validation_degree(snapshot.graph))
    r, K = config.repetitions, config.budget
    scores = likelihood_table(snapshot)
    infected = snapshot.infected_set
    graph = snapshot.graph

    s = pick_best(scores, scores)
    remaining = K
    s_i: set[int] = set()
    eta: dict[int, int] = {}
    estimate: int | None = None

    while remaining >= r:
        remaining -= r
        if model.p == 1.0:
            if s == snapshot.source:
                estimate = s
                break
            counts: dict[int, int] = {}
            for _ in range(r):
                w = answer_dir(s, snapshot, model.q, rng)
                counts[w] = counts.get(w, 0) + 1
        else:
            eta[s] = eta.get(s, 0) + 1
            rec = query_rounds(s, snapshot, r, model, rng)
            if 2 * rec.yes_count >= r:
                s_i.add(s)
            counts = rec.designations

        nxt = _majority({w: c for w, c in counts.items() if w in infected}, rng)
        if nxt is None:
            inf_nbrs = [w for w in graph.neighbors(s) if w in infected]
            nxt = inf_nbrs[int(rng.integers(len(inf_nbrs)))] if inf_nbrs else s
        s = nxt

    budget_used = K - remaining
    if estimate is None:
        if eta:
            max_eta = max(eta.values())
            s_d = {v for v, c in eta.items() if c == max_eta}
        else:
            s_d = set(infected)
        pool = (s_i & s_d) or (s_i | s_d) or infected
        estimate = pick_best(scores, pool)
    else:
        s_d = {v for v, c in eta.items() if c == max(eta.values())} if eta else set()

    return EstimationOutcome(
        estimate=estimate,
        s_i=frozenset(s_i),
        s_d=frozenset(s_d),
        budget_used=budget_used,
        eta=eta,
    )


_RSTAR_FORMULAS = {
    ("na", "necessary"): _budget.rstar_na_necessary,
    ("na", "sufficient"): _budget.rstar_na_sufficient,
    ("ad", "necessary"): _budget.rstar_ad_necessary,
    ("ad", "sufficient"): _budget.rstar_ad_sufficient,
}


def choose_r_star(scheme: str, kind: str, K: int, d: int, p: float, q: float) -> int:
    """Closed-form repetition count, floored and clamped to [1, K].

    ``scheme`` is "na" or "ad"; ``kind`` picks the necessary- or
    sufficient-budget variant of the formula.  Natural logarithms
    throughout, so K must be at least 3 for the iterated log.
    """
    if K < 3:
        raise InvalidParameterError(f"K must be >= 3, got {K}")
    if d < 3:
        raise InvalidParameterError(f"d must be >= 3, got {d}")
    try:
        formula = _RSTAR_FORMULAS[(scheme, kind)]
    except KeyError:
        raise InvalidParameterError(f"unknown scheme/kind {scheme!r}/{kind!r}") from None
    return max(1, min(K, math.floor(formula(K, d, p, q))))
