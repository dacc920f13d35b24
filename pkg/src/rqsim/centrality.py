"""Infection-ordering likelihood scores over a snapshot.

For a tree-shaped infected set, the score of node ``v`` is the number of
infection orderings that start at ``v`` and respect adjacency:
``N! * prod(1 / T_u)`` over subtree sizes ``T_u`` with the tree rooted at
``v``.  Everything is kept in log domain (N = 400 overflows any fixed
width otherwise).  A subset-DP oracle recounts orderings directly for
small trees, and a sequence-likelihood heuristic covers loopy graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .diffusion import Snapshot
from .errors import InvalidInputError, InvalidParameterError

TreeAdjacency = Mapping[int, Sequence[int]]


@dataclass(frozen=True)
class CentralityTable:
    """Log-scores for every infected node plus the argmax node.

    Ties at the maximum break toward the lowest node id so repeated runs
    agree.
    """

    log_r: dict[int, float]
    center: int


def _as_tree_adjacency(tree: Snapshot | TreeAdjacency) -> TreeAdjacency:
    if isinstance(tree, Snapshot):
        if not tree.is_tree:
            raise InvalidInputError("infected subgraph is not a tree")
        return tree.induced_adjacency
    return tree


def _root_pass(adj: TreeAdjacency, root: int) -> tuple[list[int], dict[int, int], dict[int, int]]:
    """Iterative DFS order, parent map, and subtree sizes rooted at ``root``."""
    parent = {root: -1}
    order = [root]
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
                stack.append(v)
    if len(order) != len(adj):
        raise InvalidInputError("adjacency is not connected")
    sizes = {v: 1 for v in order}
    for v in reversed(order):
        p = parent[v]
        if p != -1:
            sizes[p] += sizes[v]
    return order, parent, sizes


def subtree_sizes(tree: Snapshot | TreeAdjacency, root: int) -> dict[int, int]:
    """Size of the subtree hanging below each node when rooted at ``root``."""
    adj = _as_tree_adjacency(tree)
    _, _, sizes = _root_pass(adj, root)
    return sizes


def log_score_at_root(tree: Snapshot | TreeAdjacency, root: int) -> float:
    """Direct evaluation log(N!) - sum(log T_u) for a single root."""
    adj = _as_tree_adjacency(tree)
    sizes = subtree_sizes(adj, root)
    return math.lgamma(len(sizes) + 1) - sum(math.log(s) for s in sizes.values())


def log_rumor_centralities(tree: Snapshot | TreeAdjacency) -> CentralityTable:
    """Log ordering-count score for every node of a tree, in O(N).

    One rooted pass computes subtree sizes; rerooting across an edge
    (u -> child c) multiplies the score by T_c / (N - T_c).
    """
    adj = _as_tree_adjacency(tree)
    n = len(adj)
    if n == 0:
        raise InvalidInputError("empty tree")
    root = min(adj)
    order, parent, sizes = _root_pass(adj, root)

    log_r = {root: math.lgamma(n + 1) - sum(math.log(s) for s in sizes.values())}
    for v in order[1:]:
        s = sizes[v]
        log_r[v] = log_r[parent[v]] + math.log(s) - math.log(n - s)

    center = max(log_r, key=lambda v: (log_r[v], -v))
    return CentralityTable(log_r=log_r, center=center)


def brute_force_rumor_centrality(tree: Snapshot | TreeAdjacency, root: int) -> int:
    """Count infection orderings starting at ``root`` by subset dynamic programming.

    Counts permutations of the nodes in which every node appears after its
    tree parent; intentionally avoids the product formula so it can serve
    as an independent oracle.  Refuses trees above 10 nodes.
    """
    adj = _as_tree_adjacency(tree)
    n = len(adj)
    if n > 10:
        raise InvalidParameterError(f"brute force limited to 10 nodes, got {n}")
    order, parent, _ = _root_pass(adj, root)
    index = {v: i for i, v in enumerate(order)}
    children_masks = [0] * n
    for v in order[1:]:
        children_masks[index[parent[v]]] |= 1 << index[v]

    full = (1 << n) - 1
    memo: dict[int, int] = {full: 1}

    def ways(infected_mask: int) -> int:
        cached = memo.get(infected_mask)
        if cached is not None:
            return cached
        total = 0
        for i in range(n):
            bit = 1 << i
            if infected_mask & bit:
                continue
            par = parent[order[i]]
            if par == -1 or infected_mask & (1 << index[par]):
                total += ways(infected_mask | bit)
        memo[infected_mask] = total
        return total

    return ways(1 << index[root])


def _bfs_order_and_tree(adj: TreeAdjacency, root: int) -> tuple[list[int], dict[int, int]]:
    """BFS discovery order and parent map; neighbor ties by ascending id."""
    parent = {root: -1}
    order = [root]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
    return order, parent


def general_graph_scores(snapshot: Snapshot, nodes: Iterable[int] | None = None) -> dict[int, float]:
    """Source scores for snapshots whose infected set may contain cycles.

    For each candidate root ``v``: take the BFS tree over the infected set
    (discovery order sigma), score it as log P(sigma | v) plus the tree
    ordering-count score of the BFS tree.  P(sigma | v) is the spreading
    likelihood of that order: at each step, (edges from the current
    infected prefix to the next node) / (all boundary edges of the prefix
    in the underlying graph).
    """
    if snapshot.graph is None:
        raise InvalidInputError("general-graph scoring needs the underlying graph")
    adj = snapshot.induced_adjacency
    graph = snapshot.graph
    members = snapshot.infected_set
    n = snapshot.n
    targets = sorted(members) if nodes is None else sorted(set(nodes))
    for v in targets:
        if v not in members:
            raise InvalidInputError(f"node {v} is not infected")

    scores: dict[int, float] = {}
    for v in targets:
        order, parent = _bfs_order_and_tree(adj, v)
        if len(order) < n:
            raise InvalidInputError("infected set is disconnected")
        if n == 1:
            scores[v] = 0.0
            continue

        tree_adj: dict[int, list[int]] = {u: [] for u in order}
        for u in order[1:]:
            tree_adj[u].append(parent[u])
            tree_adj[parent[u]].append(u)
        log_r = log_score_at_root(tree_adj, v)

        log_p = 0.0
        in_prefix = {v}
        boundary = graph.degree(v)
        for w in order[1:]:
            links = sum(1 for x in graph.neighbors(w) if x in in_prefix)
            log_p += math.log(links) - math.log(boundary)
            boundary += graph.degree(w) - 2 * links
            in_prefix.add(w)
        scores[v] = log_p + log_r
    return scores


def likelihood_table(snapshot: Snapshot, nodes: Iterable[int] | None = None) -> dict[int, float]:
    """Snapshot log-likelihood by source candidate.

    Tree-shaped infected sets get the exact ordering-count score; loopy
    ones fall back to the BFS-tree heuristic.
    """
    if snapshot.is_tree:
        table = log_rumor_centralities(snapshot).log_r
        if nodes is None:
            return table
        return {v: table[v] for v in nodes}
    return general_graph_scores(snapshot, nodes)


def pick_best(scores: Mapping[int, float], pool: Iterable[int]) -> int:
    """Highest-scoring node of ``pool``; ties go to the lowest node id."""
    best = None
    for v in pool:
        key = (scores[v], -v)
        if best is None or key > best[0]:
            best = (key, v)
    if best is None:
        raise InvalidInputError("empty candidate pool")
    return best[1]
