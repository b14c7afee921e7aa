"""Weakly connected dominating sets and the broadcast tree they induce.

A WCDS S of the sensor subgraph satisfies: (1) every sensor is in S or
adjacent to S, and (2) deleting all edges with both endpoints outside S
leaves the sensor subgraph connected.  Locally broadcasting exactly the
nodes of S yields a valid compression tree: every tree edge has a
broadcasting endpoint, so some endpoint holds both operands.
"""

from __future__ import annotations

from ..ctree import (WL, CompressionTree, MovementScheme, RawPlan,
                     node_weighted_chain)
from ..entropy import EntropyModel
from ..netgraph import DistanceTable, Network, shortest_paths


class InvalidWCDS(ValueError):
    pass


def _sensor_adj(net: Network) -> dict[int, tuple[int, ...]]:
    return {u: tuple(v for v in net.adj[u] if v != net.bs) for u in net.sensors}


def is_wcds(net: Network, s) -> bool:
    """Check both WCDS conditions on the sensor subgraph."""
    s = set(s)
    adj = _sensor_adj(net)
    sensors = set(net.sensors)
    if not s <= sensors:
        return False
    for v in sensors:
        if v not in s and not any(u in s for u in adj[v]):
            return False
    if not sensors:
        return True
    # weak connectivity: keep only edges with an endpoint in S
    start = next(iter(sorted(sensors)))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if (u in s or v in s) and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == sensors


def wcds_greedy(net: Network) -> frozenset:
    """Greedy WCDS via gray/white/black coloring.

    Seed with a maximum-degree sensor and repeatedly blacken the gray node,
    or white node adjacent to a gray one, that newly dominates the most
    white nodes (a blackened white node counts itself).  Ties go to the
    smaller id.  The grown black set stays weakly connected throughout, so
    the result satisfies both WCDS conditions by construction.
    """
    adj = _sensor_adj(net)
    sensors = sorted(net.sensors)
    if not sensors:
        return frozenset()
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in sensors}
    black: set[int] = set()

    def blacken(v: int) -> None:
        color[v] = BLACK
        black.add(v)
        for u in adj[v]:
            if color[u] == WHITE:
                color[u] = GRAY

    seed = max(sensors, key=lambda v: (len(adj[v]), -v))
    blacken(seed)
    while any(color[v] == WHITE for v in sensors):
        best = None
        for v in sensors:
            if color[v] == BLACK:
                continue
            if color[v] == WHITE and not any(color[u] == GRAY for u in adj[v]):
                continue
            yield_ = sum(1 for u in adj[v] if color[u] == WHITE) + (1 if color[v] == WHITE else 0)
            if best is None or (-yield_, v) < best[0]:
                best = ((-yield_, v), v)
        if best is None:
            # sensor subgraph is disconnected; restart in the next component
            seed = max((v for v in sensors if color[v] == WHITE), key=lambda v: (len(adj[v]), -v))
            blacken(seed)
            continue
        blacken(best[1])
    return frozenset(black)


def tree_from_wcds(net: Network, s, model: EntropyModel,
                   dtab: DistanceTable | None = None) -> tuple[CompressionTree, MovementScheme]:
    """Compression tree induced by locally broadcasting every node of S.

    The tree is rooted at the S-member nearest the base station and grown as
    the deterministic shortest-path tree over the S-incident sensor edges;
    each non-S node is then re-parented to its cheapest S-neighbor
    (H(X_i|X_p) * d(i,bs), ties by id) whenever that keeps the tree acyclic.
    Compression sites: a non-S child compresses locally (it heard its
    parent); an S-member child whose parent is outside S is compressed at
    the parent (which heard the child's broadcast); when both endpoints
    broadcast, either endpoint holds both operands and the one nearer the
    base station is chosen (tie: the child).
    """
    s = frozenset(s)
    if not is_wcds(net, s):
        raise InvalidWCDS(f"{sorted(s)} is not a WCDS of the sensor subgraph")
    dtab = dtab or shortest_paths(net)
    adj = _sensor_adj(net)
    sensors = sorted(net.sensors)
    root = min(s, key=lambda v: (dtab.to_bs(v), v))

    # deterministic Dijkstra tree over S-incident sensor edges
    import heapq
    dist = {v: float("inf") for v in sensors}
    parent: dict[int, int] = {}
    dist[root] = 0.0
    heap = [(0.0, root)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u] + 1e-15:
            continue
        for v in adj[u]:
            if u not in s and v not in s:
                continue
            nd = d + net.weight(u, v)
            if nd < dist[v] - 1e-12 or (abs(nd - dist[v]) <= 1e-12 and u < parent.get(v, 1 << 60)):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))

    tree = CompressionTree(root, parent, sensors)
    # re-parent non-S nodes to their best S-neighbor when acyclic
    for i in sorted(set(sensors) - s):
        if i == root:
            continue
        sub = tree.subtree(i)
        options = [p for p in adj[i] if p in s and p not in sub]
        if not options:
            continue
        best = min(options, key=lambda p: (model.cond_entropy(i, p) * dtab.to_bs(i), p))
        if best != tree.parent[i]:
            parent[i] = best
            tree = CompressionTree(root, parent, sensors)

    sites: dict[int, int] = {}
    for p, c in tree.edges():
        if c not in s:
            sites[c] = c
        elif p not in s:
            sites[c] = p
        else:
            # both ends broadcast: compress at the endpoint nearer the bs
            sites[c] = min((p, c), key=lambda v: (dtab.to_bs(v), 0 if v == c else 1))

    plans: dict[int, RawPlan] = {}
    for b in sorted(s):
        recipients = set(net.adj[b])
        bset = [b]
        if b == root:
            recipients.add(net.bs)
            if net.bs not in net.adj[b]:
                _, chain = node_weighted_chain(net, root, net.bs)
                bset = list(dict.fromkeys([root] + chain[:-1]))
        plans[b] = RawPlan(b, frozenset(recipients), broadcasters=tuple(bset))
    scheme = MovementScheme(plans, sites, WL)
    return tree, scheme
