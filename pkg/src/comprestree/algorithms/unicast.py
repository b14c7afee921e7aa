"""Optimal restricted solutions under the unicast cost model.

Unicast deliveries cannot be shared, so the cost of an edge decomposes per
pair: using X_u to compress X_v costs

    c(u,v) = min( H(X_u) d(u,v) + H(X_v|X_u) d(v,bs),     # raw parent -> child
                  H(X_v) d(u,v) + H(X_v|X_u) d(u,bs) )    # raw child -> parent

independently of every other edge.  Adding bs -> v edges at H(X_v) d(v,bs)
and taking a minimum-weight out-arborescence rooted at the base station
yields the optimal restricted solution.
"""

from __future__ import annotations

import math

from ..ctree import UNICAST, CompressionTree, MovementScheme, RawPlan
from ..entropy import EntropyModel
from ..netgraph import DistanceTable, Network, shortest_paths


def minimum_arborescence(nodes, root, cost: dict[tuple[int, int], float]) -> dict[int, int]:
    """Chu-Liu/Edmonds minimum-weight out-arborescence rooted at ``root``.

    ``cost`` maps directed pairs (u, v) to weights.  Ties break toward the
    smaller (weight, source, target), so results are reproducible.
    Returns child -> parent over the original node ids.
    """
    nodes = sorted(nodes)
    if root not in nodes:
        raise ValueError("root must be among the nodes")
    edges = [(u, v, w, k) for k, ((u, v), w) in enumerate(sorted(cost.items()))]
    eid_pair = {k: (u, v) for u, v, _, k in edges}
    chosen = _edmonds(nodes, root, edges)
    return {eid_pair[eid][1]: eid_pair[eid][0] for eid in chosen}


def _edmonds(nodes, root, edges):
    """Returns the set of chosen original edge ids."""
    best_in = {}
    for u, v, w, eid in edges:
        if v == root or u == v:
            continue
        cur = best_in.get(v)
        if cur is None or (w, u, eid) < (cur[0], cur[1], cur[3]):
            best_in[v] = (w, u, v, eid)
    for v in nodes:
        if v != root and v not in best_in:
            raise ValueError(f"node {v} unreachable from the root")

    # look for a cycle among the chosen in-edges
    color = {v: 0 for v in nodes}
    cycle = None
    for start in nodes:
        if color[start] or start == root:
            continue
        path = []
        v = start
        while v != root and color[v] == 0:
            color[v] = 1
            path.append(v)
            v = best_in[v][1]
        if v != root and color[v] == 1:
            cycle = path[path.index(v):]
        for p in path:
            color[p] = 2
        if cycle:
            break
    if cycle is None:
        return {best_in[v][3] for v in nodes if v != root}

    cyc = set(cycle)
    super_id = max(nodes) + 1
    cycle_cost = {v: best_in[v][0] for v in cycle}
    new_edges = []
    enter_via = {}  # new eid -> (orig eid, cycle node it enters)
    next_eid = 0
    for u, v, w, eid in edges:
        nu = super_id if u in cyc else u
        nv = super_id if v in cyc else v
        if nu == nv:
            continue
        if nv == super_id:
            nw = w - cycle_cost[v]
            enter_via[next_eid] = (eid, v)
        else:
            nw = w
            enter_via[next_eid] = (eid, None)
        new_edges.append((nu, nv, nw, next_eid))
        next_eid += 1
    new_nodes = [n for n in nodes if n not in cyc] + [super_id]
    sub_chosen = _edmonds(new_nodes, root, new_edges)

    chosen = set()
    entered_at = None
    for neid in sub_chosen:
        eid, via = enter_via[neid]
        chosen.add(eid)
        if via is not None:
            entered_at = via
    # keep every cycle edge except the one into the entry node
    for v in cycle:
        if v != entered_at:
            chosen.add(best_in[v][3])
    return chosen


def edge_costs(net: Network, model: EntropyModel, dtab: DistanceTable | None = None
               ) -> dict[tuple[int, int], float]:
    """The c(u,v) table over all sensor pairs plus the bs -> v edges."""
    dtab = dtab or shortest_paths(net)
    sensors = net.sensors
    cost = {}
    for u in sensors:
        for v in sensors:
            if u == v:
                continue
            move = dtab.d(u, v)
            cond = model.cond_entropy(v, u)
            cost[(u, v)] = min(model.entropy(u) * move + cond * dtab.to_bs(v),
                               model.entropy(v) * move + cond * dtab.to_bs(u))
    for v in sensors:
        cost[(net.bs, v)] = model.entropy(v) * dtab.to_bs(v)
    return cost


def restricted_unicast_total(parent: dict[int, int], net: Network, model: EntropyModel,
                             dtab: DistanceTable) -> float:
    """Total cost of a bs-rooted restricted unicast tree, summed in ascending
    child order (shared by the construction and its oracle comparisons)."""
    total = 0.0
    for c in sorted(parent):
        p = parent[c]
        if p == net.bs:
            total += model.entropy(c) * dtab.to_bs(c)
        else:
            move = dtab.d(p, c)
            cond = model.cond_entropy(c, p)
            total += min(model.entropy(p) * move + cond * dtab.to_bs(c),
                         model.entropy(c) * move + cond * dtab.to_bs(p))
    return total


def unicast_arborescence(net: Network, model: EntropyModel,
                         dtab: DistanceTable | None = None
                         ) -> tuple[CompressionTree, MovementScheme, float]:
    """Optimal restricted unicast solution via the minimum out-arborescence.

    Per tree edge the cheaper branch is recorded (ties: the raw parent value
    travels to the child); the base station's direct children are
    compression-tree roots shipping raw values.
    """
    dtab = dtab or shortest_paths(net)
    if not net.sensors:
        raise ValueError("network has no sensors")
    cost = edge_costs(net, model, dtab)
    parent = minimum_arborescence(list(net.sensors) + [net.bs], net.bs, cost)
    tree = CompressionTree(net.bs, parent, net.sensors)

    recipients: dict[int, set[int]] = {}
    sites: dict[int, int] = {}
    for c in sorted(parent):
        p = parent[c]
        if p == net.bs:
            recipients.setdefault(c, set()).add(net.bs)
            continue
        move = dtab.d(p, c)
        cond = model.cond_entropy(c, p)
        b1 = model.entropy(p) * move + cond * dtab.to_bs(c)
        b2 = model.entropy(c) * move + cond * dtab.to_bs(p)
        if b1 <= b2:
            recipients.setdefault(p, set()).add(c)
            sites[c] = c
        else:
            recipients.setdefault(c, set()).add(p)
            sites[c] = p
    plans = {s: RawPlan(s, frozenset(r)) for s, r in sorted(recipients.items())}
    scheme = MovementScheme(plans, sites, UNICAST)
    total = restricted_unicast_total(parent, net, model, dtab)
    return tree, scheme, total
