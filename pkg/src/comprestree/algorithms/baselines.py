"""Baseline data-collection schemes: IND, the DSC lower bound, and greedy
clustering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ctree import WL, CostBreakdown
from ..entropy import EntropyModel
from ..netgraph import DistanceTable, Network, shortest_paths


def ind_cost(net: Network, model: EntropyModel, dtab: DistanceTable | None = None) -> float:
    """Every node compresses alone and ships to the base station:
    sum_i d(i,bs) * H(X_i)."""
    dtab = dtab or shortest_paths(net)
    return sum(dtab.to_bs(i) * model.entropy(i) for i in net.sensors)


def dsc_lower_bound(net: Network, model: EntropyModel, dtab: DistanceTable | None = None) -> float:
    """Slepian-Wolf floor: nodes sorted ascending by distance to the base
    station (ties by id), each coded at its conditional entropy given all
    closer nodes: sum_i d(i,bs) * H(X_i | X_1..X_{i-1})."""
    dtab = dtab or shortest_paths(net)
    order = sorted(net.sensors, key=lambda i: (dtab.to_bs(i), i))
    total = 0.0
    for k, i in enumerate(order):
        total += dtab.to_bs(i) * model.cond_entropy_set(i, order[:k])
    return total


@dataclass
class ClusterResult:
    clusters: tuple[tuple[int, ...], ...]
    cost: CostBreakdown
    heads: tuple[int, ...]


class _Tables:
    """Dense per-instance lookup tables so cluster evaluation is numpy-sized."""

    def __init__(self, net: Network, model: EntropyModel, dtab: DistanceTable):
        ids = list(net.sensors)
        self.ids = ids
        self.index = {v: k for k, v in enumerate(ids)}
        n = len(ids)
        self.H = np.array([model.entropy(v) for v in ids])
        self.dbs = np.array([dtab.to_bs(v) for v in ids])
        self.D = np.array([[dtab.d(a, b) for b in ids] for a in ids])
        self.cond = np.zeros((n, n))
        for a, va in enumerate(ids):
            for b, vb in enumerate(ids):
                if a != b:
                    self.cond[a, b] = model.cond_entropy(va, vb)
        self.symmetric = model.symmetric_conditionals


def _prim_from(cond_sub: np.ndarray, qi: int) -> list[tuple[int, int]]:
    """Minimum-conditional-entropy spanning tree directed out of head qi;
    edges as (parent, child) in submatrix indices, deterministic ties."""
    m = cond_sub.shape[0]
    in_tree = np.zeros(m, dtype=bool)
    in_tree[qi] = True
    best_w = cond_sub[:, qi].copy()
    best_par = np.full(m, qi)
    edges = []
    for _ in range(m - 1):
        masked = np.where(in_tree, np.inf, best_w)
        nxt = int(np.argmin(masked))
        edges.append((int(best_par[nxt]), nxt))
        in_tree[nxt] = True
        upd = ~in_tree & (cond_sub[:, nxt] < best_w - 1e-15)
        best_w[upd] = cond_sub[upd, nxt]
        best_par[upd] = nxt
    return edges


def _cluster_stats(t: _Tables, idx: np.ndarray) -> tuple[float, float, int]:
    """(total, nc, head-index-into-ids) for the cluster given by ``idx``.

    total = sum_{v != q} H(X_v) d(v,q) + d(q,bs) * Hhat, with the head q
    minimizing.  Hhat = H(X_q) plus the conditional weight of a
    minimum-conditional-entropy spanning tree rooted at q (plain MST when
    conditionals are symmetric, per-head tree otherwise).  NC books the head
    at its own distance and every member at H(child|parent) * d(child,bs).
    """
    if len(idx) == 1:
        q = int(idx[0])
        total = float(t.H[q] * t.dbs[q])
        return total, total, q
    sub = np.asarray(idx)
    H_I = t.H[sub]
    gather = H_I @ t.D[np.ix_(sub, sub)]
    dbs_I = t.dbs[sub]
    cond_sub = t.cond[np.ix_(sub, sub)]
    if t.symmetric:
        edges0 = _prim_from(cond_sub, 0)
        mst_w = float(sum(cond_sub[c, p] for p, c in edges0))
        totals = gather + dbs_I * (H_I + mst_w)
        qi = int(np.argmin(totals))
        total = float(totals[qi])
        edges = edges0 if qi == 0 else _prim_from(cond_sub, qi)
    else:
        best = None
        for qi in range(len(sub)):
            edges = _prim_from(cond_sub, qi)
            hhat = H_I[qi] + float(sum(cond_sub[c, p] for p, c in edges))
            tot = float(gather[qi] + dbs_I[qi] * hhat)
            if best is None or tot < best[0] - 1e-15:
                best = (tot, qi, edges)
        total, qi, edges = best
    nc = float(H_I[qi] * dbs_I[qi])
    for p, c in edges:
        nc += float(cond_sub[c, p] * t.dbs[sub[c]])
    return total, nc, int(sub[qi])


def eval_clustering(net: Network, model: EntropyModel, clusters,
                    dtab: DistanceTable | None = None,
                    cost_model: str = WL) -> ClusterResult:
    """Cost a given clustering (heads chosen per cluster to minimize)."""
    dtab = dtab or shortest_paths(net)
    t = _Tables(net, model, dtab)
    clusters = tuple(tuple(sorted(c)) for c in clusters)
    covered = sorted(v for c in clusters for v in c)
    if covered != sorted(net.sensors):
        raise ValueError("clusters must partition the sensors")
    total = nc = 0.0
    heads = []
    for c in clusters:
        idx = np.array([t.index[v] for v in c])
        tt, nn, qk = _cluster_stats(t, idx)
        total += tt
        nc += nn
        heads.append(t.ids[qk])
    cost = CostBreakdown(total=total, nc=nc, ic=total - nc, cost_model=cost_model)
    return ClusterResult(clusters=clusters, cost=cost, heads=tuple(heads))


def cluster_greedy(net: Network, model: EntropyModel, cost_model: str = WL,
                   dtab: DistanceTable | None = None) -> ClusterResult:
    """Start with singletons and merge the cluster pair with the largest
    total-cost decrease until no merge improves (ties: smallest ids)."""
    dtab = dtab or shortest_paths(net)
    t = _Tables(net, model, dtab)
    clusters: dict[int, tuple[int, ...]] = {k: (v,) for k, v in enumerate(t.ids)}
    cost_of = {k: float(t.H[k] * t.dbs[k]) for k in clusters}
    merged_cache: dict[tuple[int, int], float] = {}

    def merged_cost(i: int, j: int) -> float:
        key = (i, j) if i < j else (j, i)
        if key not in merged_cache:
            members = tuple(sorted(clusters[i] + clusters[j]))
            idx = np.array([t.index[v] for v in members])
            merged_cache[key], _, _ = _cluster_stats(t, idx)
        return merged_cache[key]

    while len(clusters) > 1:
        best = None  # ((-saving, min_id_i, min_id_j), i, j)
        ids = sorted(clusters, key=lambda k: clusters[k][0])
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                i, j = ids[a], ids[b]
                saving = cost_of[i] + cost_of[j] - merged_cost(i, j)
                if saving > 1e-12:
                    key = (-saving, clusters[i][0], clusters[j][0])
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, i, j = best
        members = tuple(sorted(clusters[i] + clusters[j]))
        new_cost = merged_cost(i, j)
        del clusters[j]
        clusters[i] = members
        cost_of[i] = new_cost
        merged_cache = {k: v for k, v in merged_cache.items() if i not in k and j not in k}
    final = sorted(clusters.values(), key=lambda c: c[0])
    return eval_clustering(net, model, final, dtab, cost_model)
