"""Generic greedy treestar framework and the WL-SG Mce-Treestar.

The greedy grows a forest from singletons.  Each iteration picks the most
cost-effective treestar: a center r plus directed leaf-edges into distinct
foreign components, rated by cost/(k+1).  Chosen edges are oriented away
from the center (they record raw data movement), components merge, and the
loop ends with one spanning extended compression tree, which converts into
a restricted movement scheme and is polished by a local-improvement pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from ..ctree import (WL, CompressionTree, ExtendedCompressionTree, MovementScheme,
                     RawPlan, eval_cost, node_weighted_chain, scheme_from_extended)
from ..entropy import EntropyModel
from ..netgraph import DistanceTable, Network, shortest_paths


class NoCandidate(RuntimeError):
    """No center can reach a foreign component (impossible when connected)."""


@dataclass
class Forest:
    """Disjoint components over the sensors plus everything the greedy
    accumulates: directed raw-movement edges, per-node delivery sets, and
    the (n_i, m_i) iteration counters."""

    sensors: tuple[int, ...]
    _parent: dict[int, int] = field(default_factory=dict)
    directed_edges: list[tuple[int, int]] = field(default_factory=list)
    raw_out: dict[int, set[int]] = field(default_factory=dict)
    relays: dict[int, tuple] = field(default_factory=dict)
    history: list[tuple[int, int]] = field(default_factory=list)  # (n_i, m_i)

    def __post_init__(self):
        self.sensors = tuple(sorted(self.sensors))
        self._parent = {s: s for s in self.sensors}

    def find(self, v: int) -> int:
        while self._parent[v] != v:
            self._parent[v] = self._parent[self._parent[v]]
            v = self._parent[v]
        return v

    def component_count(self) -> int:
        return sum(1 for s in self.sensors if self.find(s) == s)

    def components(self) -> list[frozenset]:
        groups: dict[int, set[int]] = {}
        for s in self.sensors:
            groups.setdefault(self.find(s), set()).add(s)
        return [frozenset(groups[k]) for k in sorted(groups)]

    def merge_treestar(self, ts: "TreeStar") -> None:
        n_before = self.component_count()
        for _, contact in ts.leaf_edges:
            self.directed_edges.append((ts.center, contact))
            self.raw_out.setdefault(ts.center, set()).add(contact)
            ra = self.find(ts.center)
            rb = self.find(contact)
            if ra == rb:
                raise ValueError("treestar leaf lies in the center's component")
            self._parent[rb] = ra
        if ts.relay_edges:
            prev = set(self.relays.get(ts.center, ()))
            self.relays[ts.center] = tuple(sorted(prev | set(ts.relay_edges)))
        elif ts.relay_nodes:
            prev = set(self.relays.get(ts.center, (ts.center,)))
            self.relays[ts.center] = tuple(sorted(prev | set(ts.relay_nodes)))
        self.history.append((n_before, ts.k + 1))


@dataclass(frozen=True)
class TreeStar:
    """Center plus leaf-edges into distinct foreign components.

    cost = ic_part + nc_part; cost-effectiveness = cost / (k + 1).
    ``relay_nodes`` carries the WL relay set (the connected dominating set
    actually transmitting X_center); ``relay_edges`` the multicast Steiner
    tree.  Both stay empty for the single-broadcast SG case.
    """

    center: int
    leaf_edges: tuple[tuple[int, int], ...]   # (center, contact)
    ic_part: float
    nc_part: float
    relay_nodes: tuple = ()
    relay_edges: tuple = ()

    @property
    def k(self) -> int:
        return len(self.leaf_edges)

    @property
    def cost(self) -> float:
        return self.ic_part + self.nc_part

    @property
    def ceff(self) -> float:
        return self.cost / (self.k + 1)


MceProcedure = Callable[[Forest, Network, EntropyModel, DistanceTable], TreeStar]


def mce_treestar_wlsg(forest: Forest, net: Network, model: EntropyModel,
                      dtab: DistanceTable) -> TreeStar:
    """Exact most cost-effective treestar under WL-SG.

    For each candidate center r: the contact of a foreign component T is
    argmin over v in T adjacent to r of H(X_v|X_r) * d(v,bs); candidates are
    sorted by ascending h and the best prefix k minimizes
    (H(X_r)*w(r) + sum of the k smallest h) / (k+1).  Ties break by smaller
    cost, then smaller center id (and inside a center by smaller contact id).
    """
    best: tuple | None = None
    for r in forest.sensors:
        comp_r = forest.find(r)
        per_comp: dict[int, tuple[float, int]] = {}
        for v in net.adj[r]:
            if v == net.bs:
                continue
            cv = forest.find(v)
            if cv == comp_r:
                continue
            h = model.cond_entropy(v, r) * dtab.to_bs(v)
            cur = per_comp.get(cv)
            if cur is None or (h, v) < cur:
                per_comp[cv] = (h, v)
        if not per_comp:
            continue
        ic = model.entropy(r) * net.transmit_weight(r)
        ranked = sorted(per_comp.values(), key=lambda t: (t[0], t[1]))
        prefix = 0.0
        best_r: tuple | None = None
        for k, (h, contact) in enumerate(ranked, start=1):
            prefix += h
            ceff = (ic + prefix) / (k + 1)
            if best_r is None or ceff < best_r[0] - 1e-15:
                best_r = (ceff, ic + prefix, k, prefix)
        ceff, cost, k, nc_part = best_r
        edges = tuple((r, contact) for _, contact in ranked[:k])
        key = (ceff, cost, r)
        if best is None or key < best[0]:
            best = (key, TreeStar(center=r, leaf_edges=edges, ic_part=ic, nc_part=nc_part))
    if best is None:
        raise NoCandidate("no center has a neighbor in a foreign component")
    return best[1]


class TreestarRun(NamedTuple):
    ext: ExtendedCompressionTree
    tree: CompressionTree
    scheme: MovementScheme
    cost: float
    centers: tuple[int, ...]
    history: tuple[tuple[int, int], ...]
    iterations: int


def greedy_treestar(net: Network, model: EntropyModel, cost_model: str = WL,
                    mce: MceProcedure | None = None,
                    dtab: DistanceTable | None = None,
                    improve: bool = True) -> TreestarRun:
    """Run the generic greedy framework to a spanning extended compression
    tree, convert it to a restricted scheme, then hill-climb with redundant
    local broadcasts (the local-improvement pass)."""
    dtab = dtab or shortest_paths(net)
    mce = mce or mce_treestar_wlsg
    forest = Forest(net.sensors)
    centers: list[int] = []
    if len(net.sensors) == 0:
        raise ValueError("network has no sensors")
    while forest.component_count() > 1:
        ts = mce(forest, net, model, dtab)
        forest.merge_treestar(ts)
        centers.append(ts.center)
    ext = ExtendedCompressionTree(net.sensors, forest.directed_edges, relays=forest.relays)
    tree, scheme = scheme_from_extended(ext, net, model, cost_model, dtab)
    if improve:
        tree, scheme = local_improve(scheme, tree, net, model, cost_model, dtab)
    cost = eval_cost(scheme, tree, net, model, cost_model, dtab).total
    return TreestarRun(ext=ext, tree=tree, scheme=scheme, cost=cost,
                       centers=tuple(centers), history=tuple(forest.history),
                       iterations=len(centers))


def _replan_movement_wl(tree: CompressionTree, net: Network, model: EntropyModel,
                        dtab: DistanceTable) -> MovementScheme | None:
    """Cheapest restricted WL movement scheme for a *fixed* tree and root.

    Per edge the site may sit at either endpoint; site-at-child needs the
    parent to broadcast, site-at-parent needs the child to, and one
    broadcast per node covers every adjacent need.  A bottom-up DP over
    per-node broadcast indicators solves this exactly.  Returns None when
    some tree edge is not network-adjacent (NS trees carry their own relay
    structures and are left alone)."""
    if not tree.is_subgraph_of(net) or tree.root not in net.sensors:
        return None
    sensors = list(tree.sensors)
    children: dict[int, list[int]] = {v: [] for v in sensors}
    for c, p in tree.parent.items():
        children[p].append(c)
    order = [tree.root]
    for u in order:
        order.extend(children[u])
    f: dict[tuple[int, int], float] = {}
    choice: dict[tuple[int, int], dict[int, tuple[int, int]]] = {}
    for v in reversed(order):
        hv = model.entropy(v) * net.transmit_weight(v)
        for b in (0, 1):
            cost = b * hv
            picks: dict[int, tuple[int, int]] = {}
            feasible = True
            for c in sorted(children[v]):
                cond = model.cond_entropy(c, v)
                best = None
                for bc in (0, 1):
                    base = f[(c, bc)]
                    if b == 1 and (best is None or base + cond * dtab.to_bs(c) < best[0] - 1e-15):
                        best = (base + cond * dtab.to_bs(c), (bc, c))
                    if bc == 1 and (best is None or base + cond * dtab.to_bs(v) < best[0] - 1e-15):
                        best = (base + cond * dtab.to_bs(v), (bc, v))
                if best is None:
                    feasible = False
                    break
                cost += best[0]
                picks[c] = best[1]
            f[(v, b)] = cost if feasible else float("inf")
            choice[(v, b)] = picks
    sites: dict[int, int] = {}
    stack = [(tree.root, 1)]
    while stack:
        v, b = stack.pop()
        for c, (bc, site) in sorted(choice[(v, b)].items()):
            sites[c] = site
            stack.append((c, bc))
    recipients: dict[int, set[int]] = {}
    for c in sorted(tree.parent):
        sender = tree.parent[c] if sites[c] == c else c
        recipients.setdefault(sender, set()).add(sites[c])
    recipients.setdefault(tree.root, set()).add(net.bs)
    plans: dict[int, RawPlan] = {}
    for sender in sorted(recipients):
        bset = (sender,)
        if sender == tree.root and net.bs not in net.adj[sender]:
            _, chain = node_weighted_chain(net, sender, net.bs)
            bset = tuple(dict.fromkeys([sender] + chain[:-1]))
        plans[sender] = RawPlan(sender, frozenset(recipients[sender]), broadcasters=bset)
    return MovementScheme(plans, sites, WL)


def local_improve(scheme: MovementScheme, tree: CompressionTree, net: Network,
                  model: EntropyModel, cost_model: str = WL,
                  dtab: DistanceTable | None = None,
                  min_gain: float = 1e-12) -> tuple[CompressionTree, MovementScheme]:
    """Greedy local improvement: a candidate move makes one node v a raw
    broadcaster and re-parents any neighbors u to v whose conditional cost
    H(X_u|X_v) * d(u,bs) strictly improves.  The single best cost-reducing
    move is applied; repeat until no move helps.  Between moves the
    broadcast set and compression sites are re-optimized exactly on the
    fixed tree (a cost-only-decreasing re-planning pass).  Cost never
    increases and each applied move reduces it by at least ``min_gain``, so
    the loop terminates within |V|^2 moves."""
    if cost_model != WL:
        return tree, scheme  # the redundant-broadcast move set is WL-specific
    dtab = dtab or shortest_paths(net)
    sensors = list(net.sensors)
    parent = dict(tree.parent)
    sites = dict(scheme.sites)
    plans = {s: p for s, p in scheme.plans.items()}

    def replan() -> None:
        cur_tree = CompressionTree(tree.root, parent, sensors)
        cur = MovementScheme(dict(plans), dict(sites), WL)
        new = _replan_movement_wl(cur_tree, net, model, dtab)
        if new is None:
            return
        old_cost = eval_cost(cur, cur_tree, net, model, WL, dtab, check=False).total
        new_cost = eval_cost(new, cur_tree, net, model, WL, dtab, check=False).total
        if new_cost < old_cost - min_gain:
            plans.clear()
            plans.update(new.plans)
            sites.clear()
            sites.update(new.sites)

    replan()

    def cur_cond_cost(u: int) -> float:
        return model.cond_entropy(u, parent[u]) * dtab.to_bs(sites[u])

    def broadcasts(v: int) -> bool:
        p = plans.get(v)
        return bool(p and v in p.broadcasters)

    def is_ancestor(a: int, v: int) -> bool:
        # a is an ancestor of v in the current parent map
        cur = v
        while cur != tree.root:
            cur = parent[cur]
            if cur == a:
                return True
        return False

    for _ in range(len(sensors) ** 2):
        best = None  # (gain, v, [(u, new_cost), ...])
        for v in sensors:
            new_broadcast = 0.0 if broadcasts(v) else model.entropy(v) * net.transmit_weight(v)
            moves = []
            gain = -new_broadcast
            for u in net.adj[v]:
                if u == net.bs or u == tree.root or u == v:
                    continue
                if parent[u] == v:
                    continue
                if is_ancestor(u, v):
                    continue
                new_cost = model.cond_entropy(u, v) * dtab.to_bs(u)
                delta = cur_cond_cost(u) - new_cost
                if delta > 1e-15:
                    moves.append((u, new_cost))
                    gain += delta
            if moves and gain > min_gain and (best is None or gain > best[0] + 1e-15 or
                                              (abs(gain - best[0]) <= 1e-15 and v < best[1])):
                best = (gain, v, moves)
        if best is None:
            break
        _, v, moves = best
        if not broadcasts(v):
            old = plans.get(v)
            recipients = set(old.recipients) if old else set()
            recipients.update(net.adj[v])
            bset = (v,) if old is None else tuple(dict.fromkeys((v,) + tuple(old.broadcasters)))
            plans[v] = RawPlan(v, frozenset(recipients), broadcasters=bset)
        else:
            old = plans[v]
            plans[v] = RawPlan(v, frozenset(set(old.recipients) | set(net.adj[v])),
                               broadcasters=old.broadcasters, steiner_edges=old.steiner_edges)
        for u, _new in moves:
            parent[u] = v
            sites[u] = u
        replan()
    new_tree = CompressionTree(tree.root, parent, sensors)
    new_scheme = MovementScheme(plans, sites, scheme.cost_model)
    return new_tree, new_scheme
