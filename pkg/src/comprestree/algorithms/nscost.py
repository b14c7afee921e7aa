"""Treestar costs without the subgraph restriction, and the reductions that
turn Mce-Treestar into directed / group Steiner problems.

Under WL-NS the center's raw value travels through a minimum connected
relay set dominating the chosen contacts (every relay broadcasts once);
under Multicast-NS it travels along a minimum Steiner tree.  Both are
NP-hard subroutines; at desk scale they are solved exactly (the polynomial
approximation subroutines from prior work are out of scope), so these run
only on small instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..ctree import MULTICAST, WL
from ..entropy import EntropyModel
from ..netgraph import DistanceTable, Network, shortest_paths
from ..oracle import OracleBudget, DEFAULT_BUDGET, cds_exact, steiner_exact
from .treestar import Forest, TreeStar


class TooLarge(RuntimeError):
    """Instance exceeds the exact-solver budget."""


_COMBO_CAP = 50_000


def treestar_cost_wlns(net: Network, model: EntropyModel, dtab: DistanceTable,
                       center: int, leaves, budget: OracleBudget = DEFAULT_BUDGET) -> TreeStar:
    """Exact WL-NS treestar cost at a fixed center and leaf components:
    min over contacts v_j in T_j of
    Cds(center, {v_j}) * H(X_center) + sum H(X_vj|X_center) * d(vj, bs)."""
    leaves = [tuple(sorted(t)) for t in leaves]
    combos = 1
    for t in leaves:
        combos *= len(t)
    if combos > _COMBO_CAP or len(net.nodes) > budget.cds_universe_max:
        raise TooLarge(f"{combos} contact combinations / {len(net.nodes)} nodes")
    h_center = model.entropy(center)
    best = None
    for contacts in itertools.product(*leaves):
        relay_w, members = cds_exact(net, center, set(contacts), budget)
        ic = relay_w * h_center
        nc = sum(model.cond_entropy(v, center) * dtab.to_bs(v) for v in contacts)
        key = (ic + nc, contacts)
        if best is None or key < best[0]:
            best = (key, TreeStar(center=center,
                                  leaf_edges=tuple((center, v) for v in contacts),
                                  ic_part=ic, nc_part=nc,
                                  relay_nodes=tuple(sorted(members))))
    return best[1]


def treestar_cost_multicast(net: Network, model: EntropyModel, dtab: DistanceTable,
                            center: int, leaves, budget: OracleBudget = DEFAULT_BUDGET) -> TreeStar:
    """Exact Multicast-NS treestar cost: the raw value rides a minimum
    Steiner tree, Stn(center, {v_j}) * H(X_center) + the conditional terms."""
    leaves = [tuple(sorted(t)) for t in leaves]
    combos = 1
    for t in leaves:
        combos *= len(t)
    if combos > _COMBO_CAP:
        raise TooLarge(f"{combos} contact combinations")
    h_center = model.entropy(center)
    best = None
    for contacts in itertools.product(*leaves):
        terminals = sorted(set(contacts) | {center})
        weight, edges = steiner_exact(net, terminals, budget, dtab)
        ic = weight * h_center
        nc = sum(model.cond_entropy(v, center) * dtab.to_bs(v) for v in contacts)
        key = (ic + nc, contacts)
        if best is None or key < best[0]:
            best = (key, TreeStar(center=center,
                                  leaf_edges=tuple((center, v) for v in contacts),
                                  ic_part=ic, nc_part=nc,
                                  relay_edges=tuple(edges)))
    return best[1]


def _exact_ns_mce(cost_fn, max_components: int = 12):
    def mce(forest: Forest, net: Network, model: EntropyModel, dtab: DistanceTable) -> TreeStar:
        comps = forest.components()
        if len(net.sensors) > 20 or len(comps) - 1 > max_components:
            raise TooLarge("NS greedy is gated to small instances (exact subroutines)")
        best = None
        for r in forest.sensors:
            comp_r = forest.find(r)
            foreign = [c for c in comps if forest.find(next(iter(c))) != comp_r]
            for size in range(1, len(foreign) + 1):
                for subset in itertools.combinations(range(len(foreign)), size):
                    ts = cost_fn(net, model, dtab, r, [foreign[i] for i in subset])
                    key = (ts.ceff, ts.cost, r, ts.leaf_edges)
                    if best is None or key < best[0]:
                        best = (key, ts)
        if best is None:
            raise TooLarge("no candidate treestar")
        return best[1]
    return mce


def mce_treestar_wlns(forest: Forest, net: Network, model: EntropyModel,
                      dtab: DistanceTable) -> TreeStar:
    """Exact most cost-effective WL-NS treestar (exponential; desk scale)."""
    return _exact_ns_mce(treestar_cost_wlns)(forest, net, model, dtab)


def mce_treestar_multicast(forest: Forest, net: Network, model: EntropyModel,
                           dtab: DistanceTable) -> TreeStar:
    """Exact most cost-effective Multicast-NS treestar (exponential)."""
    return _exact_ns_mce(treestar_cost_multicast)(forest, net, model, dtab)


# --- reductions ----------------------------------------------------------------

@dataclass(frozen=True)
class DirectedSteinerInstance:
    """Directed edge-weighted instance whose min-weight tree rooted at
    ``root`` reaching any k terminals equals the min WL-NS treestar cost
    with k leaf-trees at the fixed center."""

    edges: dict          # (node, node) -> weight; nodes are opaque labels
    root: tuple
    terminals: tuple     # one per foreign component, index-aligned
    components: tuple    # the foreign components, index-aligned


@dataclass(frozen=True)
class GroupSteinerInstance:
    """Undirected group-Steiner instance whose min-density tree through
    ``root`` equals the best Multicast-NS treestar cost-effectiveness at the
    fixed center (density counts touched groups plus one for the center)."""

    adj: dict            # node -> {node: weight}
    root: tuple
    groups: tuple        # tuple of frozensets of companion nodes
    components: tuple


def reduce_to_directed_steiner(forest: Forest, net: Network, model: EntropyModel,
                               center: int, dtab: DistanceTable | None = None) -> DirectedSteinerInstance:
    """Per-center construction: every network node v becomes a relay gadget
    ("in",v) -> ("out",v) of weight w(v) * H(X_center); each sensor v in a
    foreign component gains a companion gadget of weight
    H(X_v|X_center) * d(v,bs) entered from the closed neighborhood of v;
    each foreign component j gains a terminal fed by its companions."""
    dtab = dtab or shortest_paths(net)
    h_center = model.entropy(center)
    comp_center = forest.find(center)
    foreign = [c for c in forest.components() if forest.find(next(iter(c))) != comp_center]
    edges: dict = {}
    for v in net.nodes:
        edges[(("in", v), ("out", v))] = net.transmit_weight(v) * h_center
    for u, v, _w in net.edges():
        edges[(("out", u), ("in", v))] = 0.0
        edges[(("out", v), ("in", u))] = 0.0
    for j, comp in enumerate(foreign):
        for v in sorted(comp):
            cw = model.cond_entropy(v, center) * dtab.to_bs(v)
            edges[(("cin", v), ("cout", v))] = cw
            for u in sorted(set(net.adj[v]) | {v}):
                edges[(("out", u), ("cin", v))] = 0.0
            edges[(("cout", v), ("term", j))] = 0.0
    return DirectedSteinerInstance(edges=edges, root=("in", center),
                                   terminals=tuple(("term", j) for j in range(len(foreign))),
                                   components=tuple(foreign))


def reduce_to_group_steiner(forest: Forest, net: Network, model: EntropyModel,
                            center: int, dtab: DistanceTable | None = None) -> GroupSteinerInstance:
    """Per-center construction: base edges keep their weight scaled by
    H(X_center) (one unit of raw data crossing them); every sensor v in a
    foreign component gains a pendant companion ("c",v) whose edge costs
    H(X_v|X_center) * d(v,bs); group j collects component j's companions."""
    dtab = dtab or shortest_paths(net)
    h_center = model.entropy(center)
    comp_center = forest.find(center)
    foreign = [c for c in forest.components() if forest.find(next(iter(c))) != comp_center]
    adj: dict = {("n", v): {} for v in net.nodes}
    for u, v, w in net.edges():
        adj[("n", u)][("n", v)] = w * h_center
        adj[("n", v)][("n", u)] = w * h_center
    groups = []
    for comp in foreign:
        members = []
        for v in sorted(comp):
            cv = ("c", v)
            w = model.cond_entropy(v, center) * dtab.to_bs(v)
            adj.setdefault(cv, {})[("n", v)] = w
            adj[("n", v)][cv] = w
            members.append(cv)
        groups.append(frozenset(members))
    return GroupSteinerInstance(adj=adj, root=("n", center), groups=tuple(groups),
                                components=tuple(foreign))
