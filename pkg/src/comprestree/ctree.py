"""Compression trees, movement schemes, validation, and NC/IC cost evaluation.

A compression tree says *which* pairwise conditional distributions are used:
each non-root sensor's value is entropy-coded given its parent's value.  A
movement scheme says *how* the operands physically meet: per-node raw
delivery plans (who receives X_i, and through which transmissions) and a
compression site per tree edge.  Costs decompose into necessary
communication (NC, intrinsic to the tree) and intra-source communication
(IC = total - NC, the price of gathering operands).

Cost models:

* WL        -- local broadcast; one transmission from v costs H * w(v) and
               reaches exactly N(v); receiving is free; multi-hop raw
               delivery chains broadcasts.
* MULTICAST -- a message to several receivers shares a Steiner tree.
* UNICAST   -- every delivery is a separate shortest-path transfer.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .entropy import EntropyModel
from .netgraph import DistanceTable, Network, shortest_paths

WL = "WL"
MULTICAST = "MULTICAST"
UNICAST = "UNICAST"
COST_MODELS = (WL, MULTICAST, UNICAST)


class SchemeError(ValueError):
    pass


class InconsistentOrientation(SchemeError):
    """A raw-data orientation leaves no endpoint holding both operands."""


class CompressionTree:
    """Rooted parent map over the sensor nodes.

    The root is normally a sensor whose raw value travels to the base
    station.  For unicast arborescences the root may be the base station
    itself, in which case its direct children ship their raw values.
    """

    def __init__(self, root: int, parent: Mapping[int, int], sensors: Iterable[int]):
        sensors = frozenset(sensors)
        parent = {int(c): int(p) for c, p in parent.items()}
        expect = sensors - {root} if root in sensors else sensors
        if set(parent) != expect:
            raise SchemeError("parent map must cover every non-root sensor exactly once")
        for c, p in parent.items():
            if p != root and p not in sensors:
                raise SchemeError(f"parent {p} of node {c} is not a sensor or the root")
        # acyclicity: walk each node to the root
        for start in parent:
            seen = {start}
            cur = start
            while cur != root:
                cur = parent[cur]
                if cur in seen:
                    raise SchemeError(f"cycle in parent map through node {cur}")
                seen.add(cur)
        self.root = root
        self.parent = dict(sorted(parent.items()))
        self.sensors = tuple(sorted(sensors))

    def edges(self) -> list[tuple[int, int]]:
        """(parent, child) pairs, ascending child id."""
        return [(p, c) for c, p in self.parent.items()]

    def children(self, u: int) -> list[int]:
        return [c for c, p in self.parent.items() if p == u]

    def subtree(self, u: int) -> set[int]:
        out = {u}
        frontier = [u]
        while frontier:
            nxt = []
            for v in frontier:
                for c in self.children(v):
                    if c not in out:
                        out.add(c)
                        nxt.append(c)
            frontier = nxt
        return out

    def is_subgraph_of(self, net: Network) -> bool:
        """True when every parent-child pair is network-adjacent (the SG
        restriction); virtual edges from a bs root are exempt."""
        for p, c in self.edges():
            if p == self.root and p not in net.sensors:
                continue
            if c not in net.adj[p]:
                return False
        return True

    def __repr__(self) -> str:
        return f"CompressionTree(root={self.root}, n={len(self.sensors)})"


class ExtendedCompressionTree:
    """Spanning tree over the sensors where every edge carries the raw-data
    orientation (sender -> receiver).  Senders may also carry realization
    hints: the transmitting relay set (WL) or Steiner edges (multicast)
    accumulated while the tree was grown."""

    def __init__(self, sensors: Iterable[int], directed_edges: Iterable[tuple[int, int]],
                 relays: Mapping[int, tuple] | None = None):
        self.sensors = tuple(sorted(set(sensors)))
        self.directed_edges = tuple((int(a), int(b)) for a, b in directed_edges)
        self.relays = {int(k): tuple(v) for k, v in (relays or {}).items()}
        adj: dict[int, set[int]] = {s: set() for s in self.sensors}
        for a, b in self.directed_edges:
            if a not in adj or b not in adj:
                raise SchemeError(f"edge ({a},{b}) references a non-sensor node")
            if b in adj[a]:
                raise SchemeError(f"duplicate tree edge ({a},{b})")
            adj[a].add(b)
            adj[b].add(a)
        if len(self.directed_edges) != max(len(self.sensors) - 1, 0):
            raise SchemeError("an extended compression tree needs exactly n-1 edges")
        # connectivity
        if self.sensors:
            seen = {self.sensors[0]}
            stack = [self.sensors[0]]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            if len(seen) != len(self.sensors):
                raise SchemeError("extended compression tree is not connected")
        self._adj = {u: tuple(sorted(vs)) for u, vs in adj.items()}
        self.sender = {tuple(sorted((a, b))): a for a, b in self.directed_edges}

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def sender_of(self, u: int, v: int) -> int:
        return self.sender[tuple(sorted((u, v)))]


@dataclass(frozen=True)
class RawPlan:
    """Raw delivery of X_src to ``recipients`` with an optional realization."""

    src: int
    recipients: frozenset
    broadcasters: tuple = ()          # WL: transmitting nodes, src first
    steiner_edges: tuple = ()         # MULTICAST: edges of the shared tree


@dataclass
class MovementScheme:
    plans: dict[int, RawPlan]
    sites: dict[int, int]             # child -> compression site, per tree edge
    cost_model: str = WL

    def plan(self, src: int) -> RawPlan | None:
        return self.plans.get(src)

    def delivered(self, src: int) -> frozenset:
        p = self.plans.get(src)
        return p.recipients if p else frozenset()


@dataclass(frozen=True)
class CostBreakdown:
    total: float
    nc: float
    ic: float
    cost_model: str

    def __post_init__(self):
        if self.ic < -1e-9:
            raise SchemeError(f"negative IC ({self.ic}): scheme accounting is inconsistent")


@dataclass(frozen=True)
class Violation:
    kind: str          # OrphanEdge | UndeliveredOperand | UndecodableNode
    where: tuple
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def node_weighted_chain(net: Network, src: int, target: int) -> tuple[float, list[int]]:
    """Cheapest broadcast relay chain delivering one bit from src to target.

    Every node on the path except the target transmits once; the cost is the
    sum of their transmit weights.  Ties break toward smaller node ids.
    """
    if src == target:
        return 0.0, [src]
    best: dict[int, float] = {i: math.inf for i in net.nodes}
    best_path: dict[int, tuple] = {}
    start_cost = net.transmit_weight(src)
    best[src] = start_cost
    best_path[src] = (src,)
    heap = [(start_cost, (src,), src)]
    while heap:
        cost, path, u = heapq.heappop(heap)
        if cost > best[u] + 1e-15:
            continue
        if u == target:
            return cost, list(path)
        for v in sorted(net.adj[u]):
            ncost = cost + (net.transmit_weight(v) if v != target else 0.0)
            if ncost < best[v] - 1e-15:
                best[v] = ncost
                best_path[v] = path + (v,)
                heapq.heappush(heap, (ncost, path + (v,), v))
    raise SchemeError(f"no path from {src} to {target}")


def _broadcast_coverage(net: Network, broadcasters: Iterable[int]) -> set[int]:
    cov = set()
    for b in broadcasters:
        cov.add(b)
        cov.update(net.adj[b])
    return cov


def _derive_broadcasters(net: Network, dtab: DistanceTable, src: int, recipients) -> tuple[int, ...]:
    """Canonical WL realization: transmitters along the union of canonical
    shortest paths from src to each recipient."""
    outside = [t for t in recipients if t not in net.adj[src] and t != src]
    if not outside:
        return (src,) if recipients else ()
    transmitters = {src}
    for t in sorted(recipients):
        if t == src:
            continue
        path = dtab.path(src, t)
        transmitters.update(path[:-1])
    # deterministic order: src first, then ascending
    rest = sorted(transmitters - {src})
    return (src, *rest)


def _path_edges(path: list[int]) -> list[tuple[int, int]]:
    return [tuple(sorted((path[k], path[k + 1]))) for k in range(len(path) - 1)]


def _delivery_cost(net: Network, dtab: DistanceTable, plan: RawPlan, cost_model: str) -> float:
    """Cost multiplier (per bit) of realizing ``plan`` under ``cost_model``."""
    rec = set(plan.recipients) - {plan.src}
    if not rec:
        return 0.0
    if cost_model == WL:
        bset = plan.broadcasters or _derive_broadcasters(net, dtab, plan.src, rec)
        return sum(net.transmit_weight(b) for b in bset)
    if cost_model == UNICAST:
        return sum(dtab.d(plan.src, t) for t in sorted(rec))
    if cost_model == MULTICAST:
        if plan.steiner_edges:
            return sum(net.weight(u, v) for u, v in plan.steiner_edges)
        edges = set()
        for t in sorted(rec):
            edges.update(_path_edges(dtab.path(plan.src, t)))
        return sum(net.weight(u, v) for u, v in edges)
    raise SchemeError(f"unknown cost model {cost_model!r}")


def _reception_count(net: Network, dtab: DistanceTable, plan: RawPlan, cost_model: str) -> int:
    rec = set(plan.recipients) - {plan.src}
    if not rec:
        return 0
    if cost_model == WL:
        bset = plan.broadcasters or _derive_broadcasters(net, dtab, plan.src, rec)
        return sum(len(net.adj[b]) for b in bset)
    if cost_model == UNICAST:
        return sum(len(dtab.path(plan.src, t)) - 1 for t in sorted(rec))
    edges = plan.steiner_edges or ()
    if not edges:
        es = set()
        for t in sorted(rec):
            es.update(_path_edges(dtab.path(plan.src, t)))
        edges = tuple(es)
    return len(edges)


def validate(scheme: MovementScheme, tree: CompressionTree, net: Network,
             dtab: DistanceTable | None = None) -> ValidationReport:
    """Check every movement-scheme invariant, including decodability by
    explicit fixpoint: the base station starts knowing nothing, learns the
    root once its raw value arrives, and learns each child once its parent
    is known and the child's conditional was computed at a site holding both
    operands.  All sensors must become decodable."""
    dtab = dtab or shortest_paths(net)
    report = ValidationReport()
    nodes = set(net.nodes)
    sensors = set(net.sensors)

    for src, plan in scheme.plans.items():
        if src not in nodes or not set(plan.recipients) <= nodes:
            report.violations.append(Violation("OrphanEdge", (src,), "plan references unknown nodes"))
            continue
        rec = set(plan.recipients) - {src}
        if scheme.cost_model == WL and plan.broadcasters:
            if plan.broadcasters[0] != src:
                report.violations.append(Violation("UndeliveredOperand", (src,),
                                                   "broadcast chain must start at the source"))
            heard = {src}
            ok_chain = True
            for b in plan.broadcasters:
                if b not in heard:
                    ok_chain = False
                heard.update(net.adj[b])
            if not ok_chain:
                report.violations.append(Violation("UndeliveredOperand", (src,),
                                                   "a relay transmits data it never received"))
            cov = _broadcast_coverage(net, plan.broadcasters)
            missing = rec - cov
            if missing:
                report.violations.append(Violation("UndeliveredOperand", (src,),
                                                   f"broadcast never reaches {sorted(missing)}"))
        if scheme.cost_model == MULTICAST and plan.steiner_edges:
            reach = {src}
            edges = [tuple(e) for e in plan.steiner_edges]
            for u, v in edges:
                if v not in net.adj.get(u, {}):
                    report.violations.append(Violation("OrphanEdge", (u, v), "steiner edge not in network"))
            grew = True
            while grew:
                grew = False
                for u, v in edges:
                    if (u in reach) != (v in reach):
                        reach.update((u, v))
                        grew = True
            missing = rec - reach
            if missing:
                report.violations.append(Violation("UndeliveredOperand", (src,),
                                                   f"steiner tree never reaches {sorted(missing)}"))

    tree_children = set(tree.parent)
    for child in scheme.sites:
        if child not in tree_children:
            report.violations.append(Violation("OrphanEdge", (child,), "site for a non-edge"))
    operands_ok: dict[int, bool] = {}
    for p, c in tree.edges():
        if p == tree.root and tree.root not in sensors:
            # bs-parented child ships its raw value; no conditional site needed
            operands_ok[c] = True
            continue
        site = scheme.sites.get(c)
        if site is None:
            report.violations.append(Violation("OrphanEdge", (p, c), "edge has no compression site"))
            operands_ok[c] = False
            continue
        has_parent_val = site == p or site in scheme.delivered(p)
        has_child_val = site == c or site in scheme.delivered(c)
        if not (has_parent_val and has_child_val):
            which = [] if has_parent_val else [f"X{p}"]
            which += [] if has_child_val else [f"X{c}"]
            report.violations.append(Violation("UndeliveredOperand", (p, c),
                                               f"site {site} never receives {'+'.join(which)}"))
        operands_ok[c] = has_parent_val and has_child_val

    # decodability fixpoint
    known: set[int] = set()
    if tree.root in sensors:
        if net.bs in scheme.delivered(tree.root):
            known.add(tree.root)
    changed = True
    while changed:
        changed = False
        for p, c in tree.edges():
            if c in known:
                continue
            if p == tree.root and tree.root not in sensors:
                if net.bs in scheme.delivered(c):
                    known.add(c)
                    changed = True
            elif p in known and operands_ok.get(c, False):
                known.add(c)
                changed = True
    undecodable = sorted(set(tree.sensors) - known)
    for u in undecodable:
        report.violations.append(Violation("UndecodableNode", (u,),
                                           "base station can never reconstruct this value"))
    return report


def eval_cost(scheme: MovementScheme, tree: CompressionTree, net: Network, model: EntropyModel,
              cost_model: str | None = None, dtab: DistanceTable | None = None,
              rx_cost: float = 0.0, check: bool = True) -> CostBreakdown:
    """Total/NC/IC of a validated scheme.

    total = sum_i H(X_i) * c(T_i)  +  sum_edges H(X_i|X_p(i)) * d(site, bs)
    nc    = H(X_root) * d(root, bs) + sum_edges H(X_i|X_p(i)) * d(i, bs)

    NC always books the child's own distance even when the conditional is
    computed elsewhere; the difference lands in IC.
    """
    cost_model = cost_model or scheme.cost_model
    if cost_model not in COST_MODELS:
        raise SchemeError(f"unknown cost model {cost_model!r}")
    dtab = dtab or shortest_paths(net)
    if check:
        report = validate(scheme, tree, net, dtab)
        if not report.ok:
            first = report.violations[0]
            raise SchemeError(f"invalid scheme: {first.kind} at {first.where}: {first.detail}")

    sensors = set(net.sensors)
    total = 0.0
    for src in sorted(scheme.plans):
        plan = scheme.plans[src]
        h = model.entropy(src)
        total += h * _delivery_cost(net, dtab, plan, cost_model)
        if rx_cost:
            total += h * rx_cost * _reception_count(net, dtab, plan, cost_model)

    nc = 0.0
    if tree.root in sensors:
        nc += model.entropy(tree.root) * dtab.to_bs(tree.root)
    for p, c in tree.edges():
        if p == tree.root and tree.root not in sensors:
            nc += model.entropy(c) * dtab.to_bs(c)
            continue
        cond = model.cond_entropy(c, p)
        site = scheme.sites[c]
        route = dtab.to_bs(site)
        total += cond * route
        if rx_cost:
            total += cond * rx_cost * (len(dtab.path(site, net.bs)) - 1)
        nc += cond * dtab.to_bs(c)
    return CostBreakdown(total=total, nc=nc, ic=total - nc, cost_model=cost_model)


def select_root(ext: ExtendedCompressionTree, net: Network, dtab: DistanceTable,
                model: EntropyModel, cost_model: str) -> int:
    """Root choice for converting an extended tree (a convention: the
    framework never names one).  Prefer nodes whose raw transmission already
    reaches the base station; among candidates take argmin H(X_r)*d(r,bs),
    ties by node id."""
    senders = sorted({a for a, _ in ext.directed_edges})
    candidates = []
    if cost_model == WL:
        for s in senders:
            cov = _broadcast_coverage(net, ext.relays.get(s, (s,)))
            if net.bs in cov:
                candidates.append(s)
    if not candidates:
        candidates = list(ext.sensors)
    return min(candidates, key=lambda r: (model.entropy(r) * dtab.to_bs(r), r))


def scheme_from_extended(ext: ExtendedCompressionTree, net: Network, model: EntropyModel,
                         cost_model: str = WL, dtab: DistanceTable | None = None,
                         root: int | None = None) -> tuple[CompressionTree, MovementScheme]:
    """Turn raw-movement orientations into a restricted movement scheme.

    For a tree edge with parent i and child j: if the raw data moved i -> j
    the conditional X_j|X_i is computed at j; if it moved j -> i (the child
    became the parent later) the former receiver i computes X_j|X_i instead.
    Either way the compression site is the endpoint that received the raw
    operand, so the scheme stays restricted.
    """
    dtab = dtab or shortest_paths(net)
    if root is None:
        root = select_root(ext, net, dtab, model, cost_model)
    if root not in ext.sensors:
        raise SchemeError(f"root {root} is not a sensor in the tree")

    # orient the tree away from the chosen root
    parent: dict[int, int] = {}
    order = [root]
    seen = {root}
    for u in order:
        for v in ext.neighbors(u):
            if v not in seen:
                seen.add(v)
                parent[v] = u
                order.append(v)
    tree = CompressionTree(root, parent, ext.sensors)

    recipients: dict[int, set[int]] = {}
    sites: dict[int, int] = {}
    for c, p in parent.items():
        s = ext.sender_of(p, c)
        r = c if s == p else p
        if cost_model == WL and not ext.relays.get(s) and r not in net.adj[s]:
            raise InconsistentOrientation(
                f"edge ({p},{c}): a single broadcast from {s} cannot reach {r}")
        recipients.setdefault(s, set()).add(r)
        sites[c] = r

    plans: dict[int, RawPlan] = {}
    for s in sorted(recipients):
        rec = recipients[s]
        bset: tuple = ()
        sedges: tuple = ()
        if cost_model == WL:
            bset = ext.relays.get(s) or (s,)
        elif cost_model == MULTICAST:
            sedges = tuple(ext.relays.get(s, ()))
        if s == root:
            rec = rec | {net.bs}
            if cost_model == WL and net.bs not in _broadcast_coverage(net, bset):
                _, chain = node_weighted_chain(net, root, net.bs)
                bset = tuple(dict.fromkeys(list(bset) + chain[:-1]))
            elif cost_model == MULTICAST:
                covered = {root}
                for u, v in sedges:
                    covered.update((u, v))
                if net.bs not in covered:
                    hook = min(covered, key=lambda u: (dtab.to_bs(u), u))
                    extra = set(sedges)
                    path = dtab.path(hook, net.bs)
                    for k in range(len(path) - 1):
                        extra.add(tuple(sorted((path[k], path[k + 1]))))
                    sedges = tuple(sorted(extra))
        plans[s] = RawPlan(src=s, recipients=frozenset(rec),
                           broadcasters=bset, steiner_edges=sedges)
    if root not in plans:
        rec = {net.bs}
        bset: tuple = ()
        if cost_model == WL:
            _, chain = node_weighted_chain(net, root, net.bs)
            bset = tuple(chain[:-1])
        plans[root] = RawPlan(src=root, recipients=frozenset(rec), broadcasters=bset)
    return tree, MovementScheme(plans=plans, sites=sites, cost_model=cost_model)


# --- fixture JSON ------------------------------------------------------------
# {"root": id, "parent": {"child": parent}, "orient": [{"u": sender, "v": receiver}],
#  "sites": {"child": site}}

def scheme_to_json(tree: CompressionTree, scheme: MovementScheme) -> dict:
    # orientation is recoverable from sites: the site received the other operand
    orient = []
    for p, c in tree.edges():
        if c in scheme.sites:
            site = scheme.sites[c]
            sender = p if site == c else c
            orient.append({"u": sender, "v": site})
    return {
        "root": tree.root,
        "parent": {str(c): p for c, p in tree.parent.items()},
        "orient": orient,
        "sites": {str(c): s for c, s in scheme.sites.items()},
    }


def scheme_from_json(data: Mapping, net: Network, cost_model: str = WL) -> tuple[CompressionTree, MovementScheme]:
    extra = set(data) - {"root", "parent", "orient", "sites"}
    if extra:
        raise SchemeError(f"unknown fields in scheme JSON: {sorted(extra)}")
    root = int(data["root"])
    parent = {int(c): int(p) for c, p in data["parent"].items()}
    sensors = set(parent) | {root} if root != net.bs else set(parent)
    tree = CompressionTree(root, parent, sensors)
    sites = {int(c): int(s) for c, s in data.get("sites", {}).items()}
    recipients: dict[int, set[int]] = {}
    for rec in data.get("orient", []):
        recipients.setdefault(int(rec["u"]), set()).add(int(rec["v"]))
    if root in net.sensors:
        recipients.setdefault(root, set()).add(net.bs)
    dtab = shortest_paths(net)
    plans = {}
    for s, rec in sorted(recipients.items()):
        bset = _derive_broadcasters(net, dtab, s, rec) if cost_model == WL else ()
        plans[s] = RawPlan(src=s, recipients=frozenset(rec), broadcasters=bset)
    return tree, MovementScheme(plans=plans, sites=sites, cost_model=cost_model)
