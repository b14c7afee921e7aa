"""Independent brute-force and exact solvers.

Everything here exists to *check* the constructive algorithms: exhaustive
restricted/unrestricted optima, exact Steiner and connected-dominating-set
solvers, the approximation-bound report, and a per-transmission cost
simulation that re-derives scheme costs hop by hop.  None of it shares code
with the algorithms package (the one sanctioned overlap is ctree.eval_cost,
which the transmission simulation here cross-checks).

Solvers refuse inputs beyond their budget instead of degrading silently.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass

from .ctree import UNICAST, WL, CompressionTree, MovementScheme, RawPlan
from .entropy import EntropyModel
from .netgraph import DistanceTable, Network, shortest_paths


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    restricted_max: int = 8
    unrestricted_max: int = 5
    steiner_terminals_max: int = 12
    cds_universe_max: int = 20
    time_limit_s: float = 300.0


DEFAULT_BUDGET = OracleBudget()


class _Deadline:
    def __init__(self, seconds: float):
        self.t_end = time.monotonic() + seconds
        self.ticks = 0

    def check(self):
        self.ticks += 1
        if self.ticks % 4096 == 0 and time.monotonic() > self.t_end:
            raise BudgetExceeded("oracle time ceiling exceeded")


# --- per-transmission accounting ---------------------------------------------

def transmission_cost(scheme: MovementScheme, tree: CompressionTree, net: Network,
                      model: EntropyModel, cost_model: str | None = None,
                      dtab: DistanceTable | None = None) -> float:
    """Re-derive the scheme's total cost by simulating every single
    transmission (each broadcast, each hop of each unicast, each Steiner
    edge, each hop of each conditional's route) and summing bit costs."""
    cost_model = cost_model or scheme.cost_model
    dtab = dtab or shortest_paths(net)
    total = 0.0
    for src in sorted(scheme.plans):
        plan = scheme.plans[src]
        bits = model.entropy(src)
        targets = sorted(set(plan.recipients) - {src})
        if not targets:
            continue
        if cost_model == WL:
            senders = plan.broadcasters
            if not senders:
                senders = _canonical_relay(net, dtab, src, targets)
            for b in senders:
                total += bits * net.transmit_weight(b)
        elif cost_model == UNICAST:
            for t in targets:
                path = dtab.path(src, t)
                for k in range(len(path) - 1):
                    total += bits * net.weight(path[k], path[k + 1])
        else:  # MULTICAST
            edges = plan.steiner_edges
            if not edges:
                es = set()
                for t in targets:
                    path = dtab.path(src, t)
                    for k in range(len(path) - 1):
                        es.add(tuple(sorted((path[k], path[k + 1]))))
                edges = tuple(sorted(es))
            for u, v in edges:
                total += bits * net.weight(u, v)
    for p, c in tree.edges():
        if p == tree.root and tree.root not in net.sensors:
            continue
        bits = model.cond_entropy(c, p)
        path = dtab.path(scheme.sites[c], net.bs)
        for k in range(len(path) - 1):
            total += bits * net.weight(path[k], path[k + 1])
    return total


def _canonical_relay(net, dtab, src, targets):
    transmitters = {src}
    for t in targets:
        path = dtab.path(src, t)
        transmitters.update(path[:-1])
    return (src, *sorted(transmitters - {src}))


def _node_weighted_chain(net: Network, src: int, target: int) -> tuple[float, list[int]]:
    # independent re-implementation of the broadcast relay chain
    if src == target:
        return 0.0, [src]
    dist = {i: math.inf for i in net.nodes}
    prev: dict[int, int] = {}
    dist[src] = net.transmit_weight(src)
    heap = [(dist[src], src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u] + 1e-15:
            continue
        for v in sorted(net.adj[u]):
            nd = d + (net.transmit_weight(v) if v != target else 0.0)
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if dist[target] is math.inf:
        raise BudgetExceeded(f"no relay chain from {src} to {target}")
    path = [target]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return dist[target], path[::-1]


# --- spanning-tree enumeration ------------------------------------------------

def spanning_trees_sg(net: Network, deadline: _Deadline | None = None):
    """All spanning trees of the sensor subgraph, as lists of (u, v) edges."""
    sensors = list(net.sensors)
    ns = len(sensors)
    edges = [(u, v) for u, v, _ in net.edges() if u != net.bs and v != net.bs]
    if ns <= 1:
        yield []
        return
    for combo in itertools.combinations(edges, ns - 1):
        if deadline:
            deadline.check()
        parent = {s: s for s in sensors}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for u, v in combo:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            yield list(combo)


def spanning_trees_ns(sensors, deadline: _Deadline | None = None):
    """All labeled trees over the sensors via Prüfer sequences."""
    sensors = sorted(sensors)
    ns = len(sensors)
    if ns <= 1:
        yield []
        return
    if ns == 2:
        yield [(sensors[0], sensors[1])]
        return
    for seq in itertools.product(sensors, repeat=ns - 2):
        if deadline:
            deadline.check()
        yield _prufer_to_edges(sensors, seq)


def _prufer_to_edges(sensors, seq):
    degree = {s: 1 for s in sensors}
    for s in seq:
        degree[s] += 1
    edges = []
    heap = [s for s in sensors if degree[s] == 1]
    heapq.heapify(heap)
    for s in seq:
        leaf = heapq.heappop(heap)
        edges.append((min(leaf, s), max(leaf, s)))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(heap, s)
    u = heapq.heappop(heap)
    v = heapq.heappop(heap)
    edges.append((min(u, v), max(u, v)))
    return edges


# --- exact Steiner tree (Dreyfus-Wagner) --------------------------------------

def steiner_exact(net: Network, terminals, budget: OracleBudget = DEFAULT_BUDGET,
                  dtab: DistanceTable | None = None) -> tuple[float, list[tuple[int, int]]]:
    """Minimum Steiner tree weight (and an optimal edge set) connecting the
    terminals, via the classical terminal-subset dynamic program."""
    terminals = sorted(set(terminals))
    if len(terminals) > budget.steiner_terminals_max:
        raise BudgetExceeded(f"{len(terminals)} terminals exceed the budget")
    dtab = dtab or shortest_paths(net)
    if len(terminals) <= 1:
        return 0.0, []
    nodes = list(net.nodes)
    t0, rest = terminals[0], terminals[1:]
    k = len(rest)
    full = (1 << k) - 1
    INF = math.inf
    f = [dict.fromkeys(nodes, INF) for _ in range(full + 1)]
    back: list[dict] = [dict() for _ in range(full + 1)]
    for i, t in enumerate(rest):
        for v in nodes:
            f[1 << i][v] = dtab.d(t, v)
            back[1 << i][v] = ("leaf", t)
    for S in range(1, full + 1):
        fs = f[S]
        bs_ = back[S]
        sub = (S - 1) & S
        while sub:
            comp = S ^ sub
            if sub < comp:  # each split once
                fsub, fcomp = f[sub], f[comp]
                for v in nodes:
                    c = fsub[v] + fcomp[v]
                    if c < fs[v] - 1e-15:
                        fs[v] = c
                        bs_[v] = ("merge", sub, v)
            sub = (sub - 1) & S
        # relax through the metric closure
        order = sorted(nodes, key=lambda v: fs[v])
        for u in order:
            base = fs[u]
            if base is INF:
                continue
            for v in nodes:
                c = base + dtab.d(u, v)
                if c < fs[v] - 1e-15:
                    fs[v] = c
                    bs_[v] = ("move", u)
    weight = f[full][t0]

    edges: set[tuple[int, int]] = set()

    def expand(S, v):
        tag = back[S].get(v)
        if tag is None:
            return
        if tag[0] == "leaf":
            _add_path(edges, dtab.path(tag[1], v))
        elif tag[0] == "merge":
            expand(tag[1], v)
            expand(S ^ tag[1], v)
        else:
            _add_path(edges, dtab.path(tag[1], v))
            expand(S, tag[1])

    expand(full, t0)
    return weight, sorted(edges)


def _add_path(edges, path):
    for k in range(len(path) - 1):
        edges.add(tuple(sorted((path[k], path[k + 1]))))


# --- exact connected dominating relay set -------------------------------------

def cds_exact(net: Network, source: int, dominatees,
              budget: OracleBudget = DEFAULT_BUDGET) -> tuple[float, list[int]]:
    """Minimum total transmit weight of a connected node set containing
    ``source`` whose closed neighborhood covers every dominatee.  This is the
    exact cost of broadcasting one bit from ``source`` so that all the
    dominatees hear it."""
    nodes = list(net.nodes)
    n = len(nodes)
    if n > budget.cds_universe_max:
        raise BudgetExceeded(f"{n} nodes exceed the CDS budget")
    idx = {v: i for i, v in enumerate(nodes)}
    targets = set(dominatees) - {source}
    if not targets:
        return net.transmit_weight(source) if dominatees else 0.0, [source]
    nbr_mask = [0] * n
    for v in nodes:
        m = 1 << idx[v]
        for u in net.adj[v]:
            m |= 1 << idx[u]
        nbr_mask[idx[v]] = m
    target_mask = 0
    for t in targets:
        target_mask |= 1 << idx[t]
    src_bit = 1 << idx[source]
    weights = [net.transmit_weight(v) for v in nodes]
    best = (math.inf, None)
    deadline = _Deadline(budget.time_limit_s)
    for mask in range(1, 1 << n):
        if not mask & src_bit:
            continue
        deadline.check()
        cover = 0
        w = 0.0
        m = mask
        while m:
            b = m & -m
            i = b.bit_length() - 1
            cover |= nbr_mask[i]
            w += weights[i]
            m ^= b
        if cover & target_mask != target_mask or w >= best[0] - 1e-15:
            continue
        # connectivity of the mask
        reach = src_bit
        frontier = src_bit
        while frontier:
            new = 0
            f = frontier
            while f:
                b = f & -f
                new |= nbr_mask[b.bit_length() - 1]
                f ^= b
            new &= mask
            frontier = new & ~reach
            reach |= new
        if reach & mask == mask:
            members = [nodes[i] for i in range(n) if mask >> i & 1]
            best = (w, members)
    if best[1] is None:
        raise BudgetExceeded(f"no relay set from {source} covers {sorted(targets)}")
    return best


# --- restricted / unrestricted brute-force optima -----------------------------

@dataclass
class BruteResult:
    tree: CompressionTree
    scheme: MovementScheme
    cost: float


def brute_restricted_opt(net: Network, model: EntropyModel, cost_model: str = WL,
                         space: str = "SG", budget: OracleBudget = DEFAULT_BUDGET) -> BruteResult:
    """Exact optimum over all restricted solutions: every spanning tree of
    the admissible pair graph, every root, and (effectively) both
    compression-site choices per edge.  Under WL the per-edge site choices
    couple only through per-node broadcast indicators, which an exact tree DP
    optimizes; under unicast they are independent."""
    sensors = list(net.sensors)
    ns = len(sensors)
    if ns > budget.restricted_max:
        raise BudgetExceeded(f"{ns} sensors exceed the restricted-opt budget ({budget.restricted_max})")
    if space not in ("SG", "NS"):
        raise ValueError("space must be SG or NS")
    dtab = shortest_paths(net)
    deadline = _Deadline(budget.time_limit_s)
    H = {v: model.entropy(v) for v in sensors}
    d_bs = {v: dtab.to_bs(v) for v in sensors}
    cond = {(c, p): model.cond_entropy(c, p) for c in sensors for p in sensors if c != p}

    if ns == 1:
        only = sensors[0]
        tree = CompressionTree(only, {}, sensors)
        if cost_model == WL:
            w, chain = _node_weighted_chain(net, only, net.bs)
            plan = RawPlan(only, frozenset({net.bs}), broadcasters=tuple(chain[:-1]))
        else:
            plan = RawPlan(only, frozenset({net.bs}))
        scheme = MovementScheme({only: plan}, {}, cost_model)
        return BruteResult(tree, scheme, transmission_cost(scheme, tree, net, model, cost_model, dtab))

    if cost_model == UNICAST:
        # unicast is per-pair separable: trees over sensors + bs, rooted at bs
        return _brute_unicast(net, model, sensors, dtab, H, d_bs, cond, deadline)
    trees = spanning_trees_sg(net, deadline) if space == "SG" else spanning_trees_ns(sensors, deadline)
    if cost_model == WL and space == "SG":
        return _brute_wl_sg(net, model, sensors, trees, dtab, H, d_bs, cond, deadline)
    return _brute_sitewise(net, model, cost_model, sensors, trees, dtab, H, d_bs, cond, budget, deadline)


def _branch_costs(u, v, H, d_bs, cond, dtab):
    """The two restricted implementations of edge parent u -> child v."""
    move = dtab.d(u, v)
    b1 = H[u] * move + cond[(v, u)] * d_bs[v]   # raw parent value to child, compress at child
    b2 = H[v] * move + cond[(v, u)] * d_bs[u]   # raw child value to parent, compress at parent
    return b1, b2


def _brute_unicast(net, model, sensors, dtab, H, d_bs, cond, deadline):
    """Unicast restricted optimum: spanning trees over sensors + bs, rooted
    at the bs (its children are compression-tree roots), per-edge independent
    branch choice.  Totals are summed in ascending child order so they are
    float-identical to the arborescence construction's accounting."""
    best = (math.inf, None)
    for edges in spanning_trees_ns(list(sensors) + [net.bs], deadline):
        deadline.check()
        adj = {s: [] for s in list(sensors) + [net.bs]}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        parent = _orient(adj, net.bs)
        total = 0.0
        for c in sorted(parent):
            p = parent[c]
            if p == net.bs:
                total += H[c] * d_bs[c]
            else:
                b1, b2 = _branch_costs(p, c, H, d_bs, cond, dtab)
                total += min(b1, b2)
        if total < best[0] - 1e-15:
            best = (total, dict(parent))
    total, parent = best
    tree = CompressionTree(net.bs, parent, sensors)
    plans: dict[int, set[int]] = {}
    sites = {}
    for c in sorted(parent):
        p = parent[c]
        if p == net.bs:
            plans.setdefault(c, set()).add(net.bs)
            continue
        b1, b2 = _branch_costs(p, c, H, d_bs, cond, dtab)
        if b1 <= b2:
            plans.setdefault(p, set()).add(c)
            sites[c] = c
        else:
            plans.setdefault(c, set()).add(p)
            sites[c] = p
    scheme = MovementScheme({s: RawPlan(s, frozenset(r)) for s, r in sorted(plans.items())},
                            sites, UNICAST)
    return BruteResult(tree, scheme, total)


def _orient(adj, root):
    parent = {}
    stack = [root]
    seen = {root}
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                parent[v] = u
                stack.append(v)
    return parent


def _brute_wl_sg(net, model, sensors, trees, dtab, H, d_bs, cond, deadline):
    """Tree DP over broadcast indicators: site=child needs the parent to
    broadcast, site=parent needs the child to; one broadcast per node covers
    every adjacent need (SG keeps all tree edges network-adjacent)."""
    w = {v: net.transmit_weight(v) for v in sensors}
    chain_cost = {}
    chain_path = {}
    for v in sensors:
        chain_cost[v], chain_path[v] = _node_weighted_chain(net, v, net.bs)
    best = (math.inf, None, None, None)

    for edges in trees:
        deadline.check()
        adj = {s: [] for s in sensors}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        for root in sensors:
            parent = _orient(adj, root)
            children = {s: [] for s in sensors}
            for c, p in parent.items():
                children[p].append(c)
            order = [root]
            for u in order:
                order.extend(children[u])
            f = {}
            choice = {}
            for v in reversed(order):
                for b in (0, 1):
                    cost = b * H[v] * w[v]
                    picks = {}
                    feasible = True
                    for c in sorted(children[v]):
                        bestc = (math.inf, None)
                        for bc in (0, 1):
                            base = f[(c, bc)]
                            if b == 1:
                                cc = base + cond[(c, v)] * d_bs[c]
                                if cc < bestc[0] - 1e-15:
                                    bestc = (cc, (bc, c))
                            if bc == 1:
                                cc = base + cond[(c, v)] * d_bs[v]
                                if cc < bestc[0] - 1e-15:
                                    bestc = (cc, (bc, v))
                        if bestc[1] is None:
                            feasible = False
                            break
                        cost += bestc[0]
                        picks[c] = bestc[1]
                    f[(v, b)] = cost if feasible else math.inf
                    choice[(v, b)] = picks
            total = f[(root, 1)] + H[root] * (chain_cost[root] - w[root])
            if total < best[0] - 1e-15:
                best = (total, dict(parent), root, _extract_wl(choice, root))
    total, parent, root, sites = best
    tree = CompressionTree(root, parent, sensors)
    recipients: dict[int, set[int]] = {}
    for c in sorted(parent):
        s = parent[c] if sites[c] == c else c
        recipients.setdefault(s, set()).add(sites[c])
    recipients.setdefault(root, set()).add(net.bs)
    plans = {}
    for s in sorted(recipients):
        if s == root:
            chain = chain_path[root]
            bcast = tuple(dict.fromkeys([root] + chain[:-1]))
        else:
            bcast = (s,)
        plans[s] = RawPlan(s, frozenset(recipients[s]), broadcasters=bcast)
    scheme = MovementScheme(plans, sites, WL)
    return BruteResult(tree, scheme, total)


def _extract_wl(choice, root):
    sites = {}
    stack = [(root, 1)]
    while stack:
        v, b = stack.pop()
        for c, (bc, site) in sorted(choice[(v, b)].items()):
            sites[c] = site
            stack.append((c, bc))
    return sites


def _brute_sitewise(net, model, cost_model, sensors, trees, dtab, H, d_bs, cond, budget, deadline):
    """Generic restricted brute force for WL-NS / multicast: enumerate the
    site choice per edge; raw deliveries per node are costed exactly with
    memoized relay/Steiner solvers."""
    memo: dict[tuple[int, frozenset], float] = {}

    def delivery(v, rec: frozenset) -> float:
        rec = rec - {v}
        if not rec:
            return 0.0
        key = (v, rec)
        if key not in memo:
            if cost_model == WL:
                memo[key], _ = cds_exact(net, v, rec, budget)
            else:
                memo[key], _ = steiner_exact(net, sorted(rec | {v}), budget, dtab)
        return memo[key]

    best = (math.inf, None, None, None)
    for edges in trees:
        deadline.check()
        adj = {s: [] for s in sensors}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        for root in sensors:
            parent = _orient(adj, root)
            kids = sorted(parent)
            for bits in range(1 << len(kids)):
                deadline.check()
                rec: dict[int, set[int]] = {root: {net.bs}}
                sites = {}
                total = 0.0
                for k, c in enumerate(kids):
                    p = parent[c]
                    if bits >> k & 1:  # site at parent: child ships raw
                        sites[c] = p
                        rec.setdefault(c, set()).add(p)
                        total += cond[(c, p)] * d_bs[p]
                    else:
                        sites[c] = c
                        rec.setdefault(p, set()).add(c)
                        total += cond[(c, p)] * d_bs[c]
                for v in sorted(rec):
                    total += H[v] * delivery(v, frozenset(rec[v]))
                if total < best[0] - 1e-15:
                    best = (total, dict(parent), root, dict(sites))
    total, parent, root, sites = best
    tree = CompressionTree(root, parent, sensors)
    rec = {root: {net.bs}}
    for c, s in sites.items():
        src = parent[c] if s == c else c
        rec.setdefault(src, set()).add(s)
    plans = {}
    for s in sorted(rec):
        targets = frozenset(rec[s])
        if cost_model == WL:
            _, members = cds_exact(net, s, targets - {s}, budget)
            plans[s] = RawPlan(s, targets, broadcasters=tuple([s] + sorted(set(members) - {s})))
        else:
            _, stedges = steiner_exact(net, sorted(targets | {s}), budget, dtab)
            plans[s] = RawPlan(s, targets, steiner_edges=tuple(stedges))
    scheme = MovementScheme(plans, sites, cost_model)
    return BruteResult(tree, scheme, total)


def brute_unrestricted(net: Network, model: EntropyModel, cost_model: str = WL,
                       space: str = "NS", budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """Exact unrestricted optimum: compression sites may be *any* node.
    Only the cost is returned."""
    sensors = list(net.sensors)
    ns = len(sensors)
    if ns > budget.unrestricted_max:
        raise BudgetExceeded(f"{ns} sensors exceed the unrestricted budget ({budget.unrestricted_max})")
    dtab = shortest_paths(net)
    deadline = _Deadline(budget.time_limit_s)
    H = {v: model.entropy(v) for v in sensors}
    d_bs = {v: dtab.to_bs(v) for v in sensors}
    cond = {(c, p): model.cond_entropy(c, p) for c in sensors for p in sensors if c != p}
    all_nodes = list(net.nodes)

    memo: dict[tuple[int, frozenset], float] = {}

    def delivery(v, targets: frozenset) -> float:
        targets = targets - {v}
        if not targets:
            return 0.0
        key = (v, targets)
        if key not in memo:
            if cost_model == WL:
                memo[key], _ = cds_exact(net, v, targets, budget)
            elif cost_model == UNICAST:
                memo[key] = sum(dtab.d(v, t) for t in sorted(targets))
            else:
                memo[key], _ = steiner_exact(net, sorted(targets | {v}), budget, dtab)
        return memo[key]

    best = math.inf
    if cost_model == UNICAST:
        # same bs-rooted solution space as the restricted unicast optimum
        for edges in spanning_trees_ns(list(sensors) + [net.bs], deadline):
            adj = {s: [] for s in list(sensors) + [net.bs]}
            for u, v in edges:
                adj[u].append(v)
                adj[v].append(u)
            parent = _orient(adj, net.bs)
            kids = sorted(c for c, p in parent.items() if p != net.bs)
            base = sum(H[c] * d_bs[c] for c in sorted(parent) if parent[c] == net.bs)
            for site_combo in itertools.product(all_nodes, repeat=len(kids)):
                deadline.check()
                rec: dict[int, set[int]] = {}
                total = base
                for c, site in zip(kids, site_combo):
                    p = parent[c]
                    if site != p:
                        rec.setdefault(p, set()).add(site)
                    if site != c:
                        rec.setdefault(c, set()).add(site)
                    total += cond[(c, p)] * dtab.to_bs(site)
                for v in sorted(rec):
                    total += H[v] * delivery(v, frozenset(rec[v]))
                    if total >= best:
                        break
                if total < best:
                    best = total
        return best
    trees = spanning_trees_sg(net, deadline) if space == "SG" else spanning_trees_ns(sensors, deadline)
    for edges in trees:
        adj = {s: [] for s in sensors}
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        for root in sensors:
            parent = _orient(adj, root)
            kids = sorted(parent)
            for site_combo in itertools.product(all_nodes, repeat=len(kids)):
                deadline.check()
                rec: dict[int, set[int]] = {root: {net.bs}}
                cond_total = 0.0
                for c, site in zip(kids, site_combo):
                    p = parent[c]
                    if site != p:
                        rec.setdefault(p, set()).add(site)
                    if site != c:
                        rec.setdefault(c, set()).add(site)
                    cond_total += cond[(c, p)] * dtab.to_bs(site)
                total = cond_total
                for v in sorted(rec):
                    total += H[v] * delivery(v, frozenset(rec[v]))
                    if total >= best:
                        break
                if total < best:
                    best = total
    return best


# --- brute treestar enumeration (for Mce-Treestar checks) ---------------------

def brute_mce_treestar_wlsg(components, net: Network, model: EntropyModel,
                            dtab: DistanceTable | None = None):
    """Exhaustive most-cost-effective treestar over a forest state:
    every center, every subset of foreign components, every contact.
    Returns (ceff, cost, center, ((component_index, contact), ...))."""
    dtab = dtab or shortest_paths(net)
    comp_of = {}
    for ci, comp in enumerate(components):
        for v in comp:
            comp_of[v] = ci
    best = None
    for r in sorted(comp_of):
        h_r = model.entropy(r) * net.transmit_weight(r)
        per_comp: dict[int, tuple[float, int]] = {}
        for v in sorted(net.adj[r]):
            if v == net.bs or comp_of.get(v) is None or comp_of[v] == comp_of[r]:
                continue
            val = model.cond_entropy(v, r) * dtab.to_bs(v)
            cur = per_comp.get(comp_of[v])
            if cur is None or (val, v) < cur:
                per_comp[comp_of[v]] = (val, v)
        comps = sorted(per_comp)
        for size in range(1, len(comps) + 1):
            for subset in itertools.combinations(comps, size):
                # sum ascending (h, contact) to mirror the prefix accumulation
                cost = h_r
                for h, _v in sorted(per_comp[ci] for ci in subset):
                    cost += h
                ceff = cost / (size + 1)
                key = (ceff, cost, r, tuple(sorted((ci, per_comp[ci][1]) for ci in subset)))
                if best is None or key < best:
                    best = key
    return best


# --- minimum WCDS by subset enumeration ---------------------------------------

def brute_min_wcds(net: Network, budget: OracleBudget = DEFAULT_BUDGET) -> frozenset:
    """Smallest weakly connected dominating set of the sensor subgraph."""
    from .algorithms.wcds import is_wcds  # checker is definitional, not algorithmic
    sensors = list(net.sensors)
    if len(sensors) > 16:
        raise BudgetExceeded("brute WCDS limited to 16 sensors")
    deadline = _Deadline(budget.time_limit_s)
    for size in range(1, len(sensors) + 1):
        for combo in itertools.combinations(sensors, size):
            deadline.check()
            s = frozenset(combo)
            if is_wcds(net, s):
                return s
    raise BudgetExceeded("no WCDS found (sensor subgraph disconnected?)")


# --- generic directed-Steiner / group-Steiner solvers --------------------------
# These solve the instances produced by the Mce-Treestar reductions; node
# labels are opaque comparable objects.

def _generic_dijkstra(adj: dict, src):
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf) + 1e-15:
            continue
        for v, w in adj.get(u, {}).items():
            nd = d + w
            if nd < dist.get(v, math.inf) - 1e-15:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def directed_steiner_exact(edges: dict, root, terminals,
                           budget: OracleBudget = DEFAULT_BUDGET) -> dict[int, float]:
    """Min-weight directed tree rooted at ``root`` reaching any k terminals,
    for every k; returns {k: weight}.  Exact subset DP."""
    terminals = list(terminals)
    if len(terminals) > budget.steiner_terminals_max:
        raise BudgetExceeded(f"{len(terminals)} terminals exceed the budget")
    out_adj: dict = {}
    nodes = {root, *terminals}
    for (u, v), w in edges.items():
        out_adj.setdefault(u, {})
        if w < out_adj[u].get(v, math.inf):
            out_adj[u][v] = w
        nodes.add(u)
        nodes.add(v)
    nodes = sorted(nodes)
    dist = {v: _generic_dijkstra(out_adj, v) for v in nodes}
    kt = len(terminals)
    full = (1 << kt) - 1
    INF = math.inf
    f = [dict.fromkeys(nodes, INF) for _ in range(full + 1)]
    for i, t in enumerate(terminals):
        for v in nodes:
            f[1 << i][v] = dist[v].get(t, INF)
    for S in range(1, full + 1):
        fs = f[S]
        sub = (S - 1) & S
        while sub:
            comp = S ^ sub
            if sub < comp:
                fsub, fcomp = f[sub], f[comp]
                for v in nodes:
                    c = fsub[v] + fcomp[v]
                    if c < fs[v] - 1e-15:
                        fs[v] = c
            sub = (sub - 1) & S
        for v in nodes:
            dv = dist[v]
            best = fs[v]
            for u in nodes:
                du = dv.get(u, INF)
                if du is not INF and du + fs[u] < best - 1e-15:
                    best = du + fs[u]
            fs[v] = best
        # one relax round is not enough in general; iterate to fixpoint
        changed = True
        while changed:
            changed = False
            for v in nodes:
                dv = dist[v]
                for u in nodes:
                    c = dv.get(u, INF) + fs[u]
                    if c < fs[v] - 1e-12:
                        fs[v] = c
                        changed = True
    best_per_k: dict[int, float] = {}
    for S in range(1, full + 1):
        k = bin(S).count("1")
        val = f[S][root]
        if val < best_per_k.get(k, INF):
            best_per_k[k] = val
    return best_per_k


def group_steiner_min_density(adj: dict, root, groups,
                              budget: OracleBudget = DEFAULT_BUDGET
                              ) -> tuple[float, int, float]:
    """Min over nonempty group subsets S of
    steiner(root, touch-one-of-each-group in S) / (|S| + 1).
    Returns (density, best_k, best_tree_weight)."""
    groups = [sorted(g) for g in groups]
    if len(groups) > budget.steiner_terminals_max:
        raise BudgetExceeded(f"{len(groups)} groups exceed the budget")
    nodes = sorted(adj)
    dist = {v: _generic_dijkstra(adj, v) for v in nodes}
    kg = len(groups)
    full = (1 << kg) - 1
    INF = math.inf
    f = [dict.fromkeys(nodes, INF) for _ in range(full + 1)]
    for j, g in enumerate(groups):
        for v in nodes:
            f[1 << j][v] = min((dist[v].get(m, INF) for m in g), default=INF)
    for S in range(1, full + 1):
        fs = f[S]
        sub = (S - 1) & S
        while sub:
            comp = S ^ sub
            if sub < comp:
                fsub, fcomp = f[sub], f[comp]
                for v in nodes:
                    c = fsub[v] + fcomp[v]
                    if c < fs[v] - 1e-15:
                        fs[v] = c
            sub = (sub - 1) & S
        changed = True
        while changed:
            changed = False
            for v in nodes:
                dv = dist[v]
                for u in nodes:
                    c = dv.get(u, INF) + fs[u]
                    if c < fs[v] - 1e-12:
                        fs[v] = c
                        changed = True
    best = (math.inf, 0, math.inf)
    for S in range(1, full + 1):
        k = bin(S).count("1")
        w = f[S][root]
        density = w / (k + 1)
        if density < best[0] - 1e-15:
            best = (density, k, w)
    return best


# --- bound report --------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    ratio: float
    bound: float
    slack: float
    ok: bool


class BoundViolated(AssertionError):
    pass


def harmonic(n: int) -> float:
    return sum(1.0 / i for i in range(1, n + 1))


def check_bound(sol_cost: float, opt_cost: float, beta_value: float, n: int,
                alpha: float = 2.0, raise_on_violation: bool = False) -> BoundReport:
    """Greedy guarantee check: bound = 2*alpha*beta^2*H_n.  The WL-SG
    aggregate uses alpha=2 (exact Mce-Treestar times the restricted-form
    factor), i.e. the 4*beta^2*H_n guarantee."""
    if opt_cost <= 0:
        raise ValueError("opt_cost must be > 0")
    ratio = sol_cost / opt_cost
    bound = 2.0 * alpha * beta_value ** 2 * harmonic(n)
    report = BoundReport(ratio=ratio, bound=bound, slack=bound - ratio, ok=ratio <= bound + 1e-9)
    if raise_on_violation and not report.ok:
        raise BoundViolated(f"ratio {ratio:.4f} exceeds bound {bound:.4f}")
    return report
