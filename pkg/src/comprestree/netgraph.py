"""Communication-graph representation, generators, and shortest-path distances.

The network is an undirected, edge-weighted graph with a distinguished base
station node.  Edge weights are the cost of moving one bit across the link;
node transmit-weights are the cost of one local broadcast per bit.  Everything
here is immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


class NetworkError(ValueError):
    """Base class for network construction errors."""


class Disconnected(NetworkError):
    pass


class DuplicateEdge(NetworkError):
    pass


class NonpositiveWeight(NetworkError):
    pass


class CannotConnect(NetworkError):
    """A random layout could not be connected within the retry budget."""


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    w: float = 1.0  # transmit weight: cost per bit of one local broadcast


class Network:
    """Validated, immutable communication graph.

    ``sensors`` is every node except the base station, in ascending id order.
    ``adj[u]`` maps neighbor id -> edge weight.
    """

    def __init__(self, nodes: Sequence[Node], edges: Iterable[tuple[int, int, float]], bs: int):
        node_map: dict[int, Node] = {}
        for n in nodes:
            if n.id in node_map:
                raise NetworkError(f"duplicate node id {n.id}")
            if n.w <= 0:
                raise NonpositiveWeight(f"node {n.id} has transmit weight {n.w}")
            node_map[n.id] = n
        if not node_map:
            raise NetworkError("network needs at least one node")
        if bs not in node_map:
            raise NetworkError(f"base station {bs} is not among the nodes")

        adj: dict[int, dict[int, float]] = {i: {} for i in node_map}
        for u, v, w in edges:
            if u == v:
                raise NetworkError(f"self-loop at node {u}")
            if u not in node_map or v not in node_map:
                raise NetworkError(f"edge ({u},{v}) references unknown node")
            if w <= 0:
                raise NonpositiveWeight(f"edge ({u},{v}) has weight {w}")
            if v in adj[u]:
                raise DuplicateEdge(f"edge ({u},{v}) given twice")
            adj[u][v] = w
            adj[v][u] = w

        self.nodes: dict[int, Node] = dict(sorted(node_map.items()))
        self.adj: dict[int, dict[int, float]] = {i: dict(sorted(adj[i].items())) for i in self.nodes}
        self.bs: int = bs
        self.sensors: tuple[int, ...] = tuple(i for i in self.nodes if i != bs)
        self._check_connected()

    def _check_connected(self) -> None:
        seen = {self.bs}
        stack = [self.bs]
        while stack:
            u = stack.pop()
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != len(self.nodes):
            missing = sorted(set(self.nodes) - seen)
            raise Disconnected(f"nodes {missing} cannot reach the base station")

    def neighbors(self, u: int) -> tuple[int, ...]:
        return tuple(self.adj[u])

    def weight(self, u: int, v: int) -> float:
        return self.adj[u][v]

    def transmit_weight(self, u: int) -> float:
        return self.nodes[u].w

    def position(self, u: int) -> tuple[float, float]:
        n = self.nodes[u]
        return (n.x, n.y)

    def euclid(self, u: int, v: int) -> float:
        a, b = self.nodes[u], self.nodes[v]
        return math.hypot(a.x - b.x, a.y - b.y)

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for u, nbrs in self.adj.items():
            for v, w in nbrs.items():
                if u < v:
                    out.append((u, v, w))
        return out

    def __repr__(self) -> str:
        return f"Network(n={len(self.nodes)}, m={len(self.edges())}, bs={self.bs})"


def build_network(nodes, edges, bs: int) -> Network:
    """Validate raw node/edge tuples into a Network.

    ``nodes``: iterable of Node or (id, x, y[, w]) tuples.
    ``edges``: iterable of (u, v[, w]) tuples; weight defaults to 1.
    """
    norm_nodes = []
    for n in nodes:
        if isinstance(n, Node):
            norm_nodes.append(n)
        else:
            t = tuple(n)
            norm_nodes.append(Node(int(t[0]), float(t[1]), float(t[2]), float(t[3]) if len(t) > 3 else 1.0))
    norm_edges = []
    for e in edges:
        t = tuple(e)
        norm_edges.append((int(t[0]), int(t[1]), float(t[2]) if len(t) > 2 else 1.0))
    return Network(norm_nodes, norm_edges, bs)


class DistanceTable:
    """All-pairs shortest-path costs with deterministic path reconstruction.

    Ties between equal-cost paths are broken by always stepping to the
    lexicographically smallest next hop, so every downstream cost that
    depends on a concrete path is reproducible.
    """

    def __init__(self, net: Network):
        self._net = net
        ids = list(net.nodes)
        self._dist: dict[int, dict[int, float]] = {}
        for src in ids:
            self._dist[src] = _dijkstra(net, src)
        # successor(u, v): smallest-id neighbor w of u with d(u,v) == w(u,w) + d(w,v)
        self._succ: dict[tuple[int, int], int] = {}
        for u in ids:
            du = self._dist[u]
            for v in ids:
                if v == u or du[v] == math.inf:
                    continue
                best = None
                for w_id, w_edge in net.adj[u].items():
                    if abs(w_edge + self._dist[w_id][v] - du[v]) <= 1e-12:
                        best = w_id
                        break  # adjacency is id-sorted, first hit is smallest
                if best is None:  # fp slack fallback
                    best = min(net.adj[u], key=lambda w_id: (net.adj[u][w_id] + self._dist[w_id][v], w_id))
                self._succ[(u, v)] = best

    def d(self, u: int, v: int) -> float:
        return self._dist[u][v] if u != v else 0.0

    def to_bs(self, u: int) -> float:
        return self.d(u, self._net.bs)

    def successor(self, u: int, v: int) -> int:
        if u == v:
            return u
        return self._succ[(u, v)]

    def path(self, u: int, v: int) -> list[int]:
        """Node sequence from u to v (inclusive) along the canonical path."""
        out = [u]
        while out[-1] != v:
            out.append(self.successor(out[-1], v))
        return out


def _dijkstra(net: Network, src: int) -> dict[int, float]:
    dist = {i: math.inf for i in net.nodes}
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u] + 1e-15:
            continue
        for v, w in net.adj[u].items():
            nd = d + w
            if nd < dist[v] - 1e-15:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def shortest_paths(net: Network) -> DistanceTable:
    return DistanceTable(net)


_CORNERS = ("sw", "se", "nw", "ne")


def gen_grid(rows: int, cols: int, spacing: float = 1.0, link_radius: float | None = None,
             bs_corner: str = "sw") -> Network:
    """Uniform grid of rows*cols sensors plus a base station outside one corner.

    Sensors sit at lattice points; sensors are linked when their Euclidean
    distance is at most ``link_radius`` (default: exactly ``spacing``, i.e.
    orthogonal neighbors only).  The base station is a separate node placed
    one spacing beyond the chosen corner and linked to that corner sensor,
    so the full rows*cols grid carries attributes.
    """
    if rows < 1 or cols < 1:
        raise NetworkError("rows and cols must be >= 1")
    if spacing <= 0 or (link_radius is not None and link_radius <= 0):
        raise NonpositiveWeight("spacing and link_radius must be > 0")
    if bs_corner not in _CORNERS:
        raise NetworkError(f"bs_corner must be one of {_CORNERS}")
    radius = spacing if link_radius is None else link_radius

    nodes = []
    idx = {}
    nid = 0
    for r in range(rows):
        for c in range(cols):
            nodes.append(Node(nid, c * spacing, r * spacing, 1.0))
            idx[(r, c)] = nid
            nid += 1
    reach = int(radius / spacing + 1e-12)
    offsets = [(dr, dc) for dr in range(0, reach + 1) for dc in range(-reach, reach + 1)
               if (dr > 0 or dc > 0) and math.hypot(dr * spacing, dc * spacing) <= radius + 1e-12]
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = idx[(r, c)]
            for dr, dc in offsets:
                if (r + dr, c + dc) in idx:
                    edges.append((u, idx[(r + dr, c + dc)], 1.0))

    corner_rc = {"sw": (0, 0), "se": (0, cols - 1), "nw": (rows - 1, 0), "ne": (rows - 1, cols - 1)}[bs_corner]
    corner = idx[corner_rc]
    cx, cy = nodes[corner].x, nodes[corner].y
    # place the bs one spacing outward from the corner, along x
    direction = -1.0 if bs_corner in ("sw", "nw") else 1.0
    bs_id = nid
    nodes.append(Node(bs_id, cx + direction * spacing, cy, 1.0))
    edges.append((corner, bs_id, 1.0))
    try:
        return Network(nodes, edges, bs_id)
    except Disconnected as exc:
        raise Disconnected(f"link_radius {radius} < spacing {spacing} leaves the grid disconnected") from exc


def gen_random(count: int, width: float, height: float, link_radius: float, seed: int,
               max_retries: int = 200) -> Network:
    """Random geometric network: ``count`` nodes uniform in a width x height
    rectangle, edges where Euclidean distance is strictly below
    ``link_radius``.  Whole layouts are resampled until connected (no rescue
    edges).  The base station is the node nearest the lower-left corner --
    a convention, the underlying experiments never state its position.
    """
    if count < 1:
        raise NetworkError("count must be >= 1")
    if width <= 0 or height <= 0 or link_radius <= 0:
        raise NonpositiveWeight("dimensions and link_radius must be > 0")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        xs = rng.uniform(0.0, width, size=count)
        ys = rng.uniform(0.0, height, size=count)
        nodes = [Node(i, float(xs[i]), float(ys[i]), 1.0) for i in range(count)]
        edges = []
        for i in range(count):
            for j in range(i + 1, count):
                if math.hypot(xs[i] - xs[j], ys[i] - ys[j]) < link_radius:
                    edges.append((i, j, 1.0))
        bs = min(range(count), key=lambda i: (xs[i] ** 2 + ys[i] ** 2, i))
        try:
            return Network(nodes, edges, bs)
        except Disconnected:
            continue
    raise CannotConnect(f"no connected layout of {count} nodes within {max_retries} retries")


# --- JSON interface ----------------------------------------------------------
# {"bs": id, "nodes": [{"id":..,"x":..,"y":..,"w":..}], "edges": [{"u":..,"v":..,"w":..}]}

_NODE_KEYS = {"id", "x", "y", "w"}
_EDGE_KEYS = {"u", "v", "w"}


def net_to_json(net: Network) -> dict:
    return {
        "bs": net.bs,
        "nodes": [{"id": n.id, "x": n.x, "y": n.y, "w": n.w} for n in net.nodes.values()],
        "edges": [{"u": u, "v": v, "w": w} for u, v, w in net.edges()],
    }


def net_from_json(data: Mapping) -> Network:
    extra = set(data) - {"bs", "nodes", "edges"}
    if extra:
        raise NetworkError(f"unknown fields in network JSON: {sorted(extra)}")
    nodes = []
    for nd in data["nodes"]:
        bad = set(nd) - _NODE_KEYS
        if bad:
            raise NetworkError(f"unknown fields in node record: {sorted(bad)}")
        nodes.append(Node(int(nd["id"]), float(nd["x"]), float(nd["y"]), float(nd.get("w", 1.0))))
    edges = []
    for ed in data["edges"]:
        bad = set(ed) - _EDGE_KEYS
        if bad:
            raise NetworkError(f"unknown fields in edge record: {sorted(bad)}")
        edges.append((int(ed["u"]), int(ed["v"]), float(ed.get("w", 1.0))))
    return Network(nodes, edges, int(data["bs"]))


def save_network(net: Network, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(net_to_json(net), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_network(path: str) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return net_from_json(json.load(fh))
