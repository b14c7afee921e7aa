"""Reduction soundness and the NS-space treestar costs."""

import itertools
import math

import numpy as np
import pytest

import comprestree as ct
from comprestree.algorithms import (TooLarge, mce_treestar_multicast, mce_treestar_wlns,
                                    reduce_to_directed_steiner, reduce_to_group_steiner,
                                    treestar_cost_multicast, treestar_cost_wlns)
from comprestree.algorithms.treestar import Forest, greedy_treestar
from comprestree.ctree import MULTICAST, WL, eval_cost, validate
from comprestree.oracle import (directed_steiner_exact, group_steiner_min_density,
                                steiner_exact)

from conftest import random_model, random_net


def merged_forest(net, rng, merges):
    forest = Forest(net.sensors)
    sensors = list(net.sensors)
    for _ in range(merges):
        a, b = rng.choice(sensors, size=2, replace=False)
        ra, rb = forest.find(int(a)), forest.find(int(b))
        if ra != rb:
            forest._parent[rb] = ra
    return forest


def test_wlns_all_leaves_adjacent_reduces_to_wlsg(fig1_net, fig1_dtab):
    model = ct.UniformModel(list(fig1_net.sensors), 1.0, 0.1)
    ts = treestar_cost_wlns(fig1_net, model, fig1_dtab, 1, [{2}, {3}, {5}])
    # all contacts adjacent to the center: one broadcast suffices
    assert abs(ts.ic_part - 1.0) < 1e-12
    assert abs(ts.cost - 1.5) < 1e-12
    assert ts.relay_nodes == (1,)


def test_wlns_two_hop_relay_cost():
    # path r - a - b: Cds(r, {b}) = w(r) + w(a)
    net = ct.build_network([(0, 0, 0), (1, 1, 0), (2, 2, 0), (3, 3, 0)],
                           [(0, 1), (1, 2), (2, 3)], 0)
    model = ct.UniformModel([1, 2, 3], 1.0, 0.2)
    dtab = ct.shortest_paths(net)
    ts = treestar_cost_wlns(net, model, dtab, 1, [{3}])
    assert abs(ts.ic_part - 2.0) < 1e-12
    assert set(ts.relay_nodes) == {1, 2}


def test_multicast_triangle_single_terminal():
    net = ct.build_network([(0, 0, 0), (1, 1, 0), (2, 0.5, 1)],
                           [(0, 1, 1.0), (1, 2, 3.0), (0, 2, 1.5)], 0)
    model = ct.UniformModel([1, 2], 1.0, 0.2)
    dtab = ct.shortest_paths(net)
    ts = treestar_cost_multicast(net, model, dtab, 1, [{2}])
    assert abs(ts.ic_part - 2.5) < 1e-12  # cheapest route, not the direct edge


def test_too_large_guard():
    net = ct.gen_random(25, 100, 100, 50, seed=1)
    model = ct.UniformModel(list(net.sensors), 1.0, 0.1)
    dtab = ct.shortest_paths(net)
    with pytest.raises(TooLarge):
        treestar_cost_wlns(net, model, dtab, net.sensors[0], [set(net.sensors[1:])])


def brute_best_wlns_per_k(net, model, dtab, center, foreign):
    out = {}
    for k in range(1, len(foreign) + 1):
        best = math.inf
        for subset in itertools.combinations(range(len(foreign)), k):
            ts = treestar_cost_wlns(net, model, dtab, center, [foreign[i] for i in subset])
            best = min(best, ts.cost)
        out[k] = best
    return out


def test_directed_steiner_reduction_matches_treestars():
    rng = np.random.default_rng(60)
    for trial in range(6):
        net = random_net(rng, n_lo=4, n_hi=7)
        model = random_model(rng, net)
        dtab = ct.shortest_paths(net)
        forest = merged_forest(net, rng, int(rng.integers(0, 3)))
        center = int(sorted(net.sensors)[int(rng.integers(0, len(net.sensors)))])
        comp_center = forest.find(center)
        foreign = [c for c in forest.components() if forest.find(next(iter(c))) != comp_center]
        if not foreign:
            continue
        inst = reduce_to_directed_steiner(forest, net, model, center, dtab)
        per_k = directed_steiner_exact(inst.edges, inst.root, inst.terminals)
        want = brute_best_wlns_per_k(net, model, dtab, center, foreign)
        for k, w in want.items():
            assert abs(per_k[k] - w) < 1e-9, (trial, k, per_k[k], w)


def test_directed_steiner_one_foreign_component_one_terminal(fig1_net):
    model = ct.UniformModel(list(fig1_net.sensors), 1.0, 0.1)
    forest = Forest(fig1_net.sensors)
    # merge everything except node 4 into one component
    for v in (2, 3, 5):
        forest._parent[forest.find(v)] = forest.find(1)
    inst = reduce_to_directed_steiner(forest, fig1_net, model, 1)
    assert len(inst.terminals) == 1
    assert inst.components == (frozenset({4}),)


def test_directed_steiner_no_foreign_components(fig1_net):
    model = ct.UniformModel(list(fig1_net.sensors), 1.0, 0.1)
    forest = Forest(fig1_net.sensors)
    for v in (2, 3, 4, 5):
        forest._parent[forest.find(v)] = forest.find(1)
    inst = reduce_to_directed_steiner(forest, fig1_net, model, 1)
    assert inst.terminals == ()


def test_group_steiner_reduction_matches_ceff():
    rng = np.random.default_rng(61)
    for trial in range(6):
        net = random_net(rng, n_lo=4, n_hi=7)
        model = random_model(rng, net)
        dtab = ct.shortest_paths(net)
        forest = merged_forest(net, rng, int(rng.integers(0, 3)))
        center = int(sorted(net.sensors)[int(rng.integers(0, len(net.sensors)))])
        comp_center = forest.find(center)
        foreign = [c for c in forest.components() if forest.find(next(iter(c))) != comp_center]
        if not foreign:
            continue
        inst = reduce_to_group_steiner(forest, net, model, center, dtab)
        density, k, _w = group_steiner_min_density(inst.adj, inst.root, inst.groups)
        best_ceff = min(
            treestar_cost_multicast(net, model, dtab, center,
                                    [foreign[i] for i in subset]).ceff
            for kk in range(1, len(foreign) + 1)
            for subset in itertools.combinations(range(len(foreign)), kk))
        assert abs(density - best_ceff) < 1e-9, (trial, density, best_ceff)


def test_group_steiner_single_group_density(fig1_net, fig1_dtab):
    model = ct.UniformModel(list(fig1_net.sensors), 1.0, 0.1)
    forest = Forest(fig1_net.sensors)
    for v in (2, 3, 5):
        forest._parent[forest.find(v)] = forest.find(1)
    inst = reduce_to_group_steiner(forest, fig1_net, model, 1, fig1_dtab)
    assert len(inst.groups) == 1
    density, k, w = group_steiner_min_density(inst.adj, inst.root, inst.groups)
    ts = treestar_cost_multicast(fig1_net, model, fig1_dtab, 1, [{4}])
    assert abs(density - ts.ceff) < 1e-9


def test_group_steiner_shared_base_path():
    """Three groups reached through one long shared stem: the min-density
    tree pays the stem once and prefers taking all three groups."""
    # bs - 1 - 6 - 2, with leaves 3, 4, 5 hanging off node 2
    net = ct.build_network(
        [(0, 0, 0), (1, 1, 0), (6, 2, 0), (2, 3, 0), (3, 4, 0), (4, 4, 1), (5, 4, -1)],
        [(0, 1), (1, 6), (6, 2), (2, 3), (2, 4), (2, 5)], 0)
    model = ct.UniformModel(list(net.sensors), 1.0, 0.05)
    dtab = ct.shortest_paths(net)
    forest = Forest(net.sensors)
    forest._parent[forest.find(6)] = forest.find(1)
    forest._parent[forest.find(2)] = forest.find(1)
    inst = reduce_to_group_steiner(forest, net, model, 1, dtab)
    density, k, w = group_steiner_min_density(inst.adj, inst.root, inst.groups)
    ts = treestar_cost_multicast(net, model, dtab, 1, [{3}, {4}, {5}])
    assert k == 3
    assert abs(density - ts.ceff) < 1e-9
    # stem 1-6-2 plus the three last hops: 5 edges, not 3 * 3
    assert abs(ts.ic_part - 5.0) < 1e-12


def test_ns_greedy_runs_end_to_end():
    rng = np.random.default_rng(62)
    net = random_net(rng, n_lo=4, n_hi=6)
    model = random_model(rng, net)
    for mce, cm in ((mce_treestar_wlns, WL), (mce_treestar_multicast, MULTICAST)):
        run = greedy_treestar(net, model, cost_model=cm, mce=mce, improve=False)
        assert validate(run.scheme, run.tree, net).ok
        cb = eval_cost(run.scheme, run.tree, net, model, cm)
        assert cb.ic >= -1e-9
