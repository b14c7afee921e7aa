import numpy as np
import pytest

import comprestree as ct
from comprestree.algorithms import InvalidWCDS, is_wcds, tree_from_wcds, wcds_greedy
from comprestree.ctree import eval_cost, validate
from comprestree.oracle import brute_min_wcds

from conftest import random_net, uniform_model


def test_greedy_on_fig1(fig1_net):
    assert wcds_greedy(fig1_net) == frozenset({1, 3})


def test_brute_confirms_fig1_minimum(fig1_net):
    assert len(brute_min_wcds(fig1_net)) == 2


def test_greedy_on_fig10(fig10_net):
    s = wcds_greedy(fig10_net)
    assert s == frozenset({3, 4, 9, 10})
    assert is_wcds(fig10_net, s)
    assert len(brute_min_wcds(fig10_net)) == 4


def test_complete_graph_single_vertex():
    nodes = [(i, float(i), 0.0) for i in range(5)]
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    net = ct.build_network(nodes, edges, bs=0)
    s = wcds_greedy(net)
    assert len(s) == 1
    assert is_wcds(net, s)


def test_greedy_always_valid_on_random_graphs():
    rng = np.random.default_rng(100)
    for _ in range(25):
        net = random_net(rng, n_lo=4, n_hi=14)
        s = wcds_greedy(net)
        assert is_wcds(net, s), f"greedy WCDS invalid on {net}"


def test_tree_from_wcds_reproduces_reference_cost(fig1_net):
    """With both endpoints of the (1,3) edge broadcasting, the conditional
    is computed at the endpoint nearer the base station, matching the
    reference 2+7eps total."""
    model = uniform_model(fig1_net, eps=0.1)
    tree, scheme = tree_from_wcds(fig1_net, {1, 3}, model)
    assert validate(scheme, tree, fig1_net).ok
    cb = eval_cost(scheme, tree, fig1_net, model)
    assert abs(cb.total - 2.7) < 1e-9
    assert scheme.sites[3] == 1


def test_tree_from_wcds_fig10_shape(fig10_net, fig10_model):
    tree, scheme = tree_from_wcds(fig10_net, {3, 4, 9, 10}, fig10_model)
    assert tree.root == 4
    assert tree.parent[5] == 4        # node 5 parented to 4
    assert scheme.sites[3] == 1       # X3|X1 computed at node 1
    assert scheme.sites[5] == 5       # X5|X4 computed at node 5
    assert validate(scheme, tree, fig10_net).ok


def test_tree_from_wcds_all_nodes(fig1_net):
    model = uniform_model(fig1_net, eps=0.1)
    s = set(fig1_net.sensors)
    tree, scheme = tree_from_wcds(fig1_net, s, model)
    cb = eval_cost(scheme, tree, fig1_net, model)
    # every node broadcasts; conditionals ride from the cheaper endpoint
    assert cb.total <= 5 + 0.1 * 8 + 1e-9
    assert abs(cb.nc - 1.8) < 1e-9


def test_tree_from_wcds_rejects_invalid(fig1_net):
    model = uniform_model(fig1_net)
    with pytest.raises(InvalidWCDS):
        tree_from_wcds(fig1_net, {2}, model)
    with pytest.raises(InvalidWCDS):
        tree_from_wcds(fig1_net, {1}, model)  # {1} does not dominate 4


def test_tree_from_wcds_valid_on_random(fig1_net):
    rng = np.random.default_rng(7)
    for _ in range(10):
        net = random_net(rng, n_lo=4, n_hi=10)
        model = ct.RainfallModel.for_network(net, 1.0, float(rng.uniform(20, 300)))
        s = wcds_greedy(net)
        tree, scheme = tree_from_wcds(net, s, model)
        assert validate(scheme, tree, net).ok
        # every WCDS member performs a local broadcast
        for b in s:
            assert b in scheme.plans and b in scheme.plans[b].broadcasters
