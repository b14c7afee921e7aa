import math

import numpy as np
import pytest

import comprestree as ct
from comprestree.algorithms import minimum_arborescence, unicast_arborescence, ind_cost
from comprestree.ctree import eval_cost, validate
from comprestree.oracle import brute_restricted_opt, transmission_cost

from conftest import random_matrix_model, random_net


def test_two_sensor_example():
    """bs at distance 1 from a and 2 from b, a-b adjacent: the optimum
    chains bs -> a -> b with the child shipping raw to its parent."""
    net = ct.build_network([(0, 0, 0), (1, 1, 0), (2, 2, 0)],
                           [(0, 1), (1, 2), (0, 2, 2.0)], 0)
    eps = 0.1
    ids = [1, 2]
    model = ct.MatrixModel(ids, [1.0, 1.0], [[0.0, eps], [eps, 0.0]])
    tree, scheme, total = unicast_arborescence(net, model)
    assert abs(total - (2 + eps)) < 1e-12  # 1 + min(1+2eps, 1+eps)
    assert tree.parent == {1: 0, 2: 1}
    assert scheme.sites[2] == 1  # raw child value moved to the parent
    assert validate(scheme, tree, net).ok


def test_independence_degenerates_to_ind(fig1_net):
    model = ct.UniformModel(list(fig1_net.sensors), h=1.0, eps=1.0)
    tree, scheme, total = unicast_arborescence(fig1_net, model)
    assert abs(total - ind_cost(fig1_net, model)) < 1e-12
    assert all(p == fig1_net.bs for p in tree.parent.values())


def test_arborescence_total_matches_eval(fig1_net):
    model = ct.UniformModel(list(fig1_net.sensors), h=1.0, eps=0.1)
    tree, scheme, total = unicast_arborescence(fig1_net, model)
    cb = eval_cost(scheme, tree, fig1_net, model)
    assert abs(cb.total - total) < 1e-9
    assert abs(transmission_cost(scheme, tree, fig1_net, model) - total) < 1e-9


def test_matches_brute_on_random_instances():
    rng = np.random.default_rng(4242)
    worst = 0.0
    for _ in range(20):
        net = random_net(rng, n_lo=3, n_hi=7, require_sensor_connected=False)
        model = random_matrix_model(rng, net)
        _, _, total = unicast_arborescence(net, model)
        ref = brute_restricted_opt(net, model, "UNICAST", "NS")
        worst = max(worst, abs(total - ref.cost))
        assert abs(total - ref.cost) <= 1e-12
    assert worst <= 1e-12


def test_minimum_arborescence_cycle_contraction():
    # classic instance that forces a contraction: 1<->2 cheap cycle, root far
    cost = {(0, 1): 10.0, (0, 2): 10.0, (1, 2): 1.0, (2, 1): 1.0}
    parent = minimum_arborescence([0, 1, 2], 0, cost)
    total = sum(cost[(p, c)] for c, p in parent.items())
    assert abs(total - 11.0) < 1e-12


def test_minimum_arborescence_deterministic_ties():
    cost = {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0, (2, 1): 1.0}
    parent = minimum_arborescence([0, 1, 2], 0, cost)
    # equal-weight options resolve toward the smaller source id
    assert parent == {1: 0, 2: 0}


def test_unreachable_node_raises():
    with pytest.raises(ValueError):
        minimum_arborescence([0, 1, 2], 0, {(0, 1): 1.0})
