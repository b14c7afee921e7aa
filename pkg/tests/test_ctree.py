import json
import math

import pytest

import comprestree as ct
from comprestree.ctree import (MULTICAST, UNICAST, WL, CompressionTree,
                               ExtendedCompressionTree, MovementScheme, RawPlan,
                               SchemeError, eval_cost, node_weighted_chain,
                               scheme_from_extended, scheme_from_json, scheme_to_json,
                               validate)
from comprestree.oracle import transmission_cost

from conftest import example1_scheme, uniform_model


def costs_at(net, eps, cost_model=WL):
    model = uniform_model(net, eps=eps)
    tree, scheme = example1_scheme(net)
    return eval_cost(scheme, tree, net, model, cost_model)


@pytest.mark.parametrize("eps", [0.0, 0.1])
def test_example_tree_costs(fig1_net, eps):
    cb = costs_at(fig1_net, eps)
    assert abs(cb.total - (2 + 7 * eps)) < 1e-9
    assert abs(cb.nc - (1 + 8 * eps)) < 1e-9
    assert abs(cb.ic - (1 - eps)) < 1e-9


@pytest.mark.parametrize("eps", [0.0, 0.1])
def test_example_tree_unicast_accounting(fig1_net, eps):
    cb = costs_at(fig1_net, eps, cost_model=UNICAST)
    assert abs(cb.total - (5 + 7 * eps)) < 1e-9


def test_example_scheme_validates(fig1_net):
    tree, scheme = example1_scheme(fig1_net)
    assert validate(scheme, tree, fig1_net).ok


def test_eval_matches_per_transmission_oracle(fig1_net):
    model = uniform_model(fig1_net, eps=0.1)
    tree, scheme = example1_scheme(fig1_net)
    for cm in (WL, UNICAST, MULTICAST):
        a = eval_cost(scheme, tree, fig1_net, model, cm).total
        b = transmission_cost(scheme, tree, fig1_net, model, cm)
        assert abs(a - b) < 1e-9


def test_nc_is_scheme_independent(fig1_net):
    """Two different movement schemes for the same tree share their NC."""
    model = uniform_model(fig1_net, eps=0.1)
    tree, scheme = example1_scheme(fig1_net)
    # alternative scheme: node 3 broadcasts too, X4|X3 computed at 4
    alt = MovementScheme(
        plans={1: RawPlan(1, frozenset({0, 2, 3, 5}), broadcasters=(1,)),
               3: RawPlan(3, frozenset({1, 4}), broadcasters=(3,))},
        sites={2: 2, 3: 3, 5: 5, 4: 4},
        cost_model=WL)
    assert validate(alt, tree, fig1_net).ok
    a = eval_cost(scheme, tree, fig1_net, model)
    b = eval_cost(alt, tree, fig1_net, model)
    assert abs(a.nc - b.nc) < 1e-12
    assert a.total != b.total


def test_total_at_least_nc(fig1_net):
    model = uniform_model(fig1_net, eps=0.1)
    tree, scheme = example1_scheme(fig1_net)
    cb = eval_cost(scheme, tree, fig1_net, model)
    assert cb.ic >= -1e-9


def test_single_node_scheme():
    net = ct.build_network([(0, 0, 0), (1, 1, 0)], [(0, 1)], bs=0)
    model = ct.UniformModel([1], h=1.0, eps=0.0)
    tree = CompressionTree(1, {}, [1])
    scheme = MovementScheme({1: RawPlan(1, frozenset({0}), broadcasters=(1,))}, {}, WL)
    assert validate(scheme, tree, net).ok
    cb = eval_cost(scheme, tree, net, model)
    assert abs(cb.total - 1.0) < 1e-12


def test_ds_but_not_wcds_is_undecodable(fig10_net):
    """Broadcasting a dominating set that is not weakly connected leaves
    nodes 2 and 3 unreconstructable at the base station."""
    from comprestree.algorithms import is_wcds
    S = {4, 9, 10, 2}
    assert not is_wcds(fig10_net, S)
    # ... but it does dominate every sensor
    sensors = set(fig10_net.sensors)
    dominated = set(S)
    for s in S:
        dominated.update(u for u in fig10_net.adj[s] if u != fig10_net.bs)
    assert dominated >= sensors

    net = fig10_net
    plans = {s: RawPlan(s, frozenset(net.adj[s]), broadcasters=(s,)) for s in sorted(S)}
    plans[4] = RawPlan(4, frozenset(set(net.adj[4]) | {net.bs}), broadcasters=(4,))
    tree = CompressionTree(4, {1: 4, 5: 4, 9: 4, 10: 9, 6: 10, 7: 10, 8: 10,
                               3: 2, 2: 1}, net.sensors)
    sites = {1: 1, 5: 5, 9: 5, 10: 8, 6: 6, 7: 7, 8: 8, 3: 3, 2: 2}
    scheme = MovementScheme(plans, sites, WL)
    report = validate(scheme, tree, net)
    assert not report.ok
    kinds = report.kinds()
    assert "UndecodableNode" in kinds
    undecodable = {v.where[0] for v in report.violations if v.kind == "UndecodableNode"}
    assert {2, 3} <= undecodable


def test_validate_flags_missing_operand(fig1_net):
    tree, scheme = example1_scheme(fig1_net)
    bad = MovementScheme(dict(scheme.plans), dict(scheme.sites), WL)
    bad.sites[4] = 5  # node 5 never receives X3 or X4
    report = validate(bad, tree, fig1_net)
    assert "UndeliveredOperand" in report.kinds()


def test_validate_flags_orphan_site(fig1_net):
    tree, scheme = example1_scheme(fig1_net)
    bad = MovementScheme(dict(scheme.plans), dict(scheme.sites), WL)
    bad.sites[1] = 1  # the root has no incoming edge
    assert "OrphanEdge" in validate(bad, tree, fig1_net).kinds()


def test_compression_tree_rejects_cycles():
    with pytest.raises(SchemeError):
        CompressionTree(1, {2: 3, 3: 2}, [1, 2, 3])
    with pytest.raises(SchemeError):
        CompressionTree(1, {2: 1}, [1, 2, 3])  # 3 unparented


def test_extended_tree_validation():
    with pytest.raises(SchemeError):
        ExtendedCompressionTree([1, 2, 3], [(1, 2)])  # not spanning
    ext = ExtendedCompressionTree([1, 2, 3], [(1, 2), (3, 2)])
    assert ext.sender_of(2, 1) == 1
    assert ext.sender_of(2, 3) == 3


def test_scheme_from_extended_reorientation(fig10_net, fig10_model):
    """Raw movement 3 -> 1 with node 1 ending up the parent: the former
    receiver computes the conditional (the re-parenting rule)."""
    edges = [(10, 8), (10, 6), (10, 7), (9, 5), (9, 8), (3, 1), (3, 2), (4, 1), (4, 5)]
    ext = ExtendedCompressionTree(fig10_net.sensors, edges)
    tree, scheme = scheme_from_extended(ext, fig10_net, fig10_model, WL)
    assert tree.root == 4
    assert tree.parent[3] == 1 and scheme.sites[3] == 1   # X3|X1 computed at 1
    assert tree.parent[1] == 4 and scheme.sites[1] == 1   # node 1 ships X1|X4
    assert tree.parent[9] == 5 and scheme.sites[9] == 5
    assert validate(scheme, tree, fig10_net).ok


def test_scheme_from_extended_two_node():
    net = ct.build_network([(0, 0, 0), (1, 1, 0), (2, 2, 0)], [(0, 1), (1, 2)], 0)
    model = ct.UniformModel([1, 2], 1.0, 0.1)
    ext = ExtendedCompressionTree([1, 2], [(1, 2)])
    tree, scheme = scheme_from_extended(ext, net, model, WL)
    assert tree.root == 1  # broadcast from 1 reaches the bs
    assert scheme.sites[2] == 2  # child compresses locally
    cb = eval_cost(scheme, tree, net, model)
    assert abs(cb.total - (1 + 0.1 * 2)) < 1e-12


def test_scheme_from_extended_child_to_parent_orientation():
    net = ct.build_network([(0, 0, 0), (1, 1, 0), (2, 2, 0)], [(0, 1), (1, 2)], 0)
    model = ct.UniformModel([1, 2], 1.0, 0.1)
    ext = ExtendedCompressionTree([1, 2], [(2, 1)])  # child ships raw up
    tree, scheme = scheme_from_extended(ext, net, model, WL, root=1)
    assert tree.parent[2] == 1
    assert scheme.sites[2] == 1  # parent-side compression site
    assert validate(scheme, tree, net).ok


def test_root_chain_added_when_far_from_bs():
    net = ct.build_network([(0, 0, 0), (1, 1, 0), (2, 2, 0), (3, 3, 0)],
                           [(0, 1), (1, 2), (2, 3)], 0)
    model = ct.UniformModel([1, 2, 3], 1.0, 0.1)
    ext = ExtendedCompressionTree([1, 2, 3], [(3, 2), (2, 1)])
    tree, scheme = scheme_from_extended(ext, net, model, WL, root=3)
    # X3 must chain through 2 and 1 to reach the bs
    assert set(scheme.plans[3].broadcasters) >= {3, 2, 1}
    assert validate(scheme, tree, net).ok


def test_node_weighted_chain():
    net = ct.build_network([(0, 0, 0), (1, 1, 0, 5.0), (2, 2, 0, 1.0), (3, 3, 0, 1.0)],
                           [(0, 1), (0, 2), (1, 3), (2, 3)], 0)
    cost, path = node_weighted_chain(net, 3, 0)
    assert path == [3, 2, 0]  # avoids the heavy relay 1
    assert abs(cost - 2.0) < 1e-12


def test_scheme_json_round_trip(fig1_net):
    model = uniform_model(fig1_net, eps=0.1)
    tree, scheme = example1_scheme(fig1_net)
    data = json.loads(json.dumps(scheme_to_json(tree, scheme)))
    tree2, scheme2 = scheme_from_json(data, fig1_net, WL)
    assert tree2.parent == tree.parent and tree2.root == tree.root
    assert scheme2.sites == scheme.sites
    a = eval_cost(scheme, tree, fig1_net, model).total
    b = eval_cost(scheme2, tree2, fig1_net, model).total
    assert abs(a - b) < 1e-9


def test_scheme_json_rejects_unknown(fig1_net):
    tree, scheme = example1_scheme(fig1_net)
    data = scheme_to_json(tree, scheme)
    data["bogus"] = 1
    with pytest.raises(SchemeError):
        scheme_from_json(data, fig1_net)


def test_zero_entropy_edges_cost_zero(fig1_net):
    model = uniform_model(fig1_net, eps=0.0)
    tree, scheme = example1_scheme(fig1_net)
    cb = eval_cost(scheme, tree, fig1_net, model)
    assert abs(cb.total - 2.0) < 1e-12  # only the two broadcasts remain


def test_rx_cost_multiplier(fig1_net):
    model = uniform_model(fig1_net, eps=0.0)
    tree, scheme = example1_scheme(fig1_net)
    base = eval_cost(scheme, tree, fig1_net, model, rx_cost=0.0).total
    with_rx = eval_cost(scheme, tree, fig1_net, model, rx_cost=1.0).total
    # node 1 has 4 neighbors, node 4 has 1: 5 receptions of 1 bit each
    assert abs(with_rx - base - 5.0) < 1e-12
