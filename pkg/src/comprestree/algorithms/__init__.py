"""Constructive algorithms: WCDS-based trees, the greedy treestar framework,
baselines, the unicast arborescence, and the NS-space reductions."""

from .baselines import ClusterResult, cluster_greedy, dsc_lower_bound, eval_clustering, ind_cost
from .nscost import (DirectedSteinerInstance, GroupSteinerInstance, TooLarge,
                     mce_treestar_multicast, mce_treestar_wlns,
                     reduce_to_directed_steiner, reduce_to_group_steiner,
                     treestar_cost_multicast, treestar_cost_wlns)
from .treestar import (Forest, NoCandidate, TreestarRun, TreeStar, greedy_treestar,
                       local_improve, mce_treestar_wlsg)
from .unicast import edge_costs, minimum_arborescence, unicast_arborescence
from .wcds import InvalidWCDS, is_wcds, tree_from_wcds, wcds_greedy

__all__ = [
    "ClusterResult", "cluster_greedy", "dsc_lower_bound", "eval_clustering", "ind_cost",
    "DirectedSteinerInstance", "GroupSteinerInstance", "TooLarge",
    "mce_treestar_multicast", "mce_treestar_wlns",
    "reduce_to_directed_steiner", "reduce_to_group_steiner",
    "treestar_cost_multicast", "treestar_cost_wlns",
    "Forest", "NoCandidate", "TreestarRun", "TreeStar", "greedy_treestar",
    "local_improve", "mce_treestar_wlsg",
    "edge_costs", "minimum_arborescence", "unicast_arborescence",
    "InvalidWCDS", "is_wcds", "tree_from_wcds", "wcds_greedy",
]
