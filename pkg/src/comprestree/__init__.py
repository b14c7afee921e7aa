"""comprestree: near-optimal compression trees for gathering correlated
sensor data, with IND/Cluster baselines, the DSC lower bound, and exact
oracles under broadcast, multicast, and unicast cost models."""

from . import algorithms, ctree, entropy, netgraph, oracle
from .ctree import (MULTICAST, UNICAST, WL, CompressionTree, CostBreakdown,
                    ExtendedCompressionTree, MovementScheme, RawPlan, eval_cost,
                    scheme_from_extended, validate)
from .entropy import (Beta, EntropyModel, GaussianModel, MatrixModel, RainfallModel,
                      UniformModel, beta, model_from_json, model_to_json)
from .netgraph import (DistanceTable, Network, Node, build_network, gen_grid,
                       gen_random, load_network, net_from_json, net_to_json,
                       save_network, shortest_paths)

__version__ = "0.1.0"

__all__ = [
    "algorithms", "ctree", "entropy", "netgraph", "oracle",
    "MULTICAST", "UNICAST", "WL", "CompressionTree", "CostBreakdown",
    "ExtendedCompressionTree", "MovementScheme", "RawPlan", "eval_cost",
    "scheme_from_extended", "validate",
    "Beta", "EntropyModel", "GaussianModel", "MatrixModel", "RainfallModel",
    "UniformModel", "beta", "model_from_json", "model_to_json",
    "DistanceTable", "Network", "Node", "build_network", "gen_grid",
    "gen_random", "load_network", "net_from_json", "net_to_json",
    "save_network", "shortest_paths",
]
