"""Fast biconnectivity restoration for multi-robot communication networks."""

from .augment import AugmentationSet, edge_augmentation, gto_bottleneck_oracle
from .baselines import RemovedVertexInfo, bt, cr
from .graph import (
    BlockCutTree,
    CommGraph,
    RobotConfig,
    articulation_points,
    block_cut_tree,
    comm_graph,
    is_biconnected,
    is_connected,
    repair_graph,
)
from .instances import Instance, gen_instance, load_instance, save_instance
from .relocate import MoveSolution, mm_opt, scr
from .verify import opt_oracle_small_n, verify_solution

__all__ = [
    "AugmentationSet",
    "BlockCutTree",
    "CommGraph",
    "Instance",
    "MoveSolution",
    "RemovedVertexInfo",
    "RobotConfig",
    "articulation_points",
    "block_cut_tree",
    "bt",
    "comm_graph",
    "cr",
    "edge_augmentation",
    "gen_instance",
    "gto_bottleneck_oracle",
    "is_biconnected",
    "is_connected",
    "load_instance",
    "mm_opt",
    "opt_oracle_small_n",
    "repair_graph",
    "save_instance",
    "scr",
    "verify_solution",
]
