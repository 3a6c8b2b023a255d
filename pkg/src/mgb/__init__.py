"""Graph node-classification benchmark with controlled missing features."""
from .graph import Graph, NodeSplit, feature_sparsity, make_split, normalized_adjacency
from .masks import Mask, apply_column_statistic, apply_zero_pad, build_input, mim_augment

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "NodeSplit",
    "Mask",
    "feature_sparsity",
    "make_split",
    "normalized_adjacency",
    "apply_zero_pad",
    "apply_column_statistic",
    "mim_augment",
    "build_input",
    "__version__",
]
