"""Multi-view synchronized-action networks for coordination detection."""

from .actions import ActionEvent, ActionType, extract_actions, extract_all
from .cluster import Clustering, densest_cluster, modularity, multiview_cluster
from .gen import CampaignSpec, Scenario, generate
from .ingest import Tweet, canonicalize_url, normalize_tag, parse_corpus
from .metrics import eigenvector_centrality, modularity_vitality, rank_cluster, total_degree
from .network import MultiViewNetwork, ViewGraph, assemble, ego, export_network, strongest_edges
from .window import (
    EdgeAccumulator,
    TieBreak,
    WindowConfig,
    fixed_window_edges,
    group_by_action,
    merge_accumulators,
    sliding_window_edges,
)

__version__ = "0.1.0"

__all__ = [
    "ActionEvent",
    "ActionType",
    "CampaignSpec",
    "Clustering",
    "EdgeAccumulator",
    "MultiViewNetwork",
    "Scenario",
    "TieBreak",
    "Tweet",
    "ViewGraph",
    "WindowConfig",
    "assemble",
    "canonicalize_url",
    "densest_cluster",
    "ego",
    "eigenvector_centrality",
    "export_network",
    "extract_actions",
    "extract_all",
    "fixed_window_edges",
    "generate",
    "group_by_action",
    "merge_accumulators",
    "modularity",
    "modularity_vitality",
    "multiview_cluster",
    "normalize_tag",
    "parse_corpus",
    "rank_cluster",
    "sliding_window_edges",
    "strongest_edges",
    "total_degree",
]
