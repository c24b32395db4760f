"""End-to-end helpers: tweets -> multi-view network -> densest cluster."""

from __future__ import annotations

from typing import Dict, Sequence

from .actions import ActionType, extract_all
from .cluster import Clustering, densest_cluster, multiview_cluster
from .ingest import Tweet
from .network import MultiViewNetwork, assemble
from .window import EdgeAccumulator, WindowConfig, view_edges


def build_accumulators(
    tweets: Sequence[Tweet],
    views: Sequence[ActionType],
    config: WindowConfig = WindowConfig(),
    include_retweets: bool = False,
    workers: int = 1,
) -> Dict[ActionType, EdgeAccumulator]:
    events = extract_all(tweets, views, include_retweets=include_retweets)
    return {kind: view_edges(events[kind], config, workers=workers) for kind in views}


def build_network(
    tweets: Sequence[Tweet],
    views: Sequence[ActionType],
    config: WindowConfig = WindowConfig(),
    min_weight: float = 1,
    include_retweets: bool = False,
    workers: int = 1,
) -> MultiViewNetwork:
    accs = build_accumulators(tweets, views, config, include_retweets, workers)
    return assemble(accs, min_weight)


def detect(
    network: MultiViewNetwork,
    resolution: float = 1.0,
    coupling: float = 1.0,
    seed: int = 42,
    min_size: int = 2,
):
    """Cluster the network and return (clustering, densest cluster id)."""
    clustering: Clustering = multiview_cluster(network, resolution, coupling, seed)
    return clustering, densest_cluster(network, clustering, min_size)
