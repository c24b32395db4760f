"""Report figures.  All functions write a file and close their figure."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.lines import Line2D  # noqa: E402
import networkx as nx  # noqa: E402

from .actions import ActionType  # noqa: E402
from .metrics import CentralityReport  # noqa: E402
from .network import MultiViewNetwork  # noqa: E402

VIEW_COLORS: Dict[ActionType, str] = {
    ActionType.HASHTAG: "#2ca02c",
    ActionType.URL: "#1f77b4",
    ActionType.MENTION: "#d62728",
    ActionType.HASHTAG_URL: "#17becf",
    ActionType.URL_MENTION: "#9467bd",
    ActionType.HASHTAG_MENTION: "#ff7f0e",
}

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "figure.dpi": 100,
    # fixed metadata keeps repeated renders byte-stable
    "svg.hashsalt": "syncaction",
}


def _figsize(width: float = 6.0, ratio: Optional[float] = None):
    ratio = ratio or (math.sqrt(5) - 1) / 2
    return (width, width * ratio)


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_weight_distribution(network: MultiViewNetwork, path: Path) -> Path:
    """Edge-weight histogram per view, log-scaled counts."""
    with plt.rc_context(STYLE):
        n = len(network.views)
        fig, axes = plt.subplots(1, n, figsize=_figsize(3.0 * n, 0.8 / n), squeeze=False)
        for ax, v in zip(axes[0], network.views):
            ws = list(v.edges.values())
            color = VIEW_COLORS[v.view]
            if ws:
                top = max(ws)
                bins = range(1, int(math.ceil(top)) + 2) if top <= 60 and all(float(w).is_integer() for w in ws) else 30
                ax.hist(ws, bins=bins, color=color, align="left" if not isinstance(bins, int) else "mid")
                ax.set_yscale("log")
            else:
                ax.text(0.5, 0.5, "no edges", ha="center", va="center", transform=ax.transAxes)
            ax.set_title(f"{v.view.value} ({len(ws)} edges)")
            ax.set_xlabel("edge weight")
        axes[0][0].set_ylabel("pairs")
        return _save(fig, path)


def plot_cluster_profile(sizes: Sequence[int], densities: Sequence[float], highlight: Optional[int], path: Path) -> Path:
    """Cluster size against density; the highlighted index is the densest cluster."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=_figsize(4.5))
        ax.scatter(sizes, densities, s=14, color="0.5", label="cluster")
        if highlight is not None:
            ax.scatter([sizes[highlight]], [densities[highlight]], s=40, color="#d62728", label="densest")
        ax.set_xscale("log")
        ax.set_xlabel("cluster size")
        ax.set_ylabel("density (weight per possible pair)")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_cluster_ranking(report: CentralityReport, path: Path, top: int = 20) -> Path:
    """Total degree and modularity vitality of the top-ranked members."""
    users = report.users[:top]
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=_figsize(8.0, 0.25 + 0.02 * len(users)), sharey=True)
        ypos = list(range(len(users)))[::-1]
        ax1.barh(ypos, [report.total_degree[u] for u in users], color="0.4")
        ax1.set_yticks(ypos)
        ax1.set_yticklabels(users)
        ax1.set_xlabel("total degree")
        vit = [report.vitality[u] for u in users]
        ax2.barh(ypos, vit, color=["#2ca02c" if x >= 0 else "#d62728" for x in vit])
        ax2.axvline(0, color="black", lw=0.5)
        ax2.set_xlabel("modularity vitality")
        fig.suptitle(f"cluster {report.cluster_id}: top {len(users)} members")
        return _save(fig, path)


def plot_network(network: MultiViewNetwork, path: Path, center: Optional[str] = None, seed: int = 42) -> Path:
    """Draw a (small) multi-view network; edge colour marks the view, width the weight."""
    g = nx.Graph()
    g.add_nodes_from(network.users)
    for v in network.views:
        g.add_edges_from(v.edges)
    pos = nx.spring_layout(g, seed=seed) if len(g) else {}
    degree = {u: sum(v.degree.get(u, 0) for v in network.views) for u in network.users}
    dmax = max(degree.values(), default=1) or 1
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 6))
        n_views = len(network.views)
        for i, v in enumerate(network.views):
            if not v.edges:
                continue
            # bend each view differently so parallel edges stay visible
            rad = 0.15 * (i - (n_views - 1) / 2)
            wmax = max(v.edges.values())
            edges = sorted(v.edges)
            nx.draw_networkx_edges(
                g,
                pos,
                edgelist=edges,
                width=[0.5 + 3.0 * v.edges[e] / wmax for e in edges],
                edge_color=VIEW_COLORS[v.view],
                alpha=0.7,
                ax=ax,
                arrows=True,
                arrowstyle="-",
                connectionstyle=f"arc3,rad={rad:.3f}",
            )
        nodes = list(network.users)
        nx.draw_networkx_nodes(
            g,
            pos,
            nodelist=nodes,
            node_size=[20 + 200 * degree[u] / dmax for u in nodes],
            node_color=["#e6ab02" if u == center else "0.3" for u in nodes],
            ax=ax,
        )
        if len(nodes) <= 40:
            nx.draw_networkx_labels(g, pos, font_size=6, ax=ax)
        ax.set_axis_off()
        handles = [
            Line2D([], [], color=VIEW_COLORS[v.view], lw=2, alpha=0.7, label=v.view.value) for v in network.views if v.edges
        ]
        if handles:
            ax.legend(handles=handles, frameon=False, loc="lower left")
        return _save(fig, path)
