"""Account-level measures: total degree, eigenvector centrality, modularity vitality."""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .actions import ActionType
from .cluster import Clustering
from .network import MultiViewNetwork, NetworkError, ViewGraph
from .window import Pair

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    pass


def total_degree(network: MultiViewNetwork, user: str) -> float:
    network.require(user)
    return sum(v.degree.get(user, 0) for v in network.views)


def largest_component(view: ViewGraph) -> List[str]:
    """Node list of the largest connected component.

    Equal-sized components are ordered by total edge weight, then by their
    smallest user id.
    """
    adj = view.adjacency
    seen = set()
    best = None
    for start in sorted(adj):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        weight = sum(view.degree[u] for u in comp) / 2
        key = (-len(comp), -weight, min(comp))
        if best is None or key < best[0]:
            best = (key, comp)
    return sorted(best[1]) if best else []


def _component_matrix(view: ViewGraph):
    comp = largest_component(view)
    index = {u: i for i, u in enumerate(comp)}
    rows, cols, vals = [], [], []
    for (a, b), w in view.edges.items():
        if a in index and b in index:
            rows += [index[a], index[b]]
            cols += [index[b], index[a]]
            vals += [float(w), float(w)]
    n = len(comp)
    return index, sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _scores(view: ViewGraph, index: Mapping[str, int], x: np.ndarray) -> Dict[str, float]:
    scores = {u: 0.0 for u in sorted(view.nodes)}
    for u, i in index.items():
        scores[u] = float(x[i])
    return scores


def eigenvector_centrality(
    view: ViewGraph,
    tol: float = 1e-8,
    max_iter: int = 1000,
) -> Dict[str, float]:
    """Leading eigenvector of the weighted adjacency on the largest component.

    Power iteration from the uniform vector on ``A + I``; the shift keeps the
    leading eigenvector while removing the sign oscillation bipartite
    components (stars, paths) would otherwise cause.  Nodes outside the
    largest component score 0.  The result has unit Euclidean norm.
    """
    if not view.edges:
        raise NetworkError(f"view {view.view.value!r} has no edges")
    index, A = _component_matrix(view)
    n = A.shape[0]
    A = A + sparse.identity(n, format="csr")
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        y = A @ x
        y /= np.linalg.norm(y)
        if np.linalg.norm(y - x) < tol:
            x = y
            break
        x = y
    else:
        raise ConvergenceError(f"eigenvector centrality did not converge in {max_iter} iterations on view {view.view.value!r}")
    return _scores(view, index, x)


def eigenvector_centrality_direct(view: ViewGraph) -> Dict[str, float]:
    """Same scores as :func:`eigenvector_centrality` from an eigensolver.

    For components whose two largest eigenvalues are too close for power
    iteration to settle within its cap.
    """
    if not view.edges:
        raise NetworkError(f"view {view.view.value!r} has no edges")
    index, A = _component_matrix(view)
    if A.shape[0] <= 500:
        _, vecs = np.linalg.eigh(A.toarray())
        x = vecs[:, -1]
    else:
        _, vecs = eigsh(A, k=1, which="LA", v0=np.ones(A.shape[0]))
        x = vecs[:, 0]
    x = np.abs(x) / np.linalg.norm(x)
    return _scores(view, index, x)


def _q_from_parts(internal: Mapping[int, float], totals: Mapping[int, float], two_m: float) -> float:
    if two_m <= 0:
        return 0.0
    q = 0.0
    for c, tot in totals.items():
        q += internal.get(c, 0.0) / two_m - (tot / two_m) ** 2
    return q


class VitalityCalculator:
    """Modularity vitality under a fixed partition, O(deg) per node.

    Works on a single weighted edge map (by default the view-summed graph).
    Removing a node deletes its incident edges; remaining nodes keep their
    cluster labels.
    """

    def __init__(self, edges: Mapping[Pair, float], assignment: Mapping[str, int]):
        self.assignment = assignment
        self.adj: Dict[str, Dict[str, float]] = defaultdict(dict)
        self.internal: Dict[int, float] = defaultdict(float)
        self.totals: Dict[int, float] = defaultdict(float)
        two_m = 0.0
        for (a, b), w in edges.items():
            w = float(w)
            self.adj[a][b] = w
            self.adj[b][a] = w
            two_m += 2 * w
            self.totals[assignment[a]] += w
            self.totals[assignment[b]] += w
            if assignment[a] == assignment[b]:
                self.internal[assignment[a]] += 2 * w
        self.two_m = two_m
        self.q = _q_from_parts(self.internal, self.totals, two_m)

    def vitality(self, user: str) -> float:
        nbrs = self.adj.get(user)
        if not nbrs:
            return 0.0
        cu = self.assignment[user]
        k_u = sum(nbrs.values())
        to_cluster: Dict[int, float] = defaultdict(float)
        for v, w in nbrs.items():
            to_cluster[self.assignment[v]] += w
        totals = dict(self.totals)
        internal = dict(self.internal)
        totals[cu] -= k_u
        for c, w in to_cluster.items():
            totals[c] -= w
        internal[cu] = internal.get(cu, 0.0) - 2 * to_cluster.get(cu, 0.0)
        q_after = _q_from_parts(internal, totals, self.two_m - 2 * k_u)
        return self.q - q_after


def modularity_vitality(
    network: MultiViewNetwork,
    clustering: Clustering,
    user: str,
    view: Optional[ActionType] = None,
) -> float:
    """Q(G) - Q(G without ``user``) with labels held fixed, at resolution 1.

    G is the view-summed graph, or a single view when ``view`` is given.
    Positive values mark community hubs, negative values bridges.
    """
    network.require(user)
    edges = network.aggregate_edges() if view is None else network.view(view).edges
    return VitalityCalculator(edges, clustering.assignment).vitality(user)


def _ranks(values: Mapping[str, float]) -> Dict[str, int]:
    order = sorted(values, key=lambda u: (-values[u], u))
    return {u: i + 1 for i, u in enumerate(order)}


@dataclass
class CentralityReport:
    cluster_id: int
    views: List[ActionType]
    total_degree: Dict[str, float]
    eigenvector: Dict[ActionType, Dict[str, float]]
    vitality: Dict[str, float]
    rank_degree: Dict[str, int] = field(default_factory=dict)
    rank_vitality: Dict[str, int] = field(default_factory=dict)
    rank_eigenvector: Dict[ActionType, Dict[str, int]] = field(default_factory=dict)

    @property
    def users(self) -> List[str]:
        """Members ordered by total-degree rank."""
        return sorted(self.rank_degree, key=self.rank_degree.get)

    def rows(self) -> List[dict]:
        out = []
        for u in self.users:
            row = {"user_id": u, "total_degree": self.total_degree[u]}
            for kind in self.views:
                row[f"eig_{kind.value}"] = self.eigenvector[kind][u]
            row["vitality"] = self.vitality[u]
            row["rank_degree"] = self.rank_degree[u]
            row["rank_vitality"] = self.rank_vitality[u]
            out.append(row)
        return out


def _view_scores(view: ViewGraph) -> Dict[str, float]:
    try:
        return eigenvector_centrality(view)
    except ConvergenceError as exc:
        log.warning("%s; using a direct eigensolve instead", exc)
        return eigenvector_centrality_direct(view)


def rank_cluster(
    network: MultiViewNetwork,
    clustering: Clustering,
    cluster_id: int,
    vitality_view: Optional[ActionType] = None,
) -> CentralityReport:
    """Score and rank the members of one cluster.

    All measures are taken on the full network, not the induced subgraph.
    Views without edges give every member an eigenvector score of 0.
    """
    members = clustering.members(cluster_id)
    if not members:
        raise NetworkError(f"unknown cluster {cluster_id}")
    degree = {u: total_degree(network, u) for u in members}
    eig: Dict[ActionType, Dict[str, float]] = {}
    for v in network.views:
        scores = _view_scores(v) if v.edges else {}
        eig[v.view] = {u: scores.get(u, 0.0) for u in members}
    edges = network.aggregate_edges() if vitality_view is None else network.view(vitality_view).edges
    calc = VitalityCalculator(edges, clustering.assignment)
    vit = {u: calc.vitality(u) for u in members}
    return CentralityReport(
        cluster_id=cluster_id,
        views=list(network.view_types),
        total_degree=degree,
        eigenvector=eig,
        vitality=vit,
        rank_degree=_ranks(degree),
        rank_vitality=_ranks(vit),
        rank_eigenvector={k: _ranks(s) for k, s in eig.items()},
    )


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_report(report: CentralityReport, path: Path) -> None:
    rows = report.rows()
    header = ["user_id", "total_degree"] + [f"eig_{k.value}" for k in report.views] + [
        "vitality",
        "rank_degree",
        "rank_vitality",
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])


def read_report(path: Path) -> List[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
