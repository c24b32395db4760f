"""Multi-view coordination network: assembly, queries, and export."""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from .actions import ActionType
from .window import EdgeAccumulator, Pair


class NetworkError(ValueError):
    pass


@dataclass(frozen=True)
class ViewGraph:
    view: ActionType
    edges: Dict[Pair, float]

    @cached_property
    def nodes(self) -> frozenset:
        return frozenset(u for pair in self.edges for u in pair)

    @cached_property
    def adjacency(self) -> Dict[str, Dict[str, float]]:
        adj: Dict[str, Dict[str, float]] = {}
        for (u, v), w in self.edges.items():
            adj.setdefault(u, {})[v] = w
            adj.setdefault(v, {})[u] = w
        return adj

    @cached_property
    def degree(self) -> Dict[str, float]:
        return {u: sum(nbrs.values()) for u, nbrs in self.adjacency.items()}

    @property
    def total_weight(self) -> float:
        return sum(self.edges.values())

    def weight(self, u: str, v: str) -> float:
        return self.edges.get((u, v) if u < v else (v, u), 0)

    def restrict(self, keep: Set[str]) -> "ViewGraph":
        return ViewGraph(self.view, {p: w for p, w in self.edges.items() if p[0] in keep and p[1] in keep})


@dataclass(frozen=True)
class MultiViewNetwork:
    views: Tuple[ViewGraph, ...]
    users: Tuple[str, ...]

    def __post_init__(self):
        if not self.views:
            raise NetworkError("a network needs at least one view")

    @cached_property
    def node_index(self) -> Dict[str, int]:
        return {u: i for i, u in enumerate(self.users)}

    @property
    def view_types(self) -> List[ActionType]:
        return [v.view for v in self.views]

    def view(self, kind: ActionType) -> ViewGraph:
        for v in self.views:
            if v.view is kind:
                return v
        raise KeyError(kind)

    def __contains__(self, user: str) -> bool:
        return user in self.node_index

    def require(self, user: str) -> None:
        if user not in self.node_index:
            raise NetworkError(f"unknown user {user!r}")

    def union_adjacency(self) -> Dict[str, Set[str]]:
        adj: Dict[str, Set[str]] = {u: set() for u in self.users}
        for v in self.views:
            for a, b in v.edges:
                adj[a].add(b)
                adj[b].add(a)
        return adj

    def aggregate_edges(self) -> Dict[Pair, float]:
        """View-summed edge weights."""
        out: Dict[Pair, float] = {}
        for v in self.views:
            for p, w in v.edges.items():
                out[p] = out.get(p, 0) + w
        return out

    def restrict(self, keep: Set[str]) -> "MultiViewNetwork":
        users = tuple(u for u in self.users if u in keep)
        return MultiViewNetwork(tuple(v.restrict(keep) for v in self.views), users)


def assemble(accumulators: Mapping[ActionType, EdgeAccumulator], min_weight: float = 1) -> MultiViewNetwork:
    """Build the network, dropping edges lighter than ``min_weight``.

    Users without a surviving edge in any view are left out of the node set.
    """
    if not accumulators:
        raise NetworkError("a network needs at least one view")
    if min_weight < 0:
        raise ValueError("min_weight must be non-negative")
    views = []
    for kind, acc in accumulators.items():
        edges = {}
        for (a, b), w in sorted(acc.items()):
            if a == b:
                raise NetworkError(f"self-loop on {a!r} in view {kind.value}")
            if w > 0 and w >= min_weight:
                edges[(a, b) if a < b else (b, a)] = w
        views.append(ViewGraph(kind, edges))
    users = sorted(set().union(*(v.nodes for v in views)))
    return MultiViewNetwork(tuple(views), tuple(users))


def ego(network: MultiViewNetwork, user: str, radius: int) -> MultiViewNetwork:
    """Induced sub-network within ``radius`` hops of ``user`` in the union graph."""
    network.require(user)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    adj = network.union_adjacency()
    dist = {user: 0}
    queue = deque([user])
    while queue:
        u = queue.popleft()
        if dist[u] == radius:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return network.restrict(set(dist))


@dataclass(frozen=True)
class RankedEdge:
    pair: Pair
    weights: Tuple[float, ...]
    score: float
    view: Optional[ActionType] = None


def strongest_edges(network: MultiViewNetwork, k: int, mode: str = "averaged") -> List[RankedEdge]:
    """Top-``k`` pairs, either by mean weight across views or within each view.

    In per-view mode the result holds up to ``k`` entries for every view, in
    view order.  Ties go to the lexicographically smaller pair.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pairs = sorted(set().union(*(v.edges.keys() for v in network.views)))
    weights = {p: tuple(v.edges.get(p, 0) for v in network.views) for p in pairs}
    if mode == "averaged":
        L = len(network.views)
        ranked = sorted(pairs, key=lambda p: (-sum(weights[p]) / L, p))
        return [RankedEdge(p, weights[p], sum(weights[p]) / L) for p in ranked[:k]]
    if mode == "per-view":
        out = []
        for v in network.views:
            ranked = sorted(v.edges, key=lambda p: (-v.edges[p], p))
            out.extend(RankedEdge(p, weights[p], v.edges[p], v.view) for p in ranked[:k])
        return out
    raise ValueError(f"unknown mode {mode!r}")


def format_weight(w) -> str:
    if isinstance(w, int):
        return str(w)
    if float(w).is_integer() and abs(w) < 2**53:
        return str(int(w))
    return repr(float(w))


def parse_weight(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def edge_csv_path(basename: Path, kind: ActionType) -> Path:
    basename = Path(basename)
    return basename.with_name(f"{basename.name}.{kind.value}.csv")


def export_network(network: MultiViewNetwork, fmt: str, basename: Path) -> List[Path]:
    """Write the network as per-view edge CSVs or a single GraphML file."""
    basename = Path(basename)
    written = []
    try:
        if fmt == "edge-csv":
            for v in network.views:
                path = edge_csv_path(basename, v.view)
                with open(path, "w", encoding="utf-8", newline="") as fh:
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow(["source", "target", "weight"])
                    for (a, b) in sorted(v.edges):
                        writer.writerow([a, b, format_weight(v.edges[(a, b)])])
                written.append(path)
        elif fmt == "graphml":
            g = nx.MultiGraph()
            g.add_nodes_from(network.users)
            for v in network.views:
                for (a, b) in sorted(v.edges):
                    g.add_edge(a, b, view=v.view.value, weight=float(v.edges[(a, b)]))
            path = basename.with_name(basename.name + ".graphml")
            nx.write_graphml(g, path)
            written.append(path)
        else:
            raise ValueError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write network export to {exc.filename or basename}: {exc.strerror}") from exc
    return written


def import_edge_csv(basename: Path, views: Sequence[ActionType]) -> MultiViewNetwork:
    """Read back what ``export_network(..., "edge-csv", basename)`` wrote."""
    accs: Dict[ActionType, EdgeAccumulator] = {}
    for kind in views:
        path = edge_csv_path(basename, kind)
        acc = EdgeAccumulator()
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["source", "target", "weight"]:
                raise NetworkError(f"{path}: unexpected header {header}")
            for row in reader:
                if len(row) != 3:
                    raise NetworkError(f"{path}: malformed row {row}")
                acc.add(row[0], row[1], parse_weight(row[2]))
        accs[kind] = acc
    return assemble(accs, min_weight=0)


def view_summary(network: MultiViewNetwork) -> List[dict]:
    rows = []
    for v in network.views:
        ws = list(v.edges.values())
        rows.append(
            {
                "view": v.view.value,
                "active_nodes": len(v.nodes),
                "edges": len(ws),
                "total_weight": sum(ws),
                "max_weight": max(ws) if ws else 0,
            }
        )
    return rows
