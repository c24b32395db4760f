"""Multi-view modularity clustering.

Every user gets one copy per view in which it has an edge.  The objective
is the sum over views of each view's weighted modularity (normalized by
that view's own total weight) plus a coupling reward of ``coupling / N``
for every ordered pair of a user's copies that share a cluster, where N is
the number of users.  It is maximized Louvain-style: greedy local moves in
a seeded random order, then aggregation of clusters into super-nodes,
repeated until nothing moves.

Each user's final label is the cluster of its heaviest copy (largest
normalized degree); the copy-level partition is kept on the result.
"""

from __future__ import annotations

import csv
import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple

from .actions import ActionType
from .network import MultiViewNetwork, NetworkError, ViewGraph

_EPS = 1e-13

Copy = Tuple[str, ActionType]


@dataclass(frozen=True)
class Clustering:
    assignment: Dict[str, int]
    resolution: float = 1.0
    coupling: float = 1.0
    seed: int = 42
    objective: float = float("nan")
    copy_assignment: Dict[Copy, int] = field(default_factory=dict, repr=False)

    @property
    def n_clusters(self) -> int:
        return len(set(self.assignment.values()))

    def members(self, cluster_id: int) -> List[str]:
        return sorted(u for u, c in self.assignment.items() if c == cluster_id)

    def clusters(self) -> Dict[int, List[str]]:
        out: Dict[int, List[str]] = defaultdict(list)
        for u in sorted(self.assignment):
            out[self.assignment[u]].append(u)
        return dict(sorted(out.items()))


def modularity(view: ViewGraph, assignment: Mapping[str, int], resolution: float = 1.0) -> float:
    """Weighted Newman-Girvan modularity of ``assignment`` on one view.

    Zero for an edgeless view.
    """
    two_m = 2.0 * view.total_weight
    if two_m == 0:
        return 0.0
    internal: Dict[int, float] = defaultdict(float)
    totals: Dict[int, float] = defaultdict(float)
    for (a, b), w in view.edges.items():
        if assignment[a] == assignment[b]:
            internal[assignment[a]] += 2.0 * w
    for u, d in view.degree.items():
        totals[assignment[u]] += d
    q = 0.0
    for c, tot in totals.items():
        q += internal.get(c, 0.0) / two_m - resolution * (tot / two_m) ** 2
    return q


def copy_objective(
    network: MultiViewNetwork,
    copy_assignment: Mapping[Copy, int],
    resolution: float = 1.0,
    coupling: float = 1.0,
) -> float:
    """Multilayer objective of a copy-level partition."""
    q = 0.0
    for v in network.views:
        labels = {u: copy_assignment[(u, v.view)] for u in v.nodes}
        q += modularity(v, labels, resolution)
    n = len(network.users)
    if coupling and n and len(network.views) > 1:
        per_user: Dict[str, List[int]] = defaultdict(list)
        for (u, _), c in copy_assignment.items():
            per_user[u].append(c)
        agree = 0
        for labels in per_user.values():
            counts: Dict[int, int] = defaultdict(int)
            for c in labels:
                counts[c] += 1
            agree += sum(k * (k - 1) for k in counts.values())
        q += coupling / n * agree
    return q


def multiview_objective(
    network: MultiViewNetwork,
    assignment: Mapping[str, int],
    resolution: float = 1.0,
    coupling: float = 1.0,
) -> float:
    """Objective of a user-level partition (all copies of a user together)."""
    return copy_objective(network, _lift(network, assignment), resolution, coupling)


def _lift(network: MultiViewNetwork, assignment: Mapping[str, int]) -> Dict[Copy, int]:
    return {(u, v.view): assignment[u] for v in network.views for u in sorted(v.nodes)}


class _SupraGraph:
    """Weighted graph whose nodes carry a per-layer null-model strength vector."""

    def __init__(self, adj: List[Dict[int, float]], strength: List[List[float]]):
        self.adj = adj
        self.strength = strength

    def __len__(self):
        return len(self.adj)


def _build_supra(network: MultiViewNetwork, coupling: float) -> Tuple[_SupraGraph, List[Copy]]:
    L = len(network.views)
    copies: List[Copy] = []
    index: Dict[Copy, int] = {}
    for v in network.views:
        for u in sorted(v.nodes):
            index[(u, v.view)] = len(copies)
            copies.append((u, v.view))
    adj: List[Dict[int, float]] = [dict() for _ in copies]
    strength = [[0.0] * L for _ in copies]
    for layer, v in enumerate(network.views):
        two_m = 2.0 * v.total_weight
        for (a, b), w in sorted(v.edges.items()):
            ia, ib = index[(a, v.view)], index[(b, v.view)]
            adj[ia][ib] = adj[ia].get(ib, 0.0) + w / two_m
            adj[ib][ia] = adj[ib].get(ia, 0.0) + w / two_m
        for u, d in v.degree.items():
            strength[index[(u, v.view)]][layer] = d / two_m
    n_users = len(network.users)
    if coupling and L > 1:
        by_user: Dict[str, List[int]] = defaultdict(list)
        for i, (u, _) in enumerate(copies):
            by_user[u].append(i)
        w = coupling / n_users
        for idx in by_user.values():
            for i in idx:
                for j in idx:
                    if i != j:
                        adj[i][j] = adj[i].get(j, 0.0) + w
    return _SupraGraph(adj, strength), copies


def _dot(a: List[float], b: List[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


def _local_moves(g: _SupraGraph, resolution: float, rng: random.Random) -> Tuple[List[int], bool]:
    n = len(g)
    comm = list(range(n))
    size = [1] * n
    tot = [s[:] for s in g.strength]
    empty: List[int] = []
    order = list(range(n))
    moved_any = False
    while True:
        rng.shuffle(order)
        moved = 0
        for a in order:
            ka = g.strength[a]
            old = comm[a]
            links: Dict[int, float] = {}
            for b, w in g.adj[a].items():
                if b != a:
                    links[comm[b]] = links.get(comm[b], 0.0) + w
            for i, x in enumerate(ka):
                tot[old][i] -= x
            size[old] -= 1
            best = old
            best_gain = 2.0 * links.get(old, 0.0) - 2.0 * resolution * _dot(ka, tot[old])
            for c, w in links.items():
                if c == old:
                    continue
                gain = 2.0 * w - 2.0 * resolution * _dot(ka, tot[c])
                if gain > best_gain + _EPS:
                    best, best_gain = c, gain
            if best_gain < -_EPS and size[old] > 0:
                # being alone beats every option
                best = empty.pop()
            for i, x in enumerate(ka):
                tot[best][i] += x
            size[best] += 1
            if size[old] == 0 and best != old:
                empty.append(old)
            if best != old:
                comm[a] = best
                moved += 1
        if moved == 0:
            break
        moved_any = True
    return comm, moved_any


def _aggregate(g: _SupraGraph, comm: List[int]) -> Tuple[_SupraGraph, List[int]]:
    labels = {}
    for c in comm:
        if c not in labels:
            labels[c] = len(labels)
    new_of = [labels[c] for c in comm]
    k = len(labels)
    L = len(g.strength[0]) if g.strength else 0
    adj: List[Dict[int, float]] = [dict() for _ in range(k)]
    strength = [[0.0] * L for _ in range(k)]
    for a in range(len(g)):
        ca = new_of[a]
        for i, x in enumerate(g.strength[a]):
            strength[ca][i] += x
        for b, w in g.adj[a].items():
            cb = new_of[b]
            adj[ca][cb] = adj[ca].get(cb, 0.0) + w
    return _SupraGraph(adj, strength), new_of


def louvain_supra(g: _SupraGraph, resolution: float, seed: int) -> List[int]:
    """Louvain on a supra-graph; returns a consecutive label per original node."""
    rng = random.Random(seed)
    membership = list(range(len(g)))
    current = g
    while True:
        comm, moved = _local_moves(current, resolution, rng)
        if not moved:
            break
        current, new_of = _aggregate(current, comm)
        membership = [new_of[m] for m in membership]
        if len(current) == 1:
            break
    return membership


def _relabel_users(network: MultiViewNetwork, copies: List[Copy], labels: List[int], g: _SupraGraph):
    layer_of = {v.view: i for i, v in enumerate(network.views)}
    best: Dict[str, Tuple[float, int, int]] = {}
    for i, (u, kind) in enumerate(copies):
        s = g.strength[i][layer_of[kind]]
        cand = (s, -layer_of[kind], labels[i])
        if u not in best or (cand[0], cand[1]) > (best[u][0], best[u][1]):
            best[u] = cand
    raw = {u: best[u][2] for u in network.users}
    order: Dict[int, int] = {}
    for u in network.users:
        order.setdefault(raw[u], len(order))
    for i in sorted(range(len(copies)), key=lambda i: copies[i][0]):
        order.setdefault(labels[i], len(order))
    assignment = {u: order[raw[u]] for u in network.users}
    copy_assignment = {copies[i]: order[labels[i]] for i in range(len(copies))}
    return assignment, copy_assignment


def multiview_cluster(
    network: MultiViewNetwork,
    resolution: float = 1.0,
    coupling: float = 1.0,
    seed: int = 42,
) -> Clustering:
    """Cluster the multi-view network; deterministic for a fixed seed.

    The all-in-one and all-singletons partitions are evaluated as floors and
    returned instead if the optimizer ends below either of them.
    """
    if not network.users:
        raise NetworkError("cannot cluster an empty network")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if coupling < 0:
        raise ValueError("coupling must be non-negative")

    g, copies = _build_supra(network, coupling)
    labels = louvain_supra(g, resolution, seed)
    assignment, copy_assignment = _relabel_users(network, copies, labels, g)
    objective = copy_objective(network, copy_assignment, resolution, coupling)

    one = {u: 0 for u in network.users}
    singles = {u: i for i, u in enumerate(network.users)}
    for floor in (one, singles):
        q = multiview_objective(network, floor, resolution, coupling)
        if q > objective + 1e-12:
            assignment, copy_assignment, objective = floor, _lift(network, floor), q
    return Clustering(assignment, resolution, coupling, seed, objective, copy_assignment)


def cluster_density(network: MultiViewNetwork, members: Sequence[str]) -> Tuple[float, float]:
    """(density, total intra-cluster weight summed over views)."""
    s = set(members)
    n = len(s)
    total = 0.0
    for v in network.views:
        for (a, b), w in v.edges.items():
            if a in s and b in s:
                total += w
    if n < 2:
        return 0.0, total
    return total / (n * (n - 1) / 2), total


def densest_cluster(network: MultiViewNetwork, clustering: Clustering, min_size: int = 2) -> int:
    """Cluster id of size >= ``min_size`` with the highest density.

    Ties prefer the larger total weight, then the smaller id.
    """
    if min_size < 2:
        raise ValueError("min_size must be >= 2")
    best = None
    for cid, members in clustering.clusters().items():
        if len(members) < min_size:
            continue
        density, total = cluster_density(network, members)
        key = (-density, -total, cid)
        if best is None or key < best:
            best = key
    if best is None:
        raise NetworkError(f"no cluster has at least {min_size} members")
    return best[2]


def write_clustering(clustering: Clustering, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            f"# resolution={clustering.resolution!r} coupling={clustering.coupling!r} "
            f"seed={clustering.seed} objective={clustering.objective!r}\n"
        )
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "cluster"])
        for u in sorted(clustering.assignment):
            writer.writerow([u, clustering.assignment[u]])


def read_clustering(path: Path) -> Clustering:
    params = {}
    assignment = {}
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if first.startswith("#"):
            for item in first[1:].split():
                key, _, value = item.partition("=")
                params[key] = value
        else:
            fh.seek(0)
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["user_id", "cluster"]:
            raise ValueError(f"{path}: unexpected header {header}")
        for user, cluster in reader:
            assignment[user] = int(cluster)
    return Clustering(
        assignment,
        resolution=float(params.get("resolution", 1.0)),
        coupling=float(params.get("coupling", 1.0)),
        seed=int(params.get("seed", 42)),
        objective=float(params.get("objective", "nan")),
    )
