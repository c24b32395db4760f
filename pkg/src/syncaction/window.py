"""Synchronized-action edge weights from per-action event streams.

Events are grouped by action key; only events sharing a key are ever
compared.  Within a group a forward-looking window of ``window_seconds``
is anchored at every event, and the anchor's user draws one unit of weight
to each other user in the window who has a *higher* presence (event count
in that window).  Equal presence is settled by a deterministic tie-break so
each co-occurrence is counted exactly once.
"""

from __future__ import annotations

import enum
import math
from collections import Counter, defaultdict, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Sequence, Tuple

from .actions import ActionEvent, event_sort_key

Pair = Tuple[str, str]


class TieBreak(enum.Enum):
    """How an anchor resolves equal presence with another user.

    ``EARLIEST_ANCHOR`` draws when the anchor user's first event in the
    window comes strictly first (then smaller user id on equal seconds), so
    every lone co-occurrence counts once.  ``SMALLER_USER_ID`` draws only
    when the anchor user has the smaller id; because windows look forward,
    a co-occurrence whose earlier event belongs to the larger id is lost.
    """

    EARLIEST_ANCHOR = "earliest-anchor"
    SMALLER_USER_ID = "smaller-user-id"


@dataclass(frozen=True)
class WindowConfig:
    window_seconds: int = 300
    tie_break: TieBreak = TieBreak.EARLIEST_ANCHOR
    popularity_downweight: bool = False

    def __post_init__(self):
        if isinstance(self.window_seconds, bool) or not isinstance(self.window_seconds, int):
            raise TypeError("window_seconds must be an integer")
        if self.window_seconds <= 0:
            raise ValueError("window_seconds must be positive")


class UnsortedGroupError(ValueError):
    """A group handed to a window routine was not time-sorted."""


class EdgeAccumulator(dict):
    """Undirected pair weights keyed by ``(min(u, v), max(u, v))``."""

    def add(self, u: str, v: str, w) -> None:
        if u == v:
            raise ValueError("self-pairs are not allowed")
        key = (u, v) if u < v else (v, u)
        self[key] = self.get(key, 0) + w

    def weight(self, u: str, v: str):
        key = (u, v) if u < v else (v, u)
        return self.get(key, 0)


def group_by_action(events: Iterable[ActionEvent]) -> Dict[str, List[ActionEvent]]:
    """Partition events by action key, each group sorted by (timestamp, tweet_id)."""
    groups: Dict[str, List[ActionEvent]] = defaultdict(list)
    for e in events:
        groups[e.action_key].append(e)
    for g in groups.values():
        g.sort(key=lambda e: (e.timestamp, e.tweet_id))
    return dict(groups)


def _check_sorted(ts: Sequence[int]) -> None:
    for i in range(1, len(ts)):
        if ts[i] < ts[i - 1]:
            raise UnsortedGroupError(f"group not sorted by timestamp at position {i}")


def popularity_scale(n_events: int) -> float:
    return 1.0 / math.log2(1 + n_events)


def sliding_window_edges(group: Sequence[ActionEvent], config: WindowConfig = WindowConfig()) -> EdgeAccumulator:
    n = len(group)
    ts = [e.timestamp for e in group]
    users = [e.user_id for e in group]
    _check_sorted(ts)
    t = config.window_seconds
    earliest = config.tie_break is TieBreak.EARLIEST_ANCHOR
    inc = popularity_scale(n) if config.popularity_downweight and n else 1

    acc: Dict[Pair, float] = {}
    # user -> positions of that user's events inside [lo, hi)
    window: Dict[str, deque] = {}
    lo = hi = 0
    for i in range(n):
        start = ts[i]
        while ts[lo] < start:
            dq = window[users[lo]]
            dq.popleft()
            if not dq:
                del window[users[lo]]
            lo += 1
        end = start + t
        while hi < n and ts[hi] <= end:
            dq = window.get(users[hi])
            if dq is None:
                window[users[hi]] = deque((hi,))
            else:
                dq.append(hi)
            hi += 1
        if len(window) < 2:
            continue
        u = users[i]
        mine = window[u]
        pu = len(mine)
        eu = ts[mine[0]]
        for v, theirs in window.items():
            if v == u:
                continue
            pv = len(theirs)
            if pu < pv:
                draw = True
            elif pu == pv:
                if earliest:
                    ev = ts[theirs[0]]
                    draw = eu < ev or (eu == ev and u < v)
                else:
                    draw = u < v
            else:
                draw = False
            if draw:
                key = (u, v) if u < v else (v, u)
                acc[key] = acc.get(key, 0) + inc
    return EdgeAccumulator(acc)


def fixed_window_edges(group: Sequence[ActionEvent], config: WindowConfig = WindowConfig()) -> EdgeAccumulator:
    """Disjoint-bin baseline: bins of ``window_seconds`` from the group's first timestamp."""
    ts = [e.timestamp for e in group]
    _check_sorted(ts)
    acc = EdgeAccumulator()
    if not group:
        return acc
    t = config.window_seconds
    origin = ts[0]
    inc = popularity_scale(len(group)) if config.popularity_downweight else 1
    bins: Dict[int, Counter] = defaultdict(Counter)
    for e in group:
        bins[(e.timestamp - origin) // t][e.user_id] += 1
    for b in sorted(bins):
        counts = bins[b]
        for x, y in combinations(sorted(counts), 2):
            acc.add(x, y, min(counts[x], counts[y]) * inc)
    return acc


def merge_accumulators(parts: Iterable[EdgeAccumulator]) -> EdgeAccumulator:
    out = EdgeAccumulator()
    for part in parts:
        for key, w in part.items():
            out[key] = out.get(key, 0) + w
    return out


def _edges_for_groups(groups: List[List[ActionEvent]], config: WindowConfig, method: str) -> List[EdgeAccumulator]:
    fn = sliding_window_edges if method == "sliding" else fixed_window_edges
    return [fn(g, config) for g in groups]


def view_edges(
    events: Iterable[ActionEvent],
    config: WindowConfig = WindowConfig(),
    workers: int = 1,
    method: str = "sliding",
) -> EdgeAccumulator:
    """Edge weights of one view from all of its action events.

    Groups are processed independently (in worker processes when
    ``workers > 1``) and merged sequentially in action-key order, so the
    result is bit-identical for every worker count.
    """
    if method not in ("sliding", "fixed"):
        raise ValueError(f"unknown window method {method!r}")
    groups = group_by_action(events)
    ordered = [groups[k] for k in sorted(groups)]
    if workers <= 1 or len(ordered) < 2:
        parts = _edges_for_groups(ordered, config, method)
    else:
        n_chunks = workers * 4
        size = max(1, math.ceil(len(ordered) / n_chunks))
        chunks = [ordered[i : i + size] for i in range(0, len(ordered), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_edges_for_groups, chunks, [config] * len(chunks), [method] * len(chunks))
            parts = [acc for chunk in results for acc in chunk]
    return merge_accumulators(parts)


def sort_events(events: Iterable[ActionEvent]) -> List[ActionEvent]:
    return sorted(events, key=event_sort_key)
