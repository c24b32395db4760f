"""Synthetic corpora: uniform background chatter plus planted campaigns.

Background tweets are spread uniformly over the scenario duration, with
authors and actions drawn uniformly.  A campaign repeatedly fires bursts
in which every member posts the same action(s) within ``jitter_seconds``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .actions import STANDARD_TYPES, ActionType
from .ingest import Tweet

BACKGROUND = "background"
DEFAULT_START = 1585699200  # 2020-04-01T00:00:00Z


@dataclass
class CampaignSpec:
    k_users: int
    m_actions: int = 1
    repetitions: int = 1
    jitter_seconds: int = 60
    action_types: Tuple[str, ...] = ("hashtag", "url", "mention")
    regional_split: bool = False

    def __post_init__(self):
        self.action_types = tuple(self.action_types)
        if self.k_users < 2:
            raise ValueError("a campaign needs at least 2 users")
        if self.m_actions < 1 or self.repetitions < 0:
            raise ValueError("m_actions must be >= 1 and repetitions >= 0")
        if self.jitter_seconds < 0:
            raise ValueError("jitter_seconds must be non-negative")
        kinds = [ActionType.parse(t) for t in self.action_types]
        if not kinds or any(k not in STANDARD_TYPES for k in kinds):
            raise ValueError("campaign action types must be a non-empty subset of hashtag, url, mention")


@dataclass
class Scenario:
    n_background_users: int = 1000
    n_background_tweets: int = 10000
    n_actions: int = 100
    duration_seconds: int = 7 * 86400
    campaigns: List[CampaignSpec] = field(default_factory=list)
    seed: int = 0
    start_timestamp: int = DEFAULT_START
    background_types: Tuple[str, ...] = ("hashtag", "url", "mention")
    overlap: bool = False

    def __post_init__(self):
        self.campaigns = [c if isinstance(c, CampaignSpec) else CampaignSpec(**c) for c in self.campaigns]
        self.background_types = tuple(self.background_types)
        for name in ("n_background_users", "n_background_tweets", "n_actions"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.duration_seconds <= 0:
            raise ValueError("duration_seconds must be positive")
        if self.n_background_tweets and (self.n_background_users == 0 or self.n_actions == 0):
            raise ValueError("background tweets need at least one user and one action")
        for c in self.campaigns:
            if c.jitter_seconds > self.duration_seconds:
                raise ValueError("campaign jitter exceeds the scenario duration")

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def load_scenario(path: Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return Scenario.from_dict(json.load(fh))


def _background_value(kind: str, a: int) -> str:
    if kind == "hashtag":
        return f"tag{a}"
    if kind == "url":
        return f"https://news{a}.example.com/story"
    return f"target{a}"


def _campaign_value(kind: str, campaign: int, a: int) -> str:
    if kind == "hashtag":
        return f"camp{campaign}tag{a}"
    if kind == "url":
        return f"https://camp{campaign}.example.org/{a}"
    return f"camp{campaign}target{a}"


def generate(scenario: Scenario) -> Tuple[List[Tweet], Dict[str, str]]:
    """Return (tweets sorted by time and id, user -> label).

    Labels are ``campaign-<i>`` for planted members and ``background``
    otherwise.  Output depends only on the scenario, including its seed.
    """
    rng = np.random.default_rng(scenario.seed)
    start = scenario.start_timestamp
    labels: Dict[str, str] = {}
    drafts = []

    bg_width = len(str(max(scenario.n_background_users - 1, 0)))
    for i in range(scenario.n_background_users):
        labels[f"u{i:0{bg_width}d}"] = BACKGROUND
    n = scenario.n_background_tweets
    if n:
        times = rng.integers(0, scenario.duration_seconds, size=n)
        authors = rng.integers(0, scenario.n_background_users, size=n)
        picks = {kind: rng.integers(0, scenario.n_actions, size=n) for kind in scenario.background_types}
        for j in range(n):
            ents = {kind: (_background_value(kind, int(picks[kind][j])),) for kind in scenario.background_types}
            drafts.append((int(times[j]), f"u{int(authors[j]):0{bg_width}d}", ents))

    for ci, camp in enumerate(scenario.campaigns):
        members = [f"c{ci}u{i:03d}" for i in range(camp.k_users)]
        for u in members:
            labels[u] = f"campaign-{ci}"
        latest = scenario.duration_seconds - camp.jitter_seconds
        for _ in range(camp.repetitions):
            burst = int(rng.integers(0, latest + 1))
            chosen = {}
            for kind in camp.action_types:
                a = int(rng.integers(0, scenario.n_actions if scenario.overlap and scenario.n_actions else camp.m_actions))
                chosen[kind] = (_background_value(kind, a) if scenario.overlap else _campaign_value(kind, ci, a),)
            offsets = rng.integers(0, camp.jitter_seconds + 1, size=camp.k_users)
            for ui, u in enumerate(members):
                ents = dict(chosen)
                if camp.regional_split:
                    ents["hashtag"] = ents.get("hashtag", ()) + (f"camp{ci}region{ui}",)
                drafts.append((burst + int(offsets[ui]), u, ents))

    id_width = len(str(max(len(drafts) - 1, 0)))
    tweets = [
        Tweet(
            tweet_id=f"t{j:0{id_width}d}",
            user_id=user,
            timestamp=start + t,
            hashtags=ents.get("hashtag", ()),
            urls=ents.get("url", ()),
            mentions=ents.get("mention", ()),
        )
        for j, (t, user, ents) in enumerate(drafts)
    ]
    tweets.sort(key=lambda tw: (tw.timestamp, tw.tweet_id))
    return tweets, labels


def write_labels(labels: Dict[str, str], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "label"])
        for u in sorted(labels):
            writer.writerow([u, labels[u]])


def read_labels(path: Path) -> Dict[str, str]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return {row["user_id"]: row["label"] for row in reader}
