"""Action extraction: tweets become per-action-type event streams."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple

from .ingest import Tweet

KEY_SEPARATOR = "\x1f"


class ActionType(enum.Enum):
    HASHTAG = "hashtag"
    URL = "url"
    MENTION = "mention"
    HASHTAG_URL = "hashtag-url"
    URL_MENTION = "url-mention"
    HASHTAG_MENTION = "hashtag-mention"

    @property
    def components(self) -> Tuple["ActionType", ...]:
        return _COMPONENTS[self]

    @property
    def is_higher_order(self) -> bool:
        return len(self.components) == 2

    @classmethod
    def parse(cls, name: str) -> "ActionType":
        try:
            return cls(name.strip().lower().replace("_", "-"))
        except ValueError:
            valid = ", ".join(t.value for t in cls)
            raise ValueError(f"unknown action type {name!r} (expected one of: {valid})") from None

    @classmethod
    def parse_list(cls, text: str) -> List["ActionType"]:
        out = []
        for part in text.split(","):
            if part.strip():
                t = cls.parse(part)
                if t not in out:
                    out.append(t)
        return out


_COMPONENTS = {
    ActionType.HASHTAG: (ActionType.HASHTAG,),
    ActionType.URL: (ActionType.URL,),
    ActionType.MENTION: (ActionType.MENTION,),
    ActionType.HASHTAG_URL: (ActionType.HASHTAG, ActionType.URL),
    ActionType.URL_MENTION: (ActionType.URL, ActionType.MENTION),
    ActionType.HASHTAG_MENTION: (ActionType.HASHTAG, ActionType.MENTION),
}

STANDARD_TYPES = (ActionType.HASHTAG, ActionType.URL, ActionType.MENTION)
HIGHER_ORDER_TYPES = (ActionType.HASHTAG_URL, ActionType.URL_MENTION, ActionType.HASHTAG_MENTION)


@dataclass(frozen=True, slots=True)
class ActionEvent:
    user_id: str
    timestamp: int
    action_key: str
    tweet_id: str


def escape_component(value: str) -> str:
    # backslash first so the escaping stays injective
    return value.replace("\\", "\\\\").replace(KEY_SEPARATOR, "\\u001f")


def composite_key(first: str, second: str) -> str:
    return escape_component(first) + KEY_SEPARATOR + escape_component(second)


def split_key(key: str) -> Tuple[str, ...]:
    """Inverse of :func:`composite_key` (single keys come back as 1-tuples)."""
    out = []
    for piece in key.split(KEY_SEPARATOR):
        buf = []
        i = 0
        while i < len(piece):
            ch = piece[i]
            if ch == "\\" and piece.startswith("\\u001f", i):
                buf.append(KEY_SEPARATOR)
                i += 6
            elif ch == "\\" and piece.startswith("\\\\", i):
                buf.append("\\")
                i += 2
            else:
                buf.append(ch)
                i += 1
        out.append("".join(buf))
    return tuple(out)


def _entities(tweet: Tweet, kind: ActionType) -> Tuple[str, ...]:
    if kind is ActionType.HASHTAG:
        return tweet.hashtags
    if kind is ActionType.URL:
        return tweet.urls
    return tweet.mentions


def extract_actions(tweet: Tweet, action_type: ActionType) -> List[ActionEvent]:
    """Events for one tweet; higher-order types take the full cross product."""
    comps = action_type.components
    if len(comps) == 1:
        keys: Iterable[str] = (escape_component(v) for v in _entities(tweet, comps[0]))
    else:
        keys = (composite_key(a, b) for a, b in product(_entities(tweet, comps[0]), _entities(tweet, comps[1])))
    seen = dict.fromkeys(keys)
    return [ActionEvent(tweet.user_id, tweet.timestamp, k, tweet.tweet_id) for k in seen]


def event_sort_key(e: ActionEvent):
    return (e.timestamp, e.tweet_id, e.action_key)


def extract_all(
    tweets: Sequence[Tweet],
    action_types: Sequence[ActionType],
    include_retweets: bool = False,
) -> Dict[ActionType, List[ActionEvent]]:
    """Per-type event lists, each sorted by (timestamp, tweet_id, action_key).

    Retweets are skipped unless ``include_retweets`` is set.
    """
    out: Dict[ActionType, List[ActionEvent]] = {t: [] for t in action_types}
    for tw in tweets:
        if tw.is_retweet and not include_retweets:
            continue
        for t in action_types:
            out[t].extend(extract_actions(tw, t))
    for events in out.values():
        events.sort(key=event_sort_key)
    return out
