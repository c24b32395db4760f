"""Tweet corpus parsing and entity normalization.

Input is UTF-8 line-delimited JSON, one tweet object per line.  Entities
(hashtags, mentions, URLs) are normalized here so that later stages can
treat them as opaque action keys.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple
from urllib.parse import urlsplit, urlunsplit

HASHTAG_SIGILS = "#＃"
MENTION_SIGILS = "@＠"

_HASHTAG_RE = re.compile(r"[#＃](\w+)", re.UNICODE)
_MENTION_RE = re.compile(r"[@＠](\w+)", re.UNICODE)
_URL_RE = re.compile(r"https?://\S+", re.IGNORECASE)


class CorpusError(ValueError):
    """Raised in strict mode on the first bad record."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


@dataclass(frozen=True)
class Tweet:
    tweet_id: str
    user_id: str
    timestamp: int
    hashtags: Tuple[str, ...] = ()
    urls: Tuple[str, ...] = ()
    mentions: Tuple[str, ...] = ()
    is_retweet: bool = False
    text: Optional[str] = None

    def to_record(self) -> dict:
        """Serialize back to the input JSONL schema."""
        rec = {
            "id": self.tweet_id,
            "user_id": self.user_id,
            "timestamp": self.timestamp,
            "hashtags": list(self.hashtags),
            "urls": list(self.urls),
            "mentions": list(self.mentions),
            "is_retweet": self.is_retweet,
        }
        if self.text is not None:
            rec["text"] = self.text
        return rec


@dataclass(frozen=True)
class ParseError:
    line_number: int
    reason: str


@dataclass
class ParseResult:
    tweets: List[Tweet] = field(default_factory=list)
    errors: List[ParseError] = field(default_factory=list)


def normalize_tag(raw: str, kind: str = "hashtag") -> str:
    """Strip leading sigils and lowercase a hashtag or mention.

    >>> normalize_tag("#CleanBeaches")
    'cleanbeaches'
    >>> normalize_tag("@SomeUser", "mention")
    'someuser'
    """
    if kind == "hashtag":
        sigils = HASHTAG_SIGILS
    elif kind == "mention":
        sigils = MENTION_SIGILS
    else:
        raise ValueError(f"unknown tag kind {kind!r}")
    return raw.strip().lstrip(sigils).strip().lower()


def _strip_tracking(query: str) -> str:
    # filter raw pieces so surviving parameters keep their exact encoding
    kept = [p for p in query.split("&") if p and not p.split("=", 1)[0].lower().startswith("utm_")]
    return "&".join(kept)


def canonicalize_url(raw: str) -> str:
    """Canonical form of a URL used as an action key.

    Scheme and host are lowercased, the fragment and ``utm_*`` parameters
    are dropped, and a bare ``/`` path is removed.  Anything that does not
    parse as ``scheme://host...`` is returned trimmed and lowercased.
    """
    s = raw.strip()
    try:
        parts = urlsplit(s)
    except ValueError:
        return s.lower()
    if not parts.scheme or not parts.netloc:
        return s.lower()

    netloc = parts.netloc
    if "@" in netloc:
        userinfo, hostport = netloc.rsplit("@", 1)
        netloc = f"{userinfo}@{hostport.lower()}"
    else:
        netloc = netloc.lower()
    path = "" if parts.path == "/" else parts.path
    query = _strip_tracking(parts.query)
    return urlunsplit((parts.scheme.lower(), netloc, path, query, ""))


def _dedup(values: Iterable[str]) -> Tuple[str, ...]:
    seen = dict.fromkeys(v for v in values if v)
    return tuple(seen)


def extract_entities(text: str) -> Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[str, ...]]:
    """Fallback extraction of (hashtags, urls, mentions) from raw text."""
    urls = [m.group(0).rstrip(".,;:!?)\"'") for m in _URL_RE.finditer(text)]
    # drop URLs before scanning so fragments like #top are not read as hashtags
    stripped = _URL_RE.sub(" ", text)
    hashtags = [normalize_tag(m.group(1)) for m in _HASHTAG_RE.finditer(stripped)]
    mentions = [normalize_tag(m.group(1), "mention") for m in _MENTION_RE.finditer(stripped)]
    return _dedup(hashtags), _dedup(canonicalize_url(u) for u in urls), _dedup(mentions)


def parse_timestamp(value) -> int:
    """Epoch seconds from an integer or an ISO-8601 string (naive means UTC)."""
    if isinstance(value, bool):
        raise ValueError("timestamp must be an integer or ISO-8601 string")
    if isinstance(value, int):
        ts = value
    elif isinstance(value, float) and value.is_integer():
        ts = int(value)
    elif isinstance(value, str):
        s = value.strip()
        if s.endswith(("Z", "z")):
            s = s[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(s)
        except ValueError:
            raise ValueError(f"unparseable timestamp {value!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        ts = int(dt.timestamp())
    else:
        raise ValueError("timestamp must be an integer or ISO-8601 string")
    if ts < 0:
        raise ValueError("timestamp is negative")
    return ts


def _as_id(rec: dict, key: str) -> str:
    if key not in rec or rec[key] is None:
        raise ValueError(f"missing required field {key!r}")
    value = rec[key]
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ValueError(f"field {key!r} must be a string")
    value = str(value).strip()
    if not value:
        raise ValueError(f"field {key!r} is empty")
    return value


def _string_list(rec: dict, key: str) -> Optional[List[str]]:
    if key not in rec or rec[key] is None:
        return None
    value = rec[key]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValueError(f"field {key!r} must be an array of strings")
    return value


def record_to_tweet(rec: dict) -> Tweet:
    """Build a normalized Tweet from one decoded JSON object."""
    if not isinstance(rec, dict):
        raise ValueError("record is not a JSON object")
    tweet_id = _as_id(rec, "id")
    user_id = _as_id(rec, "user_id")
    if "timestamp" not in rec:
        raise ValueError("missing required field 'timestamp'")
    timestamp = parse_timestamp(rec["timestamp"])

    text = rec.get("text")
    if text is not None and not isinstance(text, str):
        raise ValueError("field 'text' must be a string")
    is_retweet = rec.get("is_retweet", False)
    if not isinstance(is_retweet, bool):
        raise ValueError("field 'is_retweet' must be a boolean")

    hashtags = _string_list(rec, "hashtags")
    urls = _string_list(rec, "urls")
    mentions = _string_list(rec, "mentions")
    if text is not None and (hashtags is None or urls is None or mentions is None):
        t_tags, t_urls, t_mentions = extract_entities(text)
    else:
        t_tags = t_urls = t_mentions = ()

    return Tweet(
        tweet_id=tweet_id,
        user_id=user_id,
        timestamp=timestamp,
        hashtags=_dedup(normalize_tag(h) for h in hashtags) if hashtags is not None else t_tags,
        urls=_dedup(canonicalize_url(u) for u in urls if u.strip()) if urls is not None else t_urls,
        mentions=(
            _dedup(normalize_tag(m, "mention") for m in mentions) if mentions is not None else t_mentions
        ),
        is_retweet=is_retweet,
        text=text,
    )


def parse_corpus(lines: Iterable[str], strict: bool = False) -> ParseResult:
    """Parse a JSONL stream into tweets plus a per-line error report.

    Every input line produces exactly one tweet or one error.  With
    ``strict=True`` the first error raises :class:`CorpusError` instead.
    """
    result = ParseResult()
    seen_ids = set()
    for lineno, line in enumerate(lines, start=1):
        try:
            if not line.strip():
                raise ValueError("empty line")
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"malformed JSON: {exc.msg}") from None
            tweet = record_to_tweet(rec)
            if tweet.tweet_id in seen_ids:
                raise ValueError(f"duplicate id {tweet.tweet_id!r}")
        except ValueError as exc:
            if strict:
                raise CorpusError(lineno, str(exc)) from None
            result.errors.append(ParseError(lineno, str(exc)))
            continue
        seen_ids.add(tweet.tweet_id)
        result.tweets.append(tweet)
    return result


def _iter_lines(path: Path) -> Iterator[str]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield line.rstrip("\n").rstrip("\r")


def read_corpus(paths: Sequence[Path], strict: bool = False) -> ParseResult:
    """Parse one or more JSONL files; line numbers continue across files."""

    def chained():
        for p in paths:
            yield from _iter_lines(Path(p))

    return parse_corpus(chained(), strict=strict)


def write_error_report(errors: Sequence[ParseError], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["line_number", "reason"])
        for err in errors:
            writer.writerow([err.line_number, err.reason])


def write_corpus(tweets: Sequence[Tweet], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tw in tweets:
            fh.write(json.dumps(tw.to_record(), ensure_ascii=False))
            fh.write("\n")
