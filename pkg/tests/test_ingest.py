import csv
import json

import pytest
from hypothesis import given, strategies as st

from syncaction.ingest import (
    CorpusError,
    Tweet,
    canonicalize_url,
    normalize_tag,
    parse_corpus,
    record_to_tweet,
    write_corpus,
    write_error_report,
)


def test_hashtags_lowercased():
    res = parse_corpus(['{"id":"1","user_id":"a","timestamp":0,"hashtags":["CleanBeaches"]}'])
    assert res.errors == []
    assert res.tweets[0].hashtags == ("cleanbeaches",)


def test_iso_timestamp_converted():
    res = parse_corpus(['{"id":"1","user_id":"a","timestamp":"2020-04-01T00:00:00Z"}'])
    assert res.tweets[0].timestamp == 1585699200


def test_iso_with_offset_and_naive():
    a = record_to_tweet({"id": "1", "user_id": "a", "timestamp": "2020-04-01T02:00:00+02:00"})
    b = record_to_tweet({"id": "2", "user_id": "a", "timestamp": "2020-04-01T00:00:00"})
    assert a.timestamp == b.timestamp == 1585699200


def test_empty_stream():
    res = parse_corpus([])
    assert res.tweets == [] and res.errors == []


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("{not json", "malformed JSON"),
        ('{"user_id":"a","timestamp":0}', "'id'"),
        ('{"id":"1","timestamp":0}', "'user_id'"),
        ('{"id":"1","user_id":"a"}', "'timestamp'"),
        ('{"id":"1","user_id":"a","timestamp":-5}', "negative"),
        ('{"id":"1","user_id":"a","timestamp":"yesterday"}', "unparseable"),
        ('{"id":"1","user_id":"a","timestamp":0,"hashtags":"x"}', "array"),
        ('{"id":"1","user_id":"a","timestamp":0,"is_retweet":"yes"}', "boolean"),
        ("[1,2]", "not a JSON object"),
        ("", "empty line"),
    ],
)
def test_bad_records_reported(line, fragment):
    good = '{"id":"ok","user_id":"a","timestamp":0}'
    res = parse_corpus([good, line, good.replace("ok", "ok2")])
    assert [t.tweet_id for t in res.tweets] == ["ok", "ok2"]
    assert len(res.errors) == 1
    assert res.errors[0].line_number == 2
    assert fragment in res.errors[0].reason


def test_duplicate_id_is_an_error():
    line = '{"id":"1","user_id":"a","timestamp":0}'
    res = parse_corpus([line, line])
    assert len(res.tweets) == 1 and res.errors[0].reason.startswith("duplicate id")


def test_strict_mode_aborts():
    with pytest.raises(CorpusError) as exc:
        parse_corpus(['{"id":"1","user_id":"a","timestamp":0}', "oops"], strict=True)
    assert exc.value.line_number == 2


def test_text_fallback_extraction():
    rec = {
        "id": "1",
        "user_id": "a",
        "timestamp": 0,
        "text": "Go #CleanBeaches with @Gov see HTTPS://Example.com/a?utm_source=x&q=1#top. #cleanbeaches",
    }
    tw = record_to_tweet(rec)
    assert tw.hashtags == ("cleanbeaches",)
    assert tw.mentions == ("gov",)
    assert tw.urls == ("https://example.com/a?q=1",)


def test_explicit_lists_win_over_text():
    tw = record_to_tweet({"id": "1", "user_id": "a", "timestamp": 0, "text": "#a #b", "hashtags": ["#C"]})
    assert tw.hashtags == ("c",)
    assert tw.urls == () and tw.mentions == ()


def test_entities_deduplicated_in_order():
    tw = record_to_tweet({"id": "1", "user_id": "a", "timestamp": 0, "hashtags": ["B", "a", "#b", "A"]})
    assert tw.hashtags == ("b", "a")


def test_retweet_flag_kept():
    tw = record_to_tweet({"id": "1", "user_id": "a", "timestamp": 0, "is_retweet": True})
    assert tw.is_retweet


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("HTTPS://Example.com/a?utm_source=x&q=1#top", "https://example.com/a?q=1"),
        ("https://example.com/", "https://example.com"),
        ("not a url", "not a url"),
        ("  Not A URL  ", "not a url"),
        ("https://example.com/?utm_medium=a&utm_campaign=b", "https://example.com"),
        ("http://User@Host.COM:8080/Path/?b=2&a=1", "http://User@host.com:8080/Path/?b=2&a=1"),
        ("https://example.com/a%20b?x=%2F", "https://example.com/a%20b?x=%2F"),
    ],
)
def test_canonicalize_url(raw, expected):
    assert canonicalize_url(raw) == expected


@pytest.mark.parametrize(
    "raw, kind, expected",
    [("#CleanBeaches", "hashtag", "cleanbeaches"), ("@SomeUser", "mention", "someuser"), ("recycle", "hashtag", "recycle")],
)
def test_normalize_tag(raw, kind, expected):
    assert normalize_tag(raw, kind) == expected


def test_normalize_tag_rejects_unknown_kind():
    with pytest.raises(ValueError):
        normalize_tag("x", "emoji")


@given(st.text(min_size=1))
def test_canonicalize_url_idempotent(raw):
    once = canonicalize_url(raw)
    assert canonicalize_url(once) == once


@given(
    st.builds(
        lambda scheme, host, path, q, frag: f"{scheme}://{host}{path}?{q}#{frag}",
        st.sampled_from(["http", "HTTPS", "Ftp"]),
        st.from_regex(r"[A-Za-z0-9.-]{1,15}", fullmatch=True),
        st.from_regex(r"(/[A-Za-z0-9%._-]{0,6}){0,3}", fullmatch=True),
        st.from_regex(r"([A-Za-z_]{1,6}=[A-Za-z0-9]{0,4}&?){0,4}", fullmatch=True),
        st.text(max_size=5),
    )
)
def test_canonicalize_url_idempotent_on_urls(raw):
    once = canonicalize_url(raw)
    assert canonicalize_url(once) == once
    scheme = once.split("://", 1)[0]
    assert scheme == scheme.lower()
    assert "utm_" not in once.split("?", 1)[-1] or "?" not in once


@given(st.text(min_size=1), st.sampled_from(["hashtag", "mention"]))
def test_normalize_tag_idempotent(raw, kind):
    once = normalize_tag(raw, kind)
    if once:
        assert normalize_tag(once, kind) == once


@given(st.lists(st.one_of(st.just("garbage"), st.just(""), st.integers(0, 10**6).map(str)), max_size=30))
def test_tweets_plus_errors_equals_lines(ids):
    lines = [
        line if line in ("garbage", "") else json.dumps({"id": line, "user_id": "u", "timestamp": int(line)})
        for line in ids
    ]
    res = parse_corpus(lines)
    assert len(res.tweets) + len(res.errors) == len(lines)
    assert [t.tweet_id for t in res.tweets] == list(dict.fromkeys(i for i in ids if i not in ("garbage", "")))


def test_renormalization_is_noop(tmp_path):
    lines = [
        json.dumps({"id": "1", "user_id": "a", "timestamp": 5, "hashtags": ["#X", "y"], "urls": ["HTTP://A.com/"], "mentions": ["@M"]}),
        json.dumps({"id": "2", "user_id": "b", "timestamp": "2020-01-01T00:00:00Z", "text": "#Tag http://x.com/?utm_id=1"}),
    ]
    first = parse_corpus(lines).tweets
    path = tmp_path / "c.jsonl"
    write_corpus(first, path)
    second = parse_corpus(path.read_text(encoding="utf-8").splitlines()).tweets
    assert second == first


def test_error_report_csv(tmp_path):
    res = parse_corpus(["x", '{"id":"1","user_id":"a","timestamp":0}', "y"])
    path = tmp_path / "errors.csv"
    write_error_report(res.errors, path)
    rows = list(csv.reader(path.open(encoding="utf-8")))
    assert rows[0] == ["line_number", "reason"]
    assert [r[0] for r in rows[1:]] == ["1", "3"]


def test_tweet_is_immutable():
    tw = Tweet("1", "a", 0)
    with pytest.raises(AttributeError):
        tw.user_id = "b"
