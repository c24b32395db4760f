import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from syncaction.actions import ActionEvent  # noqa: E402


def make_group(pairs, key="k"):
    """Time-sorted events from (user, timestamp) pairs."""
    events = [ActionEvent(u, t, key, f"t{i:05d}") for i, (u, t) in enumerate(pairs)]
    return sorted(events, key=lambda e: (e.timestamp, e.tweet_id))


@pytest.fixture
def group():
    return make_group


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome.upper()[:4], props.get("measured", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, measured in sorted(lines, key=lambda x: int(x[0].split()[0])):
        terminalreporter.write_line(f"{status:<4}  {criterion}  [{measured}]")
