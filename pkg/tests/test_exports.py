"""CSV/JSON export schema, quoting, redaction, and user-data export."""

import csv
import io
import json
from datetime import datetime, timedelta, timezone

import pytest

from credence.errors import UnknownEntityError
from credence.exports import (
    CSV_HEADER,
    ERASED_AUTHOR,
    REDACTED_AUTHOR,
    export_csv,
    export_json,
    export_user_data,
)
from credence.workspace import Workspace

T0 = datetime(2024, 5, 1, tzinfo=timezone.utc)

EXPECTED_HEADER = (
    "AddedOn,Title,Description,TagName,DegreeOfBelief,WeightOfEvidence,AvgQuality,"
    "UpVotes,DownVotes,VoteCount,RatingCount,TotalContributors,Authors"
)


def _clock():
    state = [T0]

    def tick(seconds=60):
        state[0] += timedelta(seconds=seconds)
        return state[0]

    return tick


def _workspace_with_votes(up=5, down=0):
    ws = Workspace()
    tick = _clock()
    author = ws.register_user("Avery Author", now=tick())
    voters = [ws.register_user(f"voter-{i:02d}", now=tick(1)) for i in range(up + down)]
    h, _ = ws.create_hypothesis(
        "Nursing home elderly patient nutrition documentation needs to be automated",
        "most records are still on paper",
        "Nutrition",
        author.user_id,
        now=tick(),
    )
    for i in range(up):
        ws.cast_vote(h.hypothesis_id, voters[i].user_id, "up", now=tick(1))
    for i in range(down):
        ws.cast_vote(h.hypothesis_id, voters[up + i].user_id, "down", now=tick(1))
    return ws, h, author, voters, tick


def test_header_is_exact():
    ws = Workspace()
    data = export_csv(ws).decode("utf-8")
    assert data.splitlines()[0] == EXPECTED_HEADER


def test_empty_workspace_is_header_only():
    data = export_csv(Workspace()).decode("utf-8")
    assert data == EXPECTED_HEADER + "\r\n"


def test_five_upvote_row():
    ws, *_ = _workspace_with_votes(5, 0)
    reader = csv.DictReader(io.StringIO(export_csv(ws).decode("utf-8")))
    row = next(reader)
    assert row["DegreeOfBelief"] == "0.9"
    assert row["UpVotes"] == "5"
    assert row["DownVotes"] == "0"
    assert row["VoteCount"] == "5"
    assert row["AvgQuality"] == ""  # no evidence yet
    assert row["TotalContributors"] == "6"  # author + five voters
    assert row["Authors"] == "Avery Author"


def test_vote_count_is_sum_everywhere():
    ws, h, _, _, tick = _workspace_with_votes(3, 2)
    reader = csv.DictReader(io.StringIO(export_csv(ws).decode("utf-8")))
    for row in reader:
        assert int(row["VoteCount"]) == int(row["UpVotes"]) + int(row["DownVotes"])


def test_comma_in_title_is_quoted():
    ws = Workspace()
    tick = _clock()
    author = ws.register_user("A", now=tick())
    ws.create_hypothesis(
        'Laptops, tablets and phones should all be encrypted "at rest"',
        "",
        "security",
        author.user_id,
        now=tick(),
    )
    raw = export_csv(ws).decode("utf-8")
    line = raw.splitlines()[1]
    assert '"Laptops, tablets and phones should all be encrypted ""at rest"""' in line
    # And it still parses back to the original text.
    row = next(csv.DictReader(io.StringIO(raw)))
    assert row["Title"] == 'Laptops, tablets and phones should all be encrypted "at rest"'


def test_rows_sorted_by_added_on():
    ws = Workspace()
    tick = _clock()
    author = ws.register_user("A", now=tick())
    ws.create_hypothesis("Older idea should be listed first in all exports", "", "t", author.user_id, now=tick())
    ws.create_hypothesis("Newer idea should be listed second in all exports", "", "t", author.user_id, now=tick())
    rows = list(csv.DictReader(io.StringIO(export_csv(ws).decode("utf-8"))))
    assert [r["Title"].split()[0] for r in rows] == ["Older", "Newer"]
    assert rows[0]["AddedOn"] < rows[1]["AddedOn"]


def test_redaction_withholds_authors():
    ws, *_ = _workspace_with_votes(2, 0)
    rows = list(csv.DictReader(io.StringIO(export_csv(ws, redact_authors=True).decode("utf-8"))))
    assert all(r["Authors"] == REDACTED_AUTHOR for r in rows)
    assert b"Avery Author" not in export_csv(ws, redact_authors=True)


def test_avg_quality_and_rating_count():
    ws, h, author, voters, tick = _workspace_with_votes(2, 0)
    item, _ = ws.add_evidence(
        h.hypothesis_id, "https://example.org/gov", "report shows gains", "induction",
        "supports", 9, voters[0].user_id, now=tick(),
    )
    ws.rate_evidence(item.evidence_id, voters[1].user_id, 7, now=tick())
    row = next(csv.DictReader(io.StringIO(export_csv(ws).decode("utf-8"))))
    assert row["RatingCount"] == "2"
    assert row["AvgQuality"] == "4.5"  # (5.0 + 4.0) / 2
    assert row["WeightOfEvidence"] == "4.5"  # single item at its mean quality


def test_csv_is_deterministic():
    ws, *_ = _workspace_with_votes(4, 1)
    assert export_csv(ws) == export_csv(ws)


def test_json_mirrors_rows_and_carries_evidence():
    ws, h, author, voters, tick = _workspace_with_votes(2, 0)
    ws.add_evidence(
        h.hypothesis_id, "https://example.org/a", "arg", "analogy", "refutes", 5, voters[0].user_id, now=tick()
    )
    doc = json.loads(export_json(ws).decode("utf-8"))
    assert doc["export_version"] == 1
    (row,) = doc["hypotheses"]
    for column in CSV_HEADER:
        assert column in row
    assert len(row["evidence"]) == 1
    assert row["evidence"][0]["polarity"] == "refutes"
    assert doc["flags"] == []


def test_user_data_lists_exactly_their_events():
    ws, h, author, voters, tick = _workspace_with_votes(2, 0)
    doc = export_user_data(ws, voters[0].user_id)
    assert doc["status"] == "active"
    assert doc["profile"]["display_name"] == "voter-00"
    kinds = [e["kind"] for e in doc["events"]]
    assert kinds == ["user_registered", "vote_cast"]


def test_user_data_unknown_user():
    ws, *_ = _workspace_with_votes(1, 0)
    with pytest.raises(UnknownEntityError):
        export_user_data(ws, "f" * 32)


def test_user_data_tombstone_after_erasure():
    ws, h, author, voters, tick = _workspace_with_votes(2, 0)
    ws.erase_user(voters[0].user_id, now=tick())
    doc = export_user_data(ws, voters[0].user_id)
    assert doc["status"] == "erased"
    assert "voter-00" not in json.dumps(doc)


def test_erasure_scrubs_exports():
    ws, h, author, voters, tick = _workspace_with_votes(3, 0)
    erased = voters[1]
    ws.erase_user(erased.user_id, now=tick())
    for blob in (export_csv(ws), export_json(ws)):
        assert erased.user_id.encode() not in blob
        assert b"voter-01" not in blob


def test_erased_author_shows_tombstone_marker():
    ws, h, author, voters, tick = _workspace_with_votes(2, 0)
    ws.erase_user(author.user_id, now=tick())
    row = next(csv.DictReader(io.StringIO(export_csv(ws).decode("utf-8"))))
    assert row["Authors"] == ERASED_AUTHOR
    # erased author no longer counts as a contributor
    assert row["TotalContributors"] == "2"


def test_export_self_consistency_on_simulated_workspace():
    from credence.engine import posterior_belief
    from credence.sim import benchmark_config, simulate

    ws = simulate(benchmark_config(5), max_events=600).workspace
    rows = list(csv.DictReader(io.StringIO(export_csv(ws).decode("utf-8"))))
    assert rows
    for row in rows:
        up, down = int(row["UpVotes"]), int(row["DownVotes"])
        assert int(row["VoteCount"]) == up + down
        assert row["DegreeOfBelief"] == posterior_belief(up, down).display
