"""Deterministic CSV/JSON exports and user-data export.

The CSV schema is fixed: one row per hypothesis, sorted by AddedOn
ascending, RFC 4180 quoting, numbers printed to one decimal (half-up).
Identical workspace states produce byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json

from .engine import display_one_decimal
from .errors import UnknownEntityError
from .events import EventRecord, format_utc
from .store import TOMBSTONE_AUTHOR, WorkspaceState
from .workspace import HypothesisAggregate, Workspace

CSV_HEADER = [
    "AddedOn",
    "Title",
    "Description",
    "TagName",
    "DegreeOfBelief",
    "WeightOfEvidence",
    "AvgQuality",
    "UpVotes",
    "DownVotes",
    "VoteCount",
    "RatingCount",
    "TotalContributors",
    "Authors",
]

REDACTED_AUTHOR = "[withheld]"
ERASED_AUTHOR = "[erased]"


def _author_display(state: WorkspaceState, author_id: str, redact: bool) -> str:
    if redact:
        return REDACTED_AUTHOR
    if author_id == TOMBSTONE_AUTHOR:
        return ERASED_AUTHOR
    user = state.users.get(author_id)
    return user.display_name if user is not None else ERASED_AUTHOR


def _sorted_aggregates(workspace: Workspace) -> list[HypothesisAggregate]:
    aggs = workspace.aggregates()
    aggs.sort(key=lambda a: (a.hypothesis.added_on, a.hypothesis.hypothesis_id))
    return aggs


def export_row(workspace: Workspace, agg: HypothesisAggregate, redact_authors: bool) -> dict:
    h = agg.hypothesis
    return {
        "AddedOn": format_utc(h.added_on),
        "Title": h.title,
        "Description": h.description,
        "TagName": h.tag,
        "DegreeOfBelief": agg.dob.display,
        "WeightOfEvidence": display_one_decimal(agg.woe.total),
        "AvgQuality": display_one_decimal(agg.avg_quality) if agg.avg_quality is not None else "",
        "UpVotes": agg.up_votes,
        "DownVotes": agg.down_votes,
        "VoteCount": agg.up_votes + agg.down_votes,
        "RatingCount": agg.woe.n_ratings,
        "TotalContributors": len(agg.contributors),
        "Authors": _author_display(workspace.state, h.author, redact_authors),
    }


def export_csv(workspace: Workspace, redact_authors: bool = False) -> bytes:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writeheader()
    for agg in _sorted_aggregates(workspace):
        writer.writerow(export_row(workspace, agg, redact_authors))
    return buf.getvalue().encode("utf-8")


def export_json(workspace: Workspace, redact_authors: bool = False, flags=None) -> bytes:
    """ExportRow mirror plus per-hypothesis evidence arrays and behaviour flags."""
    state = workspace.state
    hypotheses = []
    for agg in _sorted_aggregates(workspace):
        row = export_row(workspace, agg, redact_authors)
        evidence = []
        for item in sorted(state.hypothesis_evidence(agg.hypothesis.hypothesis_id), key=lambda e: e.added_on):
            ratings = state.evidence_ratings(item.evidence_id)
            evidence.append(
                {
                    "added_on": format_utc(item.added_on),
                    "url": item.url,
                    "argument_text": item.argument_text,
                    "argument_kind": item.argument_kind.value,
                    "polarity": item.polarity.value,
                    "author": _author_display(state, item.author, redact_authors),
                    "n_ratings": len(ratings),
                    "mean_quality": (
                        display_one_decimal(sum(r.numeric_value for r in ratings) / len(ratings))
                        if ratings
                        else ""
                    ),
                }
            )
        row["evidence"] = evidence
        hypotheses.append(row)

    doc = {
        "export_version": 1,
        "head_seq": state.head_seq,
        "hypotheses": hypotheses,
        "flags": [flag_to_dict(f) for f in (flags or [])],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def flag_to_dict(flag) -> dict:
    return {
        "user_ids": sorted(flag.user_ids),
        "kind": flag.kind.value if hasattr(flag.kind, "value") else str(flag.kind),
        "score": flag.score,
        "window": list(flag.window),
        "rationale": flag.rationale,
    }


def export_user_data(workspace: Workspace, user_id: str) -> dict:
    """All events by the user plus their profile, or a tombstone notice."""
    state = workspace.state
    if user_id in state.erased:
        # The notice must not echo the identifier: erasure means no export
        # stream carries it, including this one.
        return {
            "status": "erased",
            "erased_at": state.erased[user_id],
            "notice": "this user's data was erased; judgments removed, authored content anonymized",
        }
    user = state.users.get(user_id)
    if user is None:
        raise UnknownEntityError(f"unknown user: {user_id}", code="unknown-user")
    events = [_event_to_dict(e) for e in workspace.log.events() if e.actor == user_id]
    return {
        "user_id": user.user_id,
        "status": "active",
        "profile": {
            "display_name": user.display_name,
            "role": user.role.value,
            "group_label": user.group_label,
            "registered_at": format_utc(user.registered_at),
        },
        "events": events,
    }


def _event_to_dict(event: EventRecord) -> dict:
    return {
        "seq": event.seq,
        "at": format_utc(event.at),
        "kind": event.kind.value,
        "payload": event.payload,
    }
