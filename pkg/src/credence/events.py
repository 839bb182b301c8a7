"""Append-only event records: the unit of persistence and replay."""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

from .errors import ValidationError


class EventKind(str, Enum):
    USER_REGISTERED = "user_registered"
    HYPOTHESIS_CREATED = "hypothesis_created"
    EVIDENCE_ADDED = "evidence_added"
    VOTE_CAST = "vote_cast"
    VOTE_RETRACTED = "vote_retracted"
    RATING_SET = "rating_set"
    USER_ERASED = "user_erased"


# Events that change the aggregates of some hypothesis.
STATE_CHANGING_KINDS = frozenset(
    {
        EventKind.VOTE_CAST,
        EventKind.VOTE_RETRACTED,
        EventKind.EVIDENCE_ADDED,
        EventKind.RATING_SET,
        EventKind.USER_ERASED,
    }
)


def format_utc(ts: datetime) -> str:
    """ISO-8601 UTC with trailing Z and fixed microsecond width."""
    if ts.tzinfo is None:
        raise ValidationError("timestamps must be timezone-aware UTC")
    return ts.astimezone(timezone.utc).isoformat(timespec="microseconds").replace("+00:00", "Z")


def parse_utc(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValidationError(f"timestamp lacks timezone: {text!r}")
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class EventRecord:
    seq: int
    at: datetime
    actor: str
    kind: EventKind
    payload: dict

    def to_json_line(self) -> str:
        doc = {
            "seq": self.seq,
            "at": format_utc(self.at),
            "actor": self.actor,
            "kind": self.kind.value,
            "payload": self.payload,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    @classmethod
    def from_json_line(cls, line: str) -> "EventRecord":
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed event line: {exc}") from exc
        try:
            return cls(
                seq=int(doc["seq"]),
                at=parse_utc(doc["at"]),
                actor=str(doc["actor"]),
                kind=EventKind(doc["kind"]),
                payload=dict(doc["payload"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"malformed event record: {exc}") from exc
