"""Append-only, replayable persistence for workspace events.

Storage format: one newline-delimited JSON record per event, preceded by a
single header line naming the format version.  Appends are flushed and
fsync'd before the new sequence number is acknowledged; recovery tolerates
exactly one truncated trailing line (an unacknowledged partial write) and
rejects anything else.

Replay is a pure fold: identical logs produce identical states, and
``replay(events[:n])`` followed by ``apply_event`` of event n+1 equals
``replay(events[:n+1])``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import GapError, StorageError, ValidationError
from .events import EventKind, EventRecord, format_utc, parse_utc
from .model import (
    ArgumentKind,
    EvidenceItem,
    Hypothesis,
    Polarity,
    QualityRating,
    Role,
    User,
    Vote,
    VoteDirection,
)

LOG_FORMAT = "credence-events"
LOG_VERSION = 1
SNAPSHOT_FORMAT = "credence-snapshot"
SNAPSHOT_VERSION = 1

# Authored content of an erased user is retained under this pseudo-author;
# it is not a registered user and never counts as a contributor.
TOMBSTONE_AUTHOR = "erased"


@dataclass
class WorkspaceState:
    users: dict[str, User] = field(default_factory=dict)
    hypotheses: dict[str, Hypothesis] = field(default_factory=dict)
    evidence: dict[str, EvidenceItem] = field(default_factory=dict)
    votes: dict[tuple[str, str], Vote] = field(default_factory=dict)
    ratings: dict[tuple[str, str], QualityRating] = field(default_factory=dict)
    erased: dict[str, str] = field(default_factory=dict)  # user_id -> erased-at ISO text
    head_seq: int = 0

    def hypothesis_votes(self, hypothesis_id: str) -> list[Vote]:
        return [v for (h, _), v in self.votes.items() if h == hypothesis_id]

    def hypothesis_evidence(self, hypothesis_id: str) -> list[EvidenceItem]:
        return [e for e in self.evidence.values() if e.hypothesis_id == hypothesis_id]

    def evidence_ratings(self, evidence_id: str) -> list[QualityRating]:
        return [r for (e, _), r in self.ratings.items() if e == evidence_id]

    def serialize(self) -> bytes:
        """Canonical JSON bytes; equal states serialize identically."""
        doc = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "head_seq": self.head_seq,
            "users": [
                {
                    "user_id": u.user_id,
                    "display_name": u.display_name,
                    "role": u.role.value,
                    "group_label": u.group_label,
                    "registered_at": format_utc(u.registered_at),
                }
                for u in sorted(self.users.values(), key=lambda u: u.user_id)
            ],
            "hypotheses": [
                {
                    "hypothesis_id": h.hypothesis_id,
                    "title": h.title,
                    "description": h.description,
                    "tag": h.tag,
                    "author": h.author,
                    "added_on": format_utc(h.added_on),
                }
                for h in sorted(self.hypotheses.values(), key=lambda h: h.hypothesis_id)
            ],
            "evidence": [
                {
                    "evidence_id": e.evidence_id,
                    "hypothesis_id": e.hypothesis_id,
                    "url": e.url,
                    "argument_text": e.argument_text,
                    "argument_kind": e.argument_kind.value,
                    "polarity": e.polarity.value,
                    "author": e.author,
                    "added_on": format_utc(e.added_on),
                }
                for e in sorted(self.evidence.values(), key=lambda e: e.evidence_id)
            ],
            "votes": [
                {
                    "hypothesis_id": v.hypothesis_id,
                    "voter": v.voter,
                    "direction": v.direction.value,
                    "cast_at": format_utc(v.cast_at),
                }
                for v in sorted(self.votes.values(), key=lambda v: (v.hypothesis_id, v.voter))
            ],
            "ratings": [
                {
                    "evidence_id": r.evidence_id,
                    "rater": r.rater,
                    "tier": r.tier,
                    "rated_at": format_utc(r.rated_at),
                }
                for r in sorted(self.ratings.values(), key=lambda r: (r.evidence_id, r.rater))
            ],
            "erased": dict(sorted(self.erased.items())),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")

    @classmethod
    def deserialize(cls, raw: bytes) -> "WorkspaceState":
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise StorageError(f"malformed snapshot: {exc}") from exc
        if doc.get("format") != SNAPSHOT_FORMAT or doc.get("version") != SNAPSHOT_VERSION:
            raise StorageError(f"unsupported snapshot header: {doc.get('format')} v{doc.get('version')}")
        state = cls(head_seq=int(doc["head_seq"]))
        for u in doc["users"]:
            state.users[u["user_id"]] = User(
                user_id=u["user_id"],
                display_name=u["display_name"],
                role=Role(u["role"]),
                group_label=u["group_label"],
                registered_at=parse_utc(u["registered_at"]),
            )
        for h in doc["hypotheses"]:
            state.hypotheses[h["hypothesis_id"]] = Hypothesis(
                hypothesis_id=h["hypothesis_id"],
                title=h["title"],
                description=h["description"],
                tag=h["tag"],
                author=h["author"],
                added_on=parse_utc(h["added_on"]),
            )
        for e in doc["evidence"]:
            state.evidence[e["evidence_id"]] = EvidenceItem(
                evidence_id=e["evidence_id"],
                hypothesis_id=e["hypothesis_id"],
                url=e["url"],
                argument_text=e["argument_text"],
                argument_kind=ArgumentKind(e["argument_kind"]),
                polarity=Polarity(e["polarity"]),
                author=e["author"],
                added_on=parse_utc(e["added_on"]),
            )
        for v in doc["votes"]:
            state.votes[(v["hypothesis_id"], v["voter"])] = Vote(
                hypothesis_id=v["hypothesis_id"],
                voter=v["voter"],
                direction=VoteDirection(v["direction"]),
                cast_at=parse_utc(v["cast_at"]),
            )
        for r in doc["ratings"]:
            state.ratings[(r["evidence_id"], r["rater"])] = QualityRating(
                evidence_id=r["evidence_id"],
                rater=r["rater"],
                tier=int(r["tier"]),
                rated_at=parse_utc(r["rated_at"]),
            )
        state.erased = dict(doc["erased"])
        return state


def apply_event(state: WorkspaceState, event: EventRecord) -> WorkspaceState:
    """Fold one event into the state (mutates and returns ``state``)."""
    if event.seq != state.head_seq + 1:
        raise GapError(f"expected seq {state.head_seq + 1}, got {event.seq}")
    payload = event.payload
    kind = event.kind

    if kind is EventKind.USER_REGISTERED:
        user_id = payload["user_id"]
        if user_id in state.users or user_id in state.erased:
            raise ValidationError(f"user id already used: {user_id}")
        state.users[user_id] = User(
            user_id=user_id,
            display_name=payload["display_name"],
            role=Role(payload["role"]),
            group_label=payload.get("group_label"),
            registered_at=event.at,
        )
    elif kind is EventKind.HYPOTHESIS_CREATED:
        hypothesis_id = payload["hypothesis_id"]
        if hypothesis_id in state.hypotheses:
            raise ValidationError(f"hypothesis id already used: {hypothesis_id}")
        state.hypotheses[hypothesis_id] = Hypothesis(
            hypothesis_id=hypothesis_id,
            title=payload["title"],
            description=payload["description"],
            tag=payload["tag"],
            author=event.actor,
            added_on=event.at,
        )
    elif kind is EventKind.EVIDENCE_ADDED:
        evidence_id = payload["evidence_id"]
        if evidence_id in state.evidence:
            raise ValidationError(f"evidence id already used: {evidence_id}")
        state.evidence[evidence_id] = EvidenceItem(
            evidence_id=evidence_id,
            hypothesis_id=payload["hypothesis_id"],
            url=payload["url"],
            argument_text=payload["argument_text"],
            argument_kind=ArgumentKind(payload["argument_kind"]),
            polarity=Polarity(payload["polarity"]),
            author=event.actor,
            added_on=event.at,
        )
        # The submitter's own rank is the item's first rating.
        state.ratings[(evidence_id, event.actor)] = QualityRating(
            evidence_id=evidence_id,
            rater=event.actor,
            tier=int(payload["initial_tier"]),
            rated_at=event.at,
        )
    elif kind is EventKind.VOTE_CAST:
        hypothesis_id = payload["hypothesis_id"]
        state.votes[(hypothesis_id, event.actor)] = Vote(
            hypothesis_id=hypothesis_id,
            voter=event.actor,
            direction=VoteDirection(payload["direction"]),
            cast_at=event.at,
        )
    elif kind is EventKind.VOTE_RETRACTED:
        state.votes.pop((payload["hypothesis_id"], event.actor), None)
    elif kind is EventKind.RATING_SET:
        evidence_id = payload["evidence_id"]
        state.ratings[(evidence_id, event.actor)] = QualityRating(
            evidence_id=evidence_id,
            rater=event.actor,
            tier=int(payload["tier"]),
            rated_at=event.at,
        )
    elif kind is EventKind.USER_ERASED:
        user_id = payload["user_id"]
        state.users.pop(user_id, None)
        state.erased[user_id] = format_utc(event.at)
        for key in [k for k in state.votes if k[1] == user_id]:
            del state.votes[key]
        for key in [k for k in state.ratings if k[1] == user_id]:
            del state.ratings[key]
        for hypothesis_id, h in list(state.hypotheses.items()):
            if h.author == user_id:
                state.hypotheses[hypothesis_id] = Hypothesis(
                    hypothesis_id=h.hypothesis_id,
                    title=h.title,
                    description=h.description,
                    tag=h.tag,
                    author=TOMBSTONE_AUTHOR,
                    added_on=h.added_on,
                )
        for evidence_id, e in list(state.evidence.items()):
            if e.author == user_id:
                state.evidence[evidence_id] = EvidenceItem(
                    evidence_id=e.evidence_id,
                    hypothesis_id=e.hypothesis_id,
                    url=e.url,
                    argument_text=e.argument_text,
                    argument_kind=e.argument_kind,
                    polarity=e.polarity,
                    author=TOMBSTONE_AUTHOR,
                    added_on=e.added_on,
                )
    else:  # pragma: no cover - EventKind is closed
        raise ValidationError(f"unhandled event kind: {kind}")

    state.head_seq = event.seq
    return state


def replay(events, initial: WorkspaceState | None = None) -> WorkspaceState:
    """Fold a contiguous event sequence into a workspace state."""
    state = initial if initial is not None else WorkspaceState()
    for event in events:
        apply_event(state, event)
    return state


class EventLog:
    """In-memory event sequence with optional durable file backing."""

    def __init__(self, path: str | Path | None = None, fsync: bool = True):
        self.path = Path(path) if path is not None else None
        self._fsync = fsync
        self._events: list[EventRecord] = []
        self._fh = None
        if self.path is not None:
            self._open_file()

    def _open_file(self) -> None:
        try:
            exists = self.path.exists() and self.path.stat().st_size > 0
            if exists:
                self._events = list(read_log(self.path))
                self._fh = open(self.path, "a", encoding="utf-8")
            else:
                self._fh = open(self.path, "w", encoding="utf-8")
                header = json.dumps(
                    {"format": LOG_FORMAT, "version": LOG_VERSION}, sort_keys=True, separators=(",", ":")
                )
                self._fh.write(header + "\n")
                self._flush()
        except OSError as exc:
            raise StorageError(f"cannot open event log {self.path}: {exc}") from exc

    def _flush(self) -> None:
        self._fh.flush()
        if self._fsync:
            os.fsync(self._fh.fileno())

    @property
    def head_seq(self) -> int:
        return len(self._events)

    def events(self) -> list[EventRecord]:
        return list(self._events)

    def last_event(self) -> EventRecord | None:
        return self._events[-1] if self._events else None

    def append(self, at, actor: str, kind: EventKind, payload: dict) -> EventRecord:
        """Assign the next seq, persist durably, then acknowledge."""
        record = EventRecord(seq=self.head_seq + 1, at=at, actor=actor, kind=kind, payload=payload)
        try:
            line = record.to_json_line()
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"unserializable event payload: {exc}") from exc
        if self._fh is not None:
            try:
                self._fh.write(line + "\n")
                self._flush()
            except OSError as exc:
                raise StorageError(f"append failed: {exc}") from exc
        self._events.append(record)
        return record

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def read_log(path: str | Path) -> list[EventRecord]:
    """Read a log file, verifying the header and gapless ordering.

    A truncated final line (no trailing newline) is treated as an
    unacknowledged partial append and dropped; any other defect raises.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read event log {path}: {exc}") from exc
    if not raw:
        raise StorageError(f"event log {path} is empty (missing header)")
    text = raw.decode("utf-8", errors="replace")
    lines = text.split("\n")
    # A non-empty final element means the file does not end in a newline:
    # a crash mid-append.  That record was never acknowledged, so drop it.
    body = lines[:-1]

    try:
        header = json.loads(body[0]) if body else None
    except json.JSONDecodeError as exc:
        raise StorageError(f"malformed log header: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != LOG_FORMAT:
        raise StorageError(f"not a {LOG_FORMAT} file: {path}")
    if header.get("version") != LOG_VERSION:
        raise StorageError(f"unsupported log version {header.get('version')}")

    events: list[EventRecord] = []
    for i, line in enumerate(body[1:], start=2):
        record = EventRecord.from_json_line(line)
        if record.seq != len(events) + 1:
            raise GapError(f"line {i}: expected seq {len(events) + 1}, got {record.seq}")
        events.append(record)
    return events


def snapshot(events, at_seq: int) -> bytes:
    """Serialize the state after replaying events 1..at_seq."""
    events = list(events)
    if at_seq < 0 or at_seq > len(events):
        raise ValidationError(f"unknown snapshot seq {at_seq} (head is {len(events)})", code="unknown-seq")
    return replay(events[:at_seq]).serialize()


def load_snapshot(raw: bytes) -> WorkspaceState:
    return WorkspaceState.deserialize(raw)
