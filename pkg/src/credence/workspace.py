"""The command/query service tying validation, the event log and the engine.

All mutations are validated against the current state, appended to the log
under a single writer lock, then folded into the in-memory state.  Queries
recompute aggregates from state on every call; there are no denormalized
counters to go stale.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass
from datetime import datetime

from . import engine, model
from .engine import BeliefEstimate, BetaParams, HorseColor, InteractionGate, Quadrant, Thresholds, WoEResult
from .errors import ValidationError
from .events import EventKind, EventRecord
from .model import (
    ArgumentKind,
    EvidenceItem,
    Hypothesis,
    LintReport,
    Polarity,
    QualityRating,
    Role,
    User,
    Vote,
    VoteDirection,
)
from .store import EventLog, WorkspaceState, apply_event, replay


@dataclass(frozen=True)
class HypothesisAggregate:
    """Everything the feed, dashboard and exports need for one hypothesis."""

    hypothesis: Hypothesis
    up_votes: int
    down_votes: int
    distinct_voters: int
    n_raters: int
    dob: BeliefEstimate
    woe: WoEResult
    avg_quality: float | None
    contributors: frozenset[str]


@dataclass(frozen=True)
class ErasureSummary:
    user_id: str
    erased: bool
    already_erased: bool
    votes_removed: int
    ratings_removed: int
    hypotheses_reattributed: int
    evidence_reattributed: int


class Workspace:
    """A single deliberation workspace over one event log."""

    def __init__(
        self,
        log: EventLog | None = None,
        *,
        prior: BetaParams = engine.UNIFORM_PRIOR,
        gate: InteractionGate = InteractionGate(),
        clock=None,
        id_factory=None,
    ):
        self.log = log if log is not None else EventLog()
        self.prior = prior
        self.gate = gate
        self._clock = clock if clock is not None else model.utc_now
        self._id_factory = id_factory if id_factory is not None else (lambda: uuid.uuid4().hex)
        self._write_lock = threading.Lock()
        self._state = replay(self.log.events())

    @property
    def state(self) -> WorkspaceState:
        return self._state

    def _now(self, now: datetime | None) -> datetime:
        ts = model.require_utc(now if now is not None else self._clock())
        # Event timestamps never run backwards: seq order induces time order.
        last = self.log.last_event()
        if last is not None and ts < last.at:
            ts = last.at
        return ts

    def _append(self, at: datetime, actor: str, kind: EventKind, payload: dict) -> EventRecord:
        event = self.log.append(at, actor, kind, payload)
        apply_event(self._state, event)
        return event

    def _require_user(self, user_id: str) -> User:
        user = self._state.users.get(user_id)
        if user is None:
            raise model.unknown("user", user_id)
        return user

    def _require_hypothesis(self, hypothesis_id: str) -> Hypothesis:
        h = self._state.hypotheses.get(hypothesis_id)
        if h is None:
            raise model.unknown("hypothesis", hypothesis_id)
        return h

    def _require_evidence(self, evidence_id: str) -> EvidenceItem:
        e = self._state.evidence.get(evidence_id)
        if e is None:
            raise model.unknown("evidence", evidence_id)
        return e

    # -- commands ---------------------------------------------------------

    def register_user(
        self,
        display_name: str,
        role: Role = Role.MEMBER,
        group_label: str | None = None,
        *,
        now: datetime | None = None,
        user_id: str | None = None,
    ) -> User:
        if not display_name.strip():
            raise ValidationError("display_name must be non-empty", code="empty-display-name")
        with self._write_lock:
            uid = user_id if user_id is not None else self._id_factory()
            if uid in self._state.users or uid in self._state.erased:
                raise ValidationError(f"user id already used: {uid}")
            at = self._now(now)
            self._append(
                at,
                uid,
                EventKind.USER_REGISTERED,
                {
                    "user_id": uid,
                    "display_name": display_name,
                    "role": Role(role).value,
                    "group_label": group_label,
                },
            )
            return self._state.users[uid]

    def create_hypothesis(
        self, title: str, description: str, tag: str, author: str, now: datetime | None = None
    ) -> tuple[Hypothesis, LintReport]:
        title = model.validate_title(title)
        tag = model.validate_tag(tag)
        report = model.lint_hypothesis(title)
        with self._write_lock:
            if author not in self._state.users:
                raise model.unknown("author", author)
            hypothesis_id = self._id_factory()
            at = self._now(now)
            self._append(
                at,
                author,
                EventKind.HYPOTHESIS_CREATED,
                {
                    "hypothesis_id": hypothesis_id,
                    "title": title,
                    "description": description,
                    "tag": tag,
                    "lint": report.to_dict(),
                },
            )
            return self._state.hypotheses[hypothesis_id], report

    def add_evidence(
        self,
        hypothesis_id: str,
        url: str,
        argument_text: str,
        argument_kind: ArgumentKind | str,
        polarity: Polarity | str,
        initial_tier: int,
        author: str,
        now: datetime | None = None,
    ) -> tuple[EvidenceItem, QualityRating]:
        model.validate_url(url)
        model.validate_argument_text(argument_text)
        model.validate_tier(initial_tier)
        kind = ArgumentKind(argument_kind)
        pol = Polarity(polarity)
        with self._write_lock:
            self._require_user(author)
            self._require_hypothesis(hypothesis_id)
            evidence_id = self._id_factory()
            at = self._now(now)
            self._append(
                at,
                author,
                EventKind.EVIDENCE_ADDED,
                {
                    "evidence_id": evidence_id,
                    "hypothesis_id": hypothesis_id,
                    "url": url,
                    "argument_text": argument_text,
                    "argument_kind": kind.value,
                    "polarity": pol.value,
                    "initial_tier": initial_tier,
                },
            )
            return self._state.evidence[evidence_id], self._state.ratings[(evidence_id, author)]

    def cast_vote(
        self, hypothesis_id: str, voter: str, direction: VoteDirection | str, now: datetime | None = None
    ) -> Vote:
        direction = VoteDirection(direction)
        with self._write_lock:
            if voter not in self._state.users:
                raise model.unknown("voter", voter)
            self._require_hypothesis(hypothesis_id)
            existing = self._state.votes.get((hypothesis_id, voter))
            if existing is not None and existing.direction is direction:
                return existing  # identical re-vote: no state change, no event
            at = self._now(now)
            self._append(
                at,
                voter,
                EventKind.VOTE_CAST,
                {"hypothesis_id": hypothesis_id, "direction": direction.value},
            )
            return self._state.votes[(hypothesis_id, voter)]

    def retract_vote(self, hypothesis_id: str, voter: str, now: datetime | None = None) -> bool:
        with self._write_lock:
            if voter not in self._state.users:
                raise model.unknown("voter", voter)
            self._require_hypothesis(hypothesis_id)
            if (hypothesis_id, voter) not in self._state.votes:
                return False
            at = self._now(now)
            self._append(at, voter, EventKind.VOTE_RETRACTED, {"hypothesis_id": hypothesis_id})
            return True

    def rate_evidence(
        self, evidence_id: str, rater: str, tier: int, now: datetime | None = None
    ) -> QualityRating:
        model.validate_tier(tier)
        with self._write_lock:
            self._require_user(rater)
            self._require_evidence(evidence_id)
            at = self._now(now)
            self._append(at, rater, EventKind.RATING_SET, {"evidence_id": evidence_id, "tier": tier})
            return self._state.ratings[(evidence_id, rater)]

    def erase_user(self, user_id: str, *, actor: str | None = None, now: datetime | None = None) -> ErasureSummary:
        """Remove a user's judgments and identity; retain authored content anonymized."""
        with self._write_lock:
            if user_id in self._state.erased:
                return ErasureSummary(
                    user_id=user_id,
                    erased=False,
                    already_erased=True,
                    votes_removed=0,
                    ratings_removed=0,
                    hypotheses_reattributed=0,
                    evidence_reattributed=0,
                )
            if user_id not in self._state.users:
                raise model.unknown("user", user_id)
            votes = sum(1 for (_, voter) in self._state.votes if voter == user_id)
            ratings = sum(1 for (_, rater) in self._state.ratings if rater == user_id)
            hyps = sum(1 for h in self._state.hypotheses.values() if h.author == user_id)
            items = sum(1 for e in self._state.evidence.values() if e.author == user_id)
            at = self._now(now)
            self._append(at, actor if actor is not None else user_id, EventKind.USER_ERASED, {"user_id": user_id})
            return ErasureSummary(
                user_id=user_id,
                erased=True,
                already_erased=False,
                votes_removed=votes,
                ratings_removed=ratings,
                hypotheses_reattributed=hyps,
                evidence_reattributed=items,
            )

    # -- queries ----------------------------------------------------------

    def aggregate(self, hypothesis_id: str) -> HypothesisAggregate:
        h = self._require_hypothesis(hypothesis_id)
        return self._aggregate(h)

    def _aggregate(self, h: Hypothesis) -> HypothesisAggregate:
        state = self._state
        votes = state.hypothesis_votes(h.hypothesis_id)
        up = sum(1 for v in votes if v.direction is VoteDirection.UP)
        down = len(votes) - up

        items = state.hypothesis_evidence(h.hypothesis_id)
        woe_inputs = []
        all_ratings: list[QualityRating] = []
        raters: set[str] = set()
        for item in items:
            ratings = state.evidence_ratings(item.evidence_id)
            all_ratings.extend(ratings)
            raters.update(r.rater for r in ratings)
            if ratings:
                woe_inputs.append((item.polarity, engine.item_mean_quality(ratings)))
        woe = engine.weight_of_evidence(woe_inputs, n_ratings=len(all_ratings))
        if woe.n_items != len(items):
            woe = WoEResult(
                support_weight=woe.support_weight,
                refute_weight=woe.refute_weight,
                total=woe.total,
                balance=woe.balance,
                n_items=len(items),
                n_ratings=woe.n_ratings,
            )

        contributors: set[str] = set()
        if h.author in state.users:
            contributors.add(h.author)
        contributors.update(v.voter for v in votes)
        contributors.update(e.author for e in items if e.author in state.users)
        contributors.update(raters)

        avg_quality = (
            sum(r.numeric_value for r in all_ratings) / len(all_ratings) if all_ratings else None
        )
        return HypothesisAggregate(
            hypothesis=h,
            up_votes=up,
            down_votes=down,
            distinct_voters=len(votes),
            n_raters=len(raters),
            dob=engine.posterior_belief(up, down, self.prior),
            woe=woe,
            avg_quality=avg_quality,
            contributors=frozenset(contributors),
        )

    def aggregates(self) -> list[HypothesisAggregate]:
        return [self._aggregate(h) for h in self._state.hypotheses.values()]

    def horse_color(self, aggregate: HypothesisAggregate, theta_evidence: float) -> HorseColor:
        return engine.classify_horse(
            aggregate.distinct_voters,
            aggregate.woe.n_items,
            aggregate.n_raters,
            aggregate.woe,
            theta_evidence,
            self.gate,
        )

    def quadrant(self, aggregate: HypothesisAggregate, thresholds: Thresholds) -> Quadrant:
        return engine.classify_quadrant(aggregate.dob.mean, aggregate.woe.total, thresholds)

    def timeline(self, hypothesis_id: str) -> list[engine.TimelinePoint]:
        self._require_hypothesis(hypothesis_id)
        return engine.hypothesis_timeline(self.log.events(), hypothesis_id, self.prior)

    def dashboard(
        self,
        thresholds: Thresholds,
        query: str | None = None,
        sort_key: str = "recency",
        descending: bool = True,
    ) -> list[tuple[HypothesisAggregate, HorseColor, Quadrant]]:
        entries = engine.filter_and_sort(self.aggregates(), query, sort_key, descending)
        return [
            (agg, self.horse_color(agg, thresholds.theta_evidence), self.quadrant(agg, thresholds))
            for agg in entries
        ]
