"""Deterministic evidence numerics.

Degree of belief is a Bernoulli-Beta posterior over up/down votes with an
equal-tailed 95% credible interval.  Weight of evidence is the transparent
linear aggregate of per-item mean quality over both polarities (unbounded
above).  Horse colors and decision quadrants are threshold rules on top of
those two numbers.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Iterable, Sequence

from . import betamath
from .errors import ValidationError
from .events import EventKind, EventRecord
from .model import Polarity, tier_numeric


@dataclass(frozen=True)
class BetaParams:
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0.0) or not (self.beta > 0.0):
            raise ValidationError(f"prior parameters must be positive, got {self}")


UNIFORM_PRIOR = BetaParams(1.0, 1.0)


def display_one_decimal(x: float) -> str:
    """Round half-up on the decimal representation, one digit ("0.75" -> "0.8")."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class BeliefEstimate:
    mean: float
    ci_low: float
    ci_high: float
    n_votes: int
    display: str

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_votes": self.n_votes,
            "display": self.display,
        }


@dataclass(frozen=True)
class WoEResult:
    support_weight: float
    refute_weight: float
    total: float
    balance: float | None
    n_items: int
    n_ratings: int

    def to_dict(self) -> dict:
        return {
            "support_weight": self.support_weight,
            "refute_weight": self.refute_weight,
            "total": self.total,
            "balance": self.balance,
            "n_items": self.n_items,
            "n_ratings": self.n_ratings,
        }


class HorseColor(str, Enum):
    WHITE = "white"
    PINK = "pink"
    BLUE = "blue"
    BLACK = "black"


class Quadrant(str, Enum):
    GREEN = "green"
    RED = "red"
    AMBER = "amber"
    WHITE_CONTENTIOUS = "white_contentious"


@dataclass(frozen=True)
class Thresholds:
    theta_belief: float = 0.7
    theta_evidence: float = 5.0

    def __post_init__(self):
        if not 0.0 <= self.theta_belief <= 1.0:
            raise ValidationError(
                f"theta_belief must be in [0, 1], got {self.theta_belief}", code="threshold-out-of-range"
            )
        if self.theta_evidence < 0.0:
            raise ValidationError(
                f"theta_evidence must be nonnegative, got {self.theta_evidence}",
                code="threshold-out-of-range",
            )


@dataclass(frozen=True)
class InteractionGate:
    """Minimum interaction before a hypothesis leaves white."""

    min_distinct_voters: int = 3
    min_evidence_items: int = 2
    min_raters: int = 2


def _validate_count(value: int, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValidationError(f"{name} must be a nonnegative integer, got {value!r}")
    return value


def posterior_belief(up: int, down: int, prior: BetaParams = UNIFORM_PRIOR) -> BeliefEstimate:
    """Beta posterior over the Bernoulli 'hypothesis is endorsed' parameter.

    mean = (up + alpha) / (up + down + alpha + beta); the interval is the
    equal-tailed 95% credible interval of Beta(up + alpha, down + beta).
    """
    _validate_count(up, "up")
    _validate_count(down, "down")
    a = up + prior.alpha
    b = down + prior.beta
    mean = a / (a + b)
    return BeliefEstimate(
        mean=mean,
        ci_low=betamath.beta_quantile(0.025, a, b),
        ci_high=betamath.beta_quantile(0.975, a, b),
        n_votes=up + down,
        display=display_one_decimal(mean),
    )


def posterior_curve(
    up: int, down: int, prior: BetaParams = UNIFORM_PRIOR, n_points: int = 512
) -> list[tuple[float, float]]:
    """Posterior density sampled on a uniform grid over [0, 1]."""
    _validate_count(up, "up")
    _validate_count(down, "down")
    if not isinstance(n_points, int) or n_points < 2:
        raise ValidationError(f"n_points must be an integer >= 2, got {n_points!r}")
    a = up + prior.alpha
    b = down + prior.beta
    step = 1.0 / (n_points - 1)
    return [(i * step, betamath.beta_pdf(i * step, a, b)) for i in range(n_points)]


def item_mean_quality(ratings: Sequence) -> float:
    """Arithmetic mean of the ratings' numeric star values."""
    if not ratings:
        raise ValidationError("cannot average an empty set of ratings", code="empty-ratings")
    return sum(r.numeric_value for r in ratings) / len(ratings)


def weight_of_evidence(
    items: Iterable[tuple[Polarity | str, float]], n_ratings: int = 0
) -> WoEResult:
    """Sum per-item mean quality into supporting and refuting weights.

    ``items`` is (polarity, item mean quality) per evidence item; quality is
    on the 1.0..5.0 star scale.  ``n_ratings`` is carried through for
    reporting (the caller knows how many ratings produced the means).
    """
    support = 0.0
    refute = 0.0
    n_items = 0
    for polarity, quality in items:
        if not 1.0 <= quality <= 5.0:
            raise ValidationError(f"item mean quality must be in [1.0, 5.0], got {quality!r}")
        if Polarity(polarity) is Polarity.SUPPORTS:
            support += quality
        else:
            refute += quality
        n_items += 1
    total = support + refute
    balance = (support - refute) / total if total > 0 else None
    return WoEResult(
        support_weight=support,
        refute_weight=refute,
        total=total,
        balance=balance,
        n_items=n_items,
        n_ratings=n_ratings,
    )


def classify_horse(
    distinct_voters: int,
    n_items: int,
    n_raters: int,
    woe: WoEResult,
    theta_evidence: float,
    gate: InteractionGate = InteractionGate(),
) -> HorseColor:
    """White until the interaction gate is met, then colored by evidence.

    Black when the balance runs negative, pink when total weight clears the
    evidence threshold, blue otherwise.
    """
    if (
        distinct_voters < gate.min_distinct_voters
        or n_items < gate.min_evidence_items
        or n_raters < gate.min_raters
    ):
        return HorseColor.WHITE
    if woe.balance is not None and woe.balance < 0:
        return HorseColor.BLACK
    if woe.total >= theta_evidence:
        return HorseColor.PINK
    return HorseColor.BLUE


def classify_quadrant(dob_mean: float, woe_total: float, thresholds: Thresholds) -> Quadrant:
    """Threshold rule of the decision dashboard; boundary equality passes."""
    if not 0.0 <= dob_mean <= 1.0:
        raise ValidationError(f"dob_mean must be in [0, 1], got {dob_mean}")
    believed = dob_mean >= thresholds.theta_belief
    evidenced = woe_total >= thresholds.theta_evidence
    if believed and evidenced:
        return Quadrant.GREEN
    if believed:
        return Quadrant.RED
    if evidenced:
        return Quadrant.AMBER
    return Quadrant.WHITE_CONTENTIOUS


@dataclass(frozen=True)
class TimelinePoint:
    seq: int
    at: datetime
    dob: BeliefEstimate
    woe: WoEResult


class _HypothesisFold:
    """Replays the per-hypothesis slice of a log into (votes, items, ratings)."""

    def __init__(self, hypothesis_id: str):
        self.hypothesis_id = hypothesis_id
        self.votes: dict[str, str] = {}
        self.item_polarity: dict[str, Polarity] = {}
        self.ratings: dict[tuple[str, str], int] = {}

    def apply(self, event: EventRecord) -> bool:
        """Apply one event; returns True when this hypothesis's aggregates changed."""
        h = self.hypothesis_id
        kind = event.kind
        payload = event.payload
        if kind is EventKind.VOTE_CAST and payload.get("hypothesis_id") == h:
            self.votes[event.actor] = payload["direction"]
            return True
        if kind is EventKind.VOTE_RETRACTED and payload.get("hypothesis_id") == h:
            return self.votes.pop(event.actor, None) is not None
        if kind is EventKind.EVIDENCE_ADDED and payload.get("hypothesis_id") == h:
            evidence_id = payload["evidence_id"]
            self.item_polarity[evidence_id] = Polarity(payload["polarity"])
            self.ratings[(evidence_id, event.actor)] = int(payload["initial_tier"])
            return True
        if kind is EventKind.RATING_SET and payload.get("evidence_id") in self.item_polarity:
            self.ratings[(payload["evidence_id"], event.actor)] = int(payload["tier"])
            return True
        if kind is EventKind.USER_ERASED:
            erased = payload["user_id"]
            changed = self.votes.pop(erased, None) is not None
            for key in [k for k in self.ratings if k[1] == erased]:
                del self.ratings[key]
                changed = True
            return changed
        return False

    def counts(self) -> tuple[int, int]:
        up = sum(1 for d in self.votes.values() if d == "up")
        return up, len(self.votes) - up

    def woe(self) -> WoEResult:
        per_item: dict[str, list[float]] = {}
        for (evidence_id, _), tier in self.ratings.items():
            per_item.setdefault(evidence_id, []).append(tier_numeric(tier))
        items = [
            (polarity, sum(values) / len(values))
            for evidence_id, polarity in self.item_polarity.items()
            for values in [per_item.get(evidence_id)]
            if values
        ]
        result = weight_of_evidence(items, n_ratings=len(self.ratings))
        if len(self.item_polarity) != result.n_items:
            # Items whose every rating was erased still exist but carry no weight.
            result = WoEResult(
                support_weight=result.support_weight,
                refute_weight=result.refute_weight,
                total=result.total,
                balance=result.balance,
                n_items=len(self.item_polarity),
                n_ratings=result.n_ratings,
            )
        return result


def hypothesis_timeline(
    events: Sequence[EventRecord],
    hypothesis_id: str,
    prior: BetaParams = UNIFORM_PRIOR,
) -> list[TimelinePoint]:
    """One point per event that changed the hypothesis's aggregates.

    Each point is the full recomputation on the log prefix up to and
    including that event, so the final point always equals the live value.
    """
    fold = _HypothesisFold(hypothesis_id)
    points: list[TimelinePoint] = []
    last_seq = None
    for event in events:
        if last_seq is not None and event.seq <= last_seq:
            raise ValidationError("timeline events must be sorted by strictly increasing seq")
        last_seq = event.seq
        if fold.apply(event):
            up, down = fold.counts()
            points.append(
                TimelinePoint(
                    seq=event.seq,
                    at=event.at,
                    dob=posterior_belief(up, down, prior),
                    woe=fold.woe(),
                )
            )
    return points


_SORT_KEYS = ("recency", "dob", "evidence_count", "woe")


def filter_and_sort(entries: Sequence, query: str | None = None, sort_key: str = "recency", descending: bool = True) -> list:
    """Keyword filter plus stable sort for dashboard/feed listings.

    ``entries`` expose ``.hypothesis`` (title/description/tag/added_on/
    hypothesis_id), ``.dob.mean`` and ``.woe`` — the aggregate records the
    workspace produces.  Ties always break (added_on desc, hypothesis_id asc).
    """
    if sort_key not in _SORT_KEYS:
        raise ValidationError(f"unknown sort key {sort_key!r}; expected one of {_SORT_KEYS}", code="unknown-sort-key")

    selected = list(entries)
    if query and query.strip():
        needle = query.casefold()
        selected = [
            e
            for e in selected
            if needle in e.hypothesis.title.casefold()
            or needle in e.hypothesis.description.casefold()
            or needle in e.hypothesis.tag.casefold()
        ]

    selected.sort(key=lambda e: e.hypothesis.hypothesis_id)
    selected.sort(key=lambda e: e.hypothesis.added_on, reverse=True)
    if sort_key == "recency":
        key = lambda e: e.hypothesis.added_on  # noqa: E731
    elif sort_key == "dob":
        key = lambda e: e.dob.mean  # noqa: E731
    elif sort_key == "evidence_count":
        key = lambda e: e.woe.n_items  # noqa: E731
    else:
        key = lambda e: e.woe.total  # noqa: E731
    selected.sort(key=key, reverse=descending)
    return selected
