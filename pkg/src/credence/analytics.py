"""Detection of non-virtuous interaction patterns.

Five detectors (careless, conformity, authorship, group bias, coup) plus a
rater-severity score.  All are deterministic batch functions over an
immutable log prefix; flags are advisory for moderators and never trigger
automatic action.  Thresholds live in ``DetectorParams`` — they are policy
defaults, not ground truth.
"""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .engine import UNIFORM_PRIOR, BetaParams
from .events import EventKind, EventRecord
from .model import QualityRating
from .store import replay


class FlagKind(str, Enum):
    CARELESS = "careless"
    CONFORMITY = "conformity"
    AUTHORSHIP = "authorship"
    GROUP_BIAS = "group_bias"
    COUP = "coup"


class SeverityLabel(str, Enum):
    SKEPTICAL = "skeptical"
    NEUTRAL = "neutral"
    GENEROUS = "generous"


@dataclass(frozen=True)
class DetectorParams:
    careless_window: int = 10
    careless_fast_gap_seconds: float = 2.0
    conformity_min_votes: int = 10
    conformity_min_alignment: float = 0.9
    authorship_min_own_refuting: int = 3
    authorship_min_gap_stars: float = 1.5
    group_min_each_side: int = 5
    group_min_gap_stars: float = 1.5
    coup_min_similarity: float = 0.8
    coup_min_shared_votes: int = 5
    coup_min_users: int = 3
    severity_min_comparable: int = 5
    severity_cutoff_stars: float = 0.5


@dataclass(frozen=True)
class RaterSeverity:
    user_id: str
    leniency: float
    n_comparable: int
    label: SeverityLabel


@dataclass(frozen=True)
class BehaviourFlag:
    user_ids: frozenset[str]
    kind: FlagKind
    score: float
    window: tuple[int, int]
    rationale: str

    @property
    def flag_id(self) -> str:
        doc = json.dumps([self.kind.value, sorted(self.user_ids), list(self.window)], sort_keys=True)
        return hashlib.sha1(doc.encode("utf-8")).hexdigest()[:16]


def rater_severity(
    ratings: Iterable[QualityRating], params: DetectorParams = DetectorParams()
) -> list[RaterSeverity]:
    """Mean signed deviation from co-raters, per user, in star units.

    Positive leniency = rates above the other raters on the same items
    (generous); negative = below (skeptical).  Users with no co-rated item
    are neutral with leniency 0.
    """
    by_item: dict[str, list[QualityRating]] = {}
    users: set[str] = set()
    for r in ratings:
        by_item.setdefault(r.evidence_id, []).append(r)
        users.add(r.rater)

    deviations: dict[str, list[float]] = {u: [] for u in users}
    for item_ratings in by_item.values():
        if len(item_ratings) < 2:
            continue
        total = sum(r.numeric_value for r in item_ratings)
        n = len(item_ratings)
        for r in item_ratings:
            others_mean = (total - r.numeric_value) / (n - 1)
            deviations[r.rater].append(r.numeric_value - others_mean)

    out = []
    for user_id in sorted(users):
        devs = deviations[user_id]
        leniency = sum(devs) / len(devs) if devs else 0.0
        if len(devs) >= params.severity_min_comparable and leniency <= -params.severity_cutoff_stars:
            label = SeverityLabel.SKEPTICAL
        elif len(devs) >= params.severity_min_comparable and leniency >= params.severity_cutoff_stars:
            label = SeverityLabel.GENEROUS
        else:
            label = SeverityLabel.NEUTRAL
        out.append(RaterSeverity(user_id=user_id, leniency=leniency, n_comparable=len(devs), label=label))
    return out


# -- careless ---------------------------------------------------------------

# One rate/vote action: (seq, unix time seconds, kind, tier or None).
Action = tuple[int, float, str, int | None]


def careless_statistic(actions: Sequence[Action], params: DetectorParams = DetectorParams()):
    """Best careless score over sliding windows, or None when never triggered.

    Triggers: a window of consecutive rate/vote actions whose median
    inter-action gap is under the fast-gap threshold, or a window of
    consecutive ratings with zero tier variance.
    """
    w = params.careless_window
    best: tuple[float, tuple[int, int]] | None = None

    ordered = sorted(actions, key=lambda a: (a[1], a[0]))
    for i in range(len(ordered) - w + 1):
        window = ordered[i : i + w]
        gaps = [window[j + 1][1] - window[j][1] for j in range(w - 1)]
        if statistics.median(gaps) < params.careless_fast_gap_seconds:
            score = sum(1 for g in gaps if g < params.careless_fast_gap_seconds) / len(gaps)
            span = (window[0][0], window[-1][0])
            if best is None or score > best[0]:
                best = (score, span)

    ratings_only = [a for a in ordered if a[2] == "rating"]
    for i in range(len(ratings_only) - w + 1):
        window = ratings_only[i : i + w]
        tiers = {a[3] for a in window}
        if len(tiers) == 1:
            span = (window[0][0], window[-1][0])
            if best is None or best[0] < 1.0:
                best = (1.0, span)
    return best


def detect_careless(
    user_id: str, actions: Sequence[Action], params: DetectorParams = DetectorParams()
) -> BehaviourFlag | None:
    hit = careless_statistic(actions, params)
    if hit is None:
        return None
    score, window = hit
    return BehaviourFlag(
        user_ids=frozenset([user_id]),
        kind=FlagKind.CARELESS,
        score=score,
        window=window,
        rationale=f"rapid or undifferentiated rating/voting in a {params.careless_window}-action window",
    )


# -- conformity ---------------------------------------------------------------

# (seq, direction "up"/"down", posterior mean strictly before the vote)
PrevoteVote = tuple[int, str, float]


def conformity_statistic(votes: Sequence[PrevoteVote]):
    """(alignment fraction, eligible count, seq window) over one user's votes."""
    eligible = [(seq, d, m) for seq, d, m in votes if m != 0.5]
    if not eligible:
        return None
    aligned = sum(1 for _, d, m in eligible if (d == "up") == (m > 0.5))
    window = (min(s for s, _, _ in eligible), max(s for s, _, _ in eligible))
    return aligned / len(eligible), len(eligible), window


def detect_conformity(
    user_id: str, votes: Sequence[PrevoteVote], params: DetectorParams = DetectorParams()
) -> BehaviourFlag | None:
    stat = conformity_statistic(votes)
    if stat is None:
        return None
    alignment, n_eligible, window = stat
    if n_eligible < params.conformity_min_votes or alignment < params.conformity_min_alignment:
        return None
    return BehaviourFlag(
        user_ids=frozenset([user_id]),
        kind=FlagKind.CONFORMITY,
        score=alignment,
        window=window,
        rationale=f"{alignment:.0%} of {n_eligible} votes followed the pre-vote majority",
    )


# -- authorship ---------------------------------------------------------------


def authorship_gap(own_refuting: Sequence[float], other_ratings: Sequence[float]) -> float | None:
    """Stars withheld from refuting evidence on the rater's own hypotheses."""
    if not own_refuting or not other_ratings:
        return None
    return sum(other_ratings) / len(other_ratings) - sum(own_refuting) / len(own_refuting)


def detect_authorship(
    user_id: str,
    own_refuting: Sequence[float],
    other_ratings: Sequence[float],
    window: tuple[int, int],
    params: DetectorParams = DetectorParams(),
) -> BehaviourFlag | None:
    gap = authorship_gap(own_refuting, other_ratings)
    if gap is None or len(own_refuting) < params.authorship_min_own_refuting:
        return None
    if gap < params.authorship_min_gap_stars:
        return None
    return BehaviourFlag(
        user_ids=frozenset([user_id]),
        kind=FlagKind.AUTHORSHIP,
        score=min(1.0, max(0.0, gap / 4.0)),
        window=window,
        rationale=f"rates refuting evidence on own hypotheses {gap:.2f} stars below everything else",
    )


# -- group bias ---------------------------------------------------------------


def detect_group_bias(
    user_id: str,
    same_group: Sequence[float],
    other_group: Sequence[float],
    window: tuple[int, int],
    params: DetectorParams = DetectorParams(),
) -> BehaviourFlag | None:
    if len(same_group) < params.group_min_each_side or len(other_group) < params.group_min_each_side:
        return None
    gap = sum(same_group) / len(same_group) - sum(other_group) / len(other_group)
    if gap < params.group_min_gap_stars:
        return None
    return BehaviourFlag(
        user_ids=frozenset([user_id]),
        kind=FlagKind.GROUP_BIAS,
        score=min(1.0, max(0.0, gap / 4.0)),
        window=window,
        rationale=f"rates same-group authors {gap:.2f} stars above other groups",
    )


# -- coup ---------------------------------------------------------------------


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def detect_coup(
    vote_sets: dict[str, set],
    spans: dict[str, tuple[int, int]],
    params: DetectorParams = DetectorParams(),
) -> list[BehaviourFlag]:
    """Connected components of users with near-identical voting patterns."""
    users = sorted(u for u, s in vote_sets.items() if s)
    links: dict[str, set[str]] = {u: set() for u in users}
    similarity: dict[tuple[str, str], float] = {}
    for i, u in enumerate(users):
        for v in users[i + 1 :]:
            shared = len(vote_sets[u] & vote_sets[v])
            if shared < params.coup_min_shared_votes:
                continue
            sim = jaccard(vote_sets[u], vote_sets[v])
            if sim >= params.coup_min_similarity:
                links[u].add(v)
                links[v].add(u)
                similarity[(u, v)] = sim

    flags = []
    seen: set[str] = set()
    for u in users:
        if u in seen or not links[u]:
            continue
        component = set()
        stack = [u]
        while stack:
            node = stack.pop()
            if node in component:
                continue
            component.add(node)
            stack.extend(links[node] - component)
        seen.update(component)
        if len(component) < params.coup_min_users:
            continue
        members = sorted(component)
        linked_sims = [
            similarity[(a, b)]
            for i, a in enumerate(members)
            for b in members[i + 1 :]
            if (a, b) in similarity
        ]
        score = sum(linked_sims) / len(linked_sims)
        window = (
            min(spans[m][0] for m in members),
            max(spans[m][1] for m in members),
        )
        flags.append(
            BehaviourFlag(
                user_ids=frozenset(members),
                kind=FlagKind.COUP,
                score=score,
                window=window,
                rationale=f"{len(members)} users share near-identical voting patterns",
            )
        )
    return flags


# -- log scanning --------------------------------------------------------------


def _as_seconds(at) -> float:
    return at.timestamp()


def collect_actions(events: Sequence[EventRecord]) -> dict[str, list[Action]]:
    """Per-user rate/vote action streams (for the careless detector)."""
    actions: dict[str, list[Action]] = {}
    for e in events:
        if e.kind is EventKind.VOTE_CAST:
            actions.setdefault(e.actor, []).append((e.seq, _as_seconds(e.at), "vote", None))
        elif e.kind is EventKind.RATING_SET:
            actions.setdefault(e.actor, []).append((e.seq, _as_seconds(e.at), "rating", int(e.payload["tier"])))
    return actions


def collect_prevote_votes(
    events: Sequence[EventRecord], prior: BetaParams = UNIFORM_PRIOR
) -> dict[str, list[PrevoteVote]]:
    """Per-user votes annotated with the posterior mean just before each vote."""
    votes_state: dict[str, dict[str, str]] = {}
    out: dict[str, list[PrevoteVote]] = {}
    for e in events:
        if e.kind is EventKind.VOTE_CAST:
            h = e.payload["hypothesis_id"]
            current = votes_state.setdefault(h, {})
            up = sum(1 for d in current.values() if d == "up")
            down = len(current) - up
            mean = (up + prior.alpha) / (up + down + prior.alpha + prior.beta)
            out.setdefault(e.actor, []).append((e.seq, e.payload["direction"], mean))
            current[e.actor] = e.payload["direction"]
        elif e.kind is EventKind.VOTE_RETRACTED:
            votes_state.get(e.payload["hypothesis_id"], {}).pop(e.actor, None)
        elif e.kind is EventKind.USER_ERASED:
            erased = e.payload["user_id"]
            for current in votes_state.values():
                current.pop(erased, None)
            out.pop(erased, None)
    return out


def _rating_views(events: Sequence[EventRecord]):
    """Active ratings with polarity/authorship context, plus per-user seq spans."""
    state = replay(events)
    spans: dict[str, tuple[int, int]] = {}
    for e in events:
        if e.kind in (EventKind.RATING_SET, EventKind.EVIDENCE_ADDED, EventKind.VOTE_CAST):
            lo, hi = spans.get(e.actor, (e.seq, e.seq))
            spans[e.actor] = (min(lo, e.seq), max(hi, e.seq))
    return state, spans


def scan(
    events: Sequence[EventRecord],
    params: DetectorParams = DetectorParams(),
    prior: BetaParams = UNIFORM_PRIOR,
) -> list[BehaviourFlag]:
    """Run every detector over a log prefix; deterministic output order."""
    flags: list[BehaviourFlag] = []
    state, spans = _rating_views(events)

    for user_id, actions in sorted(collect_actions(events).items()):
        if user_id in state.erased:
            continue
        flag = detect_careless(user_id, actions, params)
        if flag is not None:
            flags.append(flag)

    for user_id, votes in sorted(collect_prevote_votes(events, prior).items()):
        if user_id in state.erased:
            continue
        flag = detect_conformity(user_id, votes, params)
        if flag is not None:
            flags.append(flag)

    own_refuting, other_ratings = _split_ratings_by_authorship(state)
    for user_id in sorted(set(own_refuting) | set(other_ratings)):
        flag = detect_authorship(
            user_id,
            own_refuting.get(user_id, []),
            other_ratings.get(user_id, []),
            spans.get(user_id, (0, 0)),
            params,
        )
        if flag is not None:
            flags.append(flag)

    same_group, other_group = _split_ratings_by_group(state)
    for user_id in sorted(set(same_group) | set(other_group)):
        flag = detect_group_bias(
            user_id,
            same_group.get(user_id, []),
            other_group.get(user_id, []),
            spans.get(user_id, (0, 0)),
            params,
        )
        if flag is not None:
            flags.append(flag)

    vote_sets = {
        voter: set()
        for (_, voter) in state.votes
    }
    for (h, voter), vote in state.votes.items():
        vote_sets[voter].add((h, vote.direction.value))
    flags.extend(detect_coup(vote_sets, spans, params))
    return flags


def _split_ratings_by_authorship(state):
    own_refuting: dict[str, list[float]] = {}
    other_ratings: dict[str, list[float]] = {}
    for (evidence_id, rater), rating in state.ratings.items():
        item = state.evidence.get(evidence_id)
        if item is None:
            continue
        hypothesis = state.hypotheses.get(item.hypothesis_id)
        owns = hypothesis is not None and hypothesis.author == rater
        if owns and item.polarity.value == "refutes":
            own_refuting.setdefault(rater, []).append(rating.numeric_value)
        else:
            other_ratings.setdefault(rater, []).append(rating.numeric_value)
    return own_refuting, other_ratings


def _split_ratings_by_group(state):
    same_group: dict[str, list[float]] = {}
    other_group: dict[str, list[float]] = {}
    for (evidence_id, rater), rating in state.ratings.items():
        rater_user = state.users.get(rater)
        item = state.evidence.get(evidence_id)
        if rater_user is None or rater_user.group_label is None or item is None:
            continue
        author = state.users.get(item.author)
        if author is None or author.group_label is None or author.user_id == rater:
            continue
        bucket = same_group if author.group_label == rater_user.group_label else other_group
        bucket.setdefault(rater, []).append(rating.numeric_value)
    return same_group, other_group


def detector_scores(
    events: Sequence[EventRecord],
    params: DetectorParams = DetectorParams(),
    prior: BetaParams = UNIFORM_PRIOR,
) -> dict[str, dict[str, float]]:
    """Raw per-user statistic for each detector (benchmark ranking input).

    Users without enough signal score 0.0 — the benchmark ranks everyone.
    """
    state, _ = _rating_views(events)
    users = sorted(state.users)
    scores: dict[str, dict[str, float]] = {k.value: {u: 0.0 for u in users} for k in FlagKind}

    for user_id, actions in collect_actions(events).items():
        if user_id not in scores[FlagKind.CARELESS.value]:
            continue
        hit = careless_statistic(actions, params)
        if hit is not None:
            scores[FlagKind.CARELESS.value][user_id] = hit[0]

    for user_id, votes in collect_prevote_votes(events, prior).items():
        if user_id not in scores[FlagKind.CONFORMITY.value]:
            continue
        stat = conformity_statistic(votes)
        if stat is not None:
            scores[FlagKind.CONFORMITY.value][user_id] = stat[0]

    own_refuting, other_ratings = _split_ratings_by_authorship(state)
    for user_id in users:
        gap = authorship_gap(own_refuting.get(user_id, []), other_ratings.get(user_id, []))
        if gap is not None:
            scores[FlagKind.AUTHORSHIP.value][user_id] = min(1.0, max(0.0, gap / 4.0))

    same_group, other_group = _split_ratings_by_group(state)
    for user_id in users:
        same = same_group.get(user_id, [])
        other = other_group.get(user_id, [])
        if same and other:
            gap = sum(same) / len(same) - sum(other) / len(other)
            scores[FlagKind.GROUP_BIAS.value][user_id] = min(1.0, max(0.0, gap / 4.0))

    vote_sets: dict[str, set] = {u: set() for u in users}
    for (h, voter), vote in state.votes.items():
        if voter in vote_sets:
            vote_sets[voter].add((h, vote.direction.value))
    for u in users:
        best = 0.0
        for v in users:
            if v == u:
                continue
            if len(vote_sets[u] & vote_sets[v]) < params.coup_min_shared_votes:
                continue
            best = max(best, jaccard(vote_sets[u], vote_sets[v]))
        scores[FlagKind.COUP.value][u] = best
    return scores
