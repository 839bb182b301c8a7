"""Seeded agent-based simulation: synthetic populations, majority-accuracy
experiments, and detector benchmarking.

A single seeded generator (numpy ``default_rng``) drives every draw, so a
(config, seed) pair always produces a byte-identical event log.  Parallel
trials derive per-trial seeds with ``numpy.random.SeedSequence.spawn``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone

import numpy as np

from .analytics import DetectorParams, FlagKind, detector_scores
from .errors import ValidationError
from .events import EventRecord
from .model import Polarity, Role, VoteDirection
from .store import EventLog
from .workspace import Workspace

AGENT_KINDS = (
    "competent",
    "careless",
    "conformist",
    "coup",
    "generous_rater",
    "skeptical_rater",
    "authorship",
    "group_biased",
)

SIM_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

CONFIG_VERSION = 1


@dataclass(frozen=True)
class AgentSpec:
    kind: str
    count: int
    p: float | None = None  # competence for truth-tracking voters
    clique_id: str | None = None  # coup coordination group
    bias: float | None = None  # rater bias in stars (+generous, -skeptical)

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValidationError(f"unknown agent kind {self.kind!r}", code="invalid-config")
        if self.count < 0:
            raise ValidationError("agent count must be >= 0", code="invalid-config")
        if self.kind == "competent" and not (self.p is not None and 0.0 < self.p <= 1.0):
            # p = 1.0 allowed: degenerate always-correct voters for tests.
            raise ValidationError("competent agents need p in (0, 1]", code="invalid-config")
        if self.kind == "coup" and not self.clique_id:
            raise ValidationError("coup agents need a clique_id", code="invalid-config")
        if self.kind in ("generous_rater", "skeptical_rater") and self.bias is None:
            raise ValidationError(f"{self.kind} agents need a star bias", code="invalid-config")


@dataclass(frozen=True)
class SimConfig:
    agents: tuple[AgentSpec, ...]
    n_hypotheses: int
    ground_truth: tuple[bool, ...]
    n_rounds: int
    seed: int

    def __post_init__(self):
        if self.n_hypotheses < 1:
            raise ValidationError("n_hypotheses must be >= 1", code="invalid-config")
        if len(self.ground_truth) != self.n_hypotheses:
            raise ValidationError("ground_truth must have one entry per hypothesis", code="invalid-config")
        if self.n_rounds < 1:
            raise ValidationError("n_rounds must be >= 1", code="invalid-config")


def config_to_dict(config: SimConfig) -> dict:
    return {
        "config_version": CONFIG_VERSION,
        "seed": config.seed,
        "n_hypotheses": config.n_hypotheses,
        "ground_truth": list(config.ground_truth),
        "n_rounds": config.n_rounds,
        "agents": [
            {k: v for k, v in
             {"kind": a.kind, "count": a.count, "p": a.p, "clique_id": a.clique_id, "bias": a.bias}.items()
             if v is not None}
            for a in config.agents
        ],
    }


def config_from_dict(doc: dict) -> SimConfig:
    if doc.get("config_version") != CONFIG_VERSION:
        raise ValidationError(
            f"unsupported config_version {doc.get('config_version')!r}", code="invalid-config"
        )
    try:
        agents = tuple(
            AgentSpec(
                kind=a["kind"],
                count=int(a["count"]),
                p=a.get("p"),
                clique_id=a.get("clique_id"),
                bias=a.get("bias"),
            )
            for a in doc["agents"]
        )
        return SimConfig(
            agents=agents,
            n_hypotheses=int(doc["n_hypotheses"]),
            ground_truth=tuple(bool(g) for g in doc["ground_truth"]),
            n_rounds=int(doc["n_rounds"]),
            seed=int(doc["seed"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed simulation config: {exc}", code="invalid-config") from exc


@dataclass
class _Agent:
    user_id: str
    kind: str
    index: int
    p: float
    clique_id: str | None
    bias_stars: float
    group: str | None
    vote_schedule: list[int] = field(default_factory=list)
    rate_schedule: list[int] = field(default_factory=list)
    own_refuting_pending: list[int] = field(default_factory=list)


@dataclass
class SimResult:
    log: EventLog
    workspace: Workspace
    roster: dict[str, str]  # user_id -> agent kind ("facilitator" for the host)
    hypothesis_ids: list[str]


class _Budget:
    def __init__(self, log: EventLog, max_events: int | None):
        self.log = log
        self.max_events = max_events

    def spent(self) -> bool:
        return self.max_events is not None and self.log.head_seq >= self.max_events


def _clamp_tier(value: float) -> int:
    return int(min(9, max(1, round(value))))


def simulate(config: SimConfig, path=None, max_events: int | None = None) -> SimResult:
    """Run the scripted population and return the resulting log.

    Competent agents vote up on true hypotheses with probability p (down
    otherwise), independently; behaviour agents follow their pattern.
    Every emitted event passes normal workspace validation.
    """
    rng = np.random.default_rng(config.seed)
    clock_now = [SIM_EPOCH]

    log = EventLog(path)
    ws = Workspace(log, id_factory=lambda: rng.bytes(16).hex())
    budget = _Budget(log, max_events)

    def advance(lo: float, hi: float) -> datetime:
        clock_now[0] = clock_now[0] + timedelta(seconds=float(rng.uniform(lo, hi)))
        return clock_now[0]

    roster: dict[str, str] = {}
    facilitator = ws.register_user("facilitator", role=Role.MODERATOR, now=advance(1, 2))
    roster[facilitator.user_id] = "facilitator"

    agents: list[_Agent] = []
    counters: dict[str, int] = {}
    for spec in config.agents:
        for _ in range(spec.count):
            idx = counters.get(spec.kind, 0)
            counters[spec.kind] = idx + 1
            group = "alpha" if spec.kind == "group_biased" else ("alpha", "beta")[idx % 2]
            user = ws.register_user(
                f"sim-{spec.kind.replace('_', '-')}-{idx:03d}",
                role=Role.MEMBER,
                group_label=group,
                now=advance(1, 5),
            )
            roster[user.user_id] = spec.kind
            agents.append(
                _Agent(
                    user_id=user.user_id,
                    kind=spec.kind,
                    index=idx,
                    p=spec.p if spec.p is not None else 0.7,
                    clique_id=spec.clique_id,
                    bias_stars=spec.bias if spec.bias is not None else 0.0,
                    group=group,
                )
            )

    honest = [a for a in agents if a.kind in ("competent", "generous_rater", "skeptical_rater")]
    author_pool = [a for a in agents if a.kind == "authorship"]

    # Hypotheses: behaviour authors take the first slots (three each), the
    # rest rotate over honest agents, falling back to the facilitator.
    tags = ("operations", "wellbeing", "tooling", "outreach")
    hypothesis_ids: list[str] = []
    authors: list[str] = []
    for i in range(config.n_hypotheses):
        if author_pool and i < 3 * len(author_pool):
            author_id = author_pool[i % len(author_pool)].user_id
        elif honest:
            author_id = honest[i % len(honest)].user_id
        else:
            author_id = facilitator.user_id
        h, _report = ws.create_hypothesis(
            title=f"Proposal {i:02d} should be adopted across all teams",
            description=f"Working note {i:02d} on whether the proposal earns a rollout.",
            tag=tags[i % len(tags)],
            author=author_id,
            now=advance(5, 20),
        )
        hypothesis_ids.append(h.hypothesis_id)
        authors.append(author_id)

    # Evidence: two supporting + one refuting item per hypothesis, authored
    # by honest agents (never the hypothesis author), with a latent true
    # quality tier each.
    evidence_ids: list[str] = []
    evidence_hyp: list[int] = []
    evidence_polarity: list[Polarity] = []
    true_tiers: list[int] = []
    evidence_author: list[str] = []
    submit_pool = honest if honest else agents
    pool_i = 0
    for hi, hypothesis_id in enumerate(hypothesis_ids):
        for polarity in (Polarity.SUPPORTS, Polarity.SUPPORTS, Polarity.REFUTES):
            if budget.spent() or not submit_pool:
                break
            submitter = submit_pool[pool_i % len(submit_pool)]
            pool_i += 1
            if submitter.user_id == authors[hi]:
                submitter = submit_pool[pool_i % len(submit_pool)]
                pool_i += 1
            tier = int(rng.integers(3, 10))
            item, _rating = ws.add_evidence(
                hypothesis_id=hypothesis_id,
                url=f"https://evidence.example/{hi:02d}/{len(evidence_ids):03d}",
                argument_text=f"Observed outcome {len(evidence_ids):03d} bearing on proposal {hi:02d}.",
                argument_kind="induction",
                polarity=polarity,
                initial_tier=tier,
                author=submitter.user_id,
                now=advance(5, 30),
            )
            evidence_ids.append(item.evidence_id)
            evidence_hyp.append(hi)
            evidence_polarity.append(polarity)
            true_tiers.append(tier)
            evidence_author.append(submitter.user_id)

    # Per-agent activity schedules.
    coup_plan: dict[str, np.ndarray] = {}
    for agent in agents:
        order = list(rng.permutation(config.n_hypotheses))
        if agent.kind == "coup":
            # The clique covers everything: identical vote sets are the point.
            agent.vote_schedule = order
        elif agent.kind == "careless":
            # Inattentive: they miss a third of the feed at random.
            agent.vote_schedule = order[: max(1, int(2 * config.n_hypotheses / 3))]
        else:
            agent.vote_schedule = order[: max(1, int(0.8 * config.n_hypotheses))]
        agent.rate_schedule = [
            ei for ei in rng.permutation(len(evidence_ids)) if evidence_author[ei] != agent.user_id
        ]
        if agent.kind == "authorship":
            agent.own_refuting_pending = [
                ei
                for ei in range(len(evidence_ids))
                if authors[evidence_hyp[ei]] == agent.user_id and evidence_polarity[ei] is Polarity.REFUTES
            ]
            own = {hi for hi in range(config.n_hypotheses) if authors[hi] == agent.user_id}
            agent.vote_schedule = sorted(own) + [h for h in agent.vote_schedule if h not in own]
        if agent.kind == "coup" and agent.clique_id not in coup_plan:
            coup_plan[agent.clique_id] = rng.integers(0, 2, size=config.n_hypotheses)

    agents_by_id = {a.user_id: a for a in agents}

    # Live vote counters so conformists can read the current posterior mean
    # in O(1); mirrors workspace state exactly.
    up_counts = [0] * config.n_hypotheses
    down_counts = [0] * config.n_hypotheses

    def cast(agent: _Agent, hi: int, direction: VoteDirection, lo: float, hi_gap: float) -> None:
        ws.cast_vote(hypothesis_ids[hi], agent.user_id, direction, now=advance(lo, hi_gap))
        if direction is VoteDirection.UP:
            up_counts[hi] += 1
        else:
            down_counts[hi] += 1

    votes_per_round = max(1, math.ceil(config.n_hypotheses / config.n_rounds))

    def agent_round(agent: _Agent) -> None:
        slow = (20.0, 240.0)
        fast = (0.3, 1.4)
        if agent.kind == "careless":
            for _ in range(6):
                if budget.spent() or not agent.vote_schedule:
                    break
                cast(agent, agent.vote_schedule.pop(0), VoteDirection.UP, *fast)
            for _ in range(6):
                if budget.spent() or not agent.rate_schedule:
                    break
                ws.rate_evidence(evidence_ids[agent.rate_schedule.pop(0)], agent.user_id, 9, now=advance(*fast))
            return

        for _ in range(votes_per_round):
            if budget.spent() or not agent.vote_schedule:
                break
            if agent.kind == "conformist":
                hi = next((h for h in agent.vote_schedule if up_counts[h] != down_counts[h]), None)
                if hi is None:
                    break
                agent.vote_schedule.remove(hi)
                direction = VoteDirection.UP if up_counts[hi] > down_counts[hi] else VoteDirection.DOWN
            elif agent.kind == "coup":
                hi = agent.vote_schedule.pop(0)
                direction = VoteDirection.UP if coup_plan[agent.clique_id][hi] else VoteDirection.DOWN
            else:
                hi = agent.vote_schedule.pop(0)
                if agent.kind == "authorship" and authors[hi] == agent.user_id:
                    direction = VoteDirection.UP
                else:
                    correct = rng.random() < agent.p
                    truth = config.ground_truth[hi]
                    direction = VoteDirection.UP if truth == correct else VoteDirection.DOWN
            cast(agent, hi, direction, *slow)

        if agent.kind == "authorship":
            while agent.own_refuting_pending:
                if budget.spent():
                    return
                ei = agent.own_refuting_pending.pop(0)
                ws.rate_evidence(evidence_ids[ei], agent.user_id, 1, now=advance(*slow))

        ratings_this_round = 3 if agent.kind == "group_biased" else 2
        for _ in range(ratings_this_round):
            if budget.spent() or not agent.rate_schedule:
                break
            ei = agent.rate_schedule.pop(0)
            base = true_tiers[ei] + rng.normal(0.0, 1.0)
            if agent.kind == "group_biased":
                author_group = "alpha" if agents_by_id[evidence_author[ei]].group == "alpha" else "beta"
                base += 3.0 if author_group == agent.group else -3.0
            elif agent.kind == "authorship" and authors[evidence_hyp[ei]] == agent.user_id:
                base = 1.0
            else:
                base += 2.0 * agent.bias_stars
            ws.rate_evidence(evidence_ids[ei], agent.user_id, _clamp_tier(base), now=advance(*slow))

    for _round in range(config.n_rounds):
        if budget.spent():
            break
        for ai in rng.permutation(len(agents)):
            if budget.spent():
                break
            agent_round(agents[int(ai)])

    return SimResult(log=log, workspace=ws, roster=roster, hypothesis_ids=hypothesis_ids)


def cjt_experiment(p: float, n_voters: int, n_trials: int, seed: int) -> float:
    """Monte-Carlo P(majority of n independent voters is correct)."""
    if not 0.0 < p < 1.0:
        raise ValidationError("p must be in (0, 1)", code="invalid-params")
    if n_voters < 1 or n_voters % 2 == 0:
        raise ValidationError("n_voters must be a positive odd integer", code="invalid-params")
    if n_trials < 1:
        raise ValidationError("n_trials must be >= 1", code="invalid-params")
    rng = np.random.default_rng(seed)
    correct = rng.binomial(n_voters, p, size=n_trials)
    return float(np.mean(correct > n_voters // 2))


def spawn_seeds(seed: int, n: int) -> list[int]:
    """Documented split function for parallel trials."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def roc_auc(positive_scores, negative_scores) -> float | None:
    """Mann-Whitney AUC with midrank tie handling; None when a side is empty."""
    pos = list(positive_scores)
    neg = list(negative_scores)
    if not pos or not neg:
        return None
    combined = sorted([(s, 1) for s in pos] + [(s, 0) for s in neg], key=lambda t: t[0])
    rank_sum_pos = 0.0
    i = 0
    while i < len(combined):
        j = i
        while j < len(combined) and combined[j][0] == combined[i][0]:
            j += 1
        midrank = (i + 1 + j) / 2.0
        rank_sum_pos += midrank * sum(1 for k in range(i, j) if combined[k][1] == 1)
        i = j
    u = rank_sum_pos - len(pos) * (len(pos) + 1) / 2.0
    return u / (len(pos) * len(neg))


# Detector kind -> agent kind planted for it.
_PLANTED_FOR = {
    FlagKind.CARELESS.value: "careless",
    FlagKind.CONFORMITY.value: "conformist",
    FlagKind.AUTHORSHIP.value: "authorship",
    FlagKind.GROUP_BIAS.value: "group_biased",
    FlagKind.COUP.value: "coup",
}


def detector_benchmark(
    config: SimConfig,
    seed: int | None = None,
    params: DetectorParams = DetectorParams(),
) -> dict[str, float | None]:
    """ROC-AUC of each detector's score ranking planted agents over honest controls.

    None where no agent of the planted kind exists (AUC undefined).
    """
    if seed is not None:
        config = replace(config, seed=seed)
    result = simulate(config)
    events: list[EventRecord] = result.log.events()
    scores = detector_scores(events, params)

    controls = [uid for uid, kind in result.roster.items() if kind == "competent"]
    if not controls:
        raise ValidationError("benchmark config needs competent controls", code="invalid-config")

    auc: dict[str, float | None] = {}
    for detector, planted_kind in _PLANTED_FOR.items():
        planted = [uid for uid, kind in result.roster.items() if kind == planted_kind]
        if not planted:
            auc[detector] = None
            continue
        detector_score = scores[detector]
        auc[detector] = roc_auc(
            [detector_score[u] for u in planted],
            [detector_score[u] for u in controls],
        )
    return auc


def benchmark_config(seed: int = 7) -> SimConfig:
    """Default planted population: 50 honest controls plus each behaviour kind."""
    n_hypotheses = 20
    return SimConfig(
        agents=(
            AgentSpec(kind="competent", count=50, p=0.7),
            AgentSpec(kind="careless", count=5),
            AgentSpec(kind="conformist", count=5),
            AgentSpec(kind="coup", count=5, clique_id="c1"),
            AgentSpec(kind="authorship", count=4),
            AgentSpec(kind="group_biased", count=4),
        ),
        n_hypotheses=n_hypotheses,
        ground_truth=tuple(i % 3 != 0 for i in range(n_hypotheses)),
        n_rounds=6,
        seed=seed,
    )
