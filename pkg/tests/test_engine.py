"""Evidence engine: posterior, weight of evidence, horses, quadrants."""

from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from credence.engine import (
    BetaParams,
    HorseColor,
    InteractionGate,
    Quadrant,
    Thresholds,
    classify_horse,
    classify_quadrant,
    display_one_decimal,
    filter_and_sort,
    hypothesis_timeline,
    item_mean_quality,
    posterior_belief,
    posterior_curve,
    weight_of_evidence,
)
from credence.errors import ValidationError
from credence.model import Polarity, QualityRating
from credence.workspace import Workspace

T0 = datetime(2024, 1, 1, tzinfo=timezone.utc)

# The nine published dashboard rows: (up, down) -> displayed degree of belief.
PUBLISHED_ROWS = [
    (5, 0, "0.9"),
    (2, 0, "0.8"),
    (9, 1, "0.8"),
    (4, 0, "0.8"),
    (3, 0, "0.8"),
    (5, 1, "0.8"),
    (7, 0, "0.9"),
    (6, 0, "0.9"),
    (3, 0, "0.8"),
]


@pytest.mark.parametrize("up,down,expected", PUBLISHED_ROWS)
def test_published_row_displays(up, down, expected):
    assert posterior_belief(up, down).display == expected


def test_posterior_five_up():
    belief = posterior_belief(5, 0)
    assert belief.mean == pytest.approx(6 / 7)
    assert belief.display == "0.9"
    assert belief.n_votes == 5


def test_posterior_uniform_when_no_votes():
    belief = posterior_belief(0, 0)
    assert belief.mean == 0.5
    assert belief.ci_low == pytest.approx(0.025, abs=1e-9)
    assert belief.ci_high == pytest.approx(0.975, abs=1e-9)


def test_posterior_symmetry():
    assert posterior_belief(1, 1).mean == 0.5
    assert posterior_belief(9, 1).mean == pytest.approx(10 / 12)


def test_display_rounds_half_up():
    assert posterior_belief(2, 0).display == "0.8"  # 0.75 rounds up
    assert display_one_decimal(0.75) == "0.8"
    assert display_one_decimal(0.85) == "0.9"
    assert display_one_decimal(0.84) == "0.8"


def test_posterior_rejects_negative_counts():
    with pytest.raises(ValidationError):
        posterior_belief(-1, 0)


@given(st.integers(min_value=0, max_value=200), st.integers(min_value=0, max_value=200))
def test_posterior_mean_monotonicity(up, down):
    base = posterior_belief(up, down).mean
    assert posterior_belief(up + 1, down).mean > base
    assert posterior_belief(up, down + 1).mean < base


def test_interval_contains_mean_and_is_ordered():
    for up in range(0, 20, 3):
        for down in range(0, 20, 4):
            b = posterior_belief(up, down)
            assert 0.0 <= b.ci_low <= b.mean <= b.ci_high <= 1.0


def test_interval_width_never_exceeds_prior_width():
    prior_width = 0.95
    for up, down in [(1, 0), (5, 5), (20, 1), (0, 30), (50, 50)]:
        b = posterior_belief(up, down)
        assert b.ci_high - b.ci_low <= prior_width


def test_interval_width_shrinks_with_balanced_votes():
    widths = []
    for n in (0, 2, 8, 20, 60):
        b = posterior_belief(n, n)
        widths.append(b.ci_high - b.ci_low)
    assert widths == sorted(widths, reverse=True)


def test_curve_uniform():
    for x, density in posterior_curve(0, 0, n_points=16):
        assert density == pytest.approx(1.0)


def test_curve_linear_closed_form():
    # One upvote on the flat prior: density 2x.
    points = dict(posterior_curve(1, 0, n_points=5))
    assert points[0.5] == pytest.approx(1.0)
    assert points[1.0] == pytest.approx(2.0)


def test_curve_mirror_symmetry():
    ups = posterior_curve(1, 0, n_points=101)
    downs = posterior_curve(0, 1, n_points=101)
    for (x1, d1), (_, d2) in zip(ups, reversed(downs)):
        assert d1 == pytest.approx(d2, abs=1e-12)


@pytest.mark.parametrize("up,down", [(0, 0), (1, 0), (10, 3), (35, 0), (17, 18)])
def test_curve_integrates_to_one(up, down):
    points = posterior_curve(up, down, n_points=512)
    integral = sum(
        (x2 - x1) * (d1 + d2) / 2 for (x1, d1), (x2, d2) in zip(points, points[1:])
    )
    assert integral == pytest.approx(1.0, abs=1e-3)


def test_curve_rejects_tiny_grid():
    with pytest.raises(ValidationError):
        posterior_curve(0, 0, n_points=1)


def test_woe_empty():
    result = weight_of_evidence([])
    assert result.total == 0.0
    assert result.balance is None
    assert result.n_items == 0


def test_woe_mixed_polarity():
    result = weight_of_evidence([(Polarity.SUPPORTS, 4.5), (Polarity.REFUTES, 2.0)])
    assert result.support_weight == 4.5
    assert result.refute_weight == 2.0
    assert result.total == 6.5
    assert result.balance == pytest.approx((4.5 - 2.0) / 6.5)


def test_woe_two_equal_supporting():
    result = weight_of_evidence([("supports", 3.8), ("supports", 3.8)])
    assert result.total == pytest.approx(7.6)
    assert result.balance == pytest.approx(1.0)


def test_woe_rejects_out_of_scale_quality():
    with pytest.raises(ValidationError):
        weight_of_evidence([("supports", 5.5)])


@given(
    st.lists(
        st.tuples(st.sampled_from(["supports", "refutes"]), st.floats(min_value=1.0, max_value=5.0)),
        max_size=20,
    ),
    st.lists(
        st.tuples(st.sampled_from(["supports", "refutes"]), st.floats(min_value=1.0, max_value=5.0)),
        max_size=20,
    ),
)
def test_woe_additivity(items_a, items_b):
    total_union = weight_of_evidence(items_a + items_b).total
    assert total_union == pytest.approx(
        weight_of_evidence(items_a).total + weight_of_evidence(items_b).total
    )


def test_woe_adding_item_strictly_increases_total():
    base = weight_of_evidence([("supports", 2.0)])
    grown = weight_of_evidence([("supports", 2.0), ("refutes", 1.0)])
    assert grown.total > base.total


def _rating(value_tier, rater="u1"):
    return QualityRating(evidence_id="e1", rater=rater, tier=value_tier, rated_at=T0)


def test_item_mean_quality():
    assert item_mean_quality([_rating(9)]) == 5.0
    assert item_mean_quality([_rating(9, "a"), _rating(7, "b")]) == 4.5


def test_item_mean_quality_empty():
    with pytest.raises(ValidationError) as err:
        item_mean_quality([])
    assert err.value.code == "empty-ratings"


def test_horse_white_before_gate():
    woe = weight_of_evidence([("supports", 5.0), ("supports", 5.0)])
    assert classify_horse(1, 0, 0, woe, 5.0) == HorseColor.WHITE
    assert classify_horse(2, 5, 5, woe, 5.0) == HorseColor.WHITE
    assert classify_horse(3, 1, 5, woe, 5.0) == HorseColor.WHITE
    assert classify_horse(3, 2, 1, woe, 5.0) == HorseColor.WHITE


def test_horse_black_on_negative_balance():
    woe = weight_of_evidence([("supports", 1.0), ("refutes", 4.0)])
    assert classify_horse(3, 2, 2, woe, 5.0) == HorseColor.BLACK


def test_horse_pink_on_heavy_evidence():
    woe = weight_of_evidence([("supports", 3.8), ("supports", 3.8)])
    assert woe.total >= 5.0
    assert classify_horse(5, 2, 3, woe, 5.0) == HorseColor.PINK


def test_horse_blue_on_light_evidence():
    woe = weight_of_evidence([("supports", 1.0), ("supports", 1.5)])
    assert classify_horse(5, 2, 3, woe, 5.0) == HorseColor.BLUE


def test_horse_gate_configurable():
    woe = weight_of_evidence([("supports", 5.0)])
    gate = InteractionGate(min_distinct_voters=1, min_evidence_items=1, min_raters=1)
    assert classify_horse(1, 1, 1, woe, 5.0, gate) == HorseColor.PINK


@given(
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=0, max_value=6),
    st.integers(min_value=0, max_value=6),
)
def test_horse_white_iff_gate_unmet(voters, items, raters):
    woe = weight_of_evidence([("supports", 3.0), ("supports", 3.0)])
    color = classify_horse(voters, items, raters, woe, 5.0)
    gate_met = voters >= 3 and items >= 2 and raters >= 2
    assert (color == HorseColor.WHITE) == (not gate_met)


def test_quadrant_rules():
    t = Thresholds(0.7, 5.0)
    assert classify_quadrant(0.83, 7.6, t) == Quadrant.GREEN
    assert classify_quadrant(0.9, 2.0, t) == Quadrant.RED
    assert classify_quadrant(0.4, 8.0, t) == Quadrant.AMBER
    assert classify_quadrant(0.5, 1.0, t) == Quadrant.WHITE_CONTENTIOUS


def test_quadrant_boundary_equality_counts_as_met():
    t = Thresholds(0.7, 5.0)
    assert classify_quadrant(0.7, 5.0, t) == Quadrant.GREEN
    assert classify_quadrant(0.7, 4.999, t) == Quadrant.RED
    assert classify_quadrant(0.699, 5.0, t) == Quadrant.AMBER


# Thresholds and weights live on the sliders' 0.1 grid; rescaling by
# arbitrary subnormal-range floats is not faithful double arithmetic.
_tenths = st.integers(min_value=0, max_value=300).map(lambda n: n / 10)


@given(
    st.floats(min_value=0, max_value=1),
    _tenths,
    st.floats(min_value=0, max_value=1),
    _tenths,
    st.sampled_from([0.25, 0.5, 1.0, 2.0, 3.0, 8.0]),
)
def test_quadrant_invariant_under_woe_rescaling(dob, woe, theta_b, theta_e, scale):
    t = Thresholds(theta_b, theta_e)
    scaled = Thresholds(theta_b, theta_e * scale)
    assert classify_quadrant(dob, woe, t) == classify_quadrant(dob, woe * scale, scaled)


def test_quadrant_invariant_under_nonlinear_monotone_rescaling():
    f = lambda v: v * v + v  # strictly increasing on [0, inf)
    for woe in (0.0, 2.0, 5.0, 7.5):
        for theta_e in (0.0, 2.0, 5.0, 7.5):
            t = Thresholds(0.7, theta_e)
            mapped = Thresholds(0.7, f(theta_e))
            assert classify_quadrant(0.8, woe, t) == classify_quadrant(0.8, f(woe), mapped)


def test_thresholds_validation():
    with pytest.raises(ValidationError):
        Thresholds(theta_belief=1.01)
    with pytest.raises(ValidationError):
        Thresholds(theta_evidence=-0.1)


# -- timeline -----------------------------------------------------------------


def _seeded_workspace():
    ws = Workspace()
    clock = [T0]

    def tick(seconds=60):
        clock[0] += timedelta(seconds=seconds)
        return clock[0]

    users = [ws.register_user(f"user-{i}", now=tick()) for i in range(4)]
    h, _ = ws.create_hypothesis(
        "Field teams should pilot the tooling in some cases",
        "pilot scope",
        "tooling",
        users[0].user_id,
        now=tick(),
    )
    return ws, h, users, tick


def test_timeline_empty_before_interactions():
    ws, h, _, _ = _seeded_workspace()
    assert ws.timeline(h.hypothesis_id) == []


def test_timeline_single_upvote():
    ws, h, users, tick = _seeded_workspace()
    ws.cast_vote(h.hypothesis_id, users[1].user_id, "up", now=tick())
    points = ws.timeline(h.hypothesis_id)
    assert len(points) == 1
    assert points[0].dob.mean == pytest.approx(2 / 3)


def test_timeline_final_point_matches_live_aggregate():
    ws, h, users, tick = _seeded_workspace()
    ws.cast_vote(h.hypothesis_id, users[1].user_id, "up", now=tick())
    item, _ = ws.add_evidence(
        h.hypothesis_id, "https://x.org/e", "arg", "induction", "supports", 7, users[2].user_id, now=tick()
    )
    ws.rate_evidence(item.evidence_id, users[3].user_id, 9, now=tick())
    ws.cast_vote(h.hypothesis_id, users[2].user_id, "down", now=tick())
    points = ws.timeline(h.hypothesis_id)
    assert len(points) == 4
    live = ws.aggregate(h.hypothesis_id)
    assert points[-1].dob == live.dob
    assert points[-1].woe == live.woe


def test_timeline_seqs_strictly_increase():
    ws, h, users, tick = _seeded_workspace()
    for i, direction in enumerate(["up", "down", "up"]):
        ws.cast_vote(h.hypothesis_id, users[i + 1].user_id, direction, now=tick())
    seqs = [p.seq for p in ws.timeline(h.hypothesis_id)]
    assert seqs == sorted(set(seqs))


def test_timeline_reflects_erasure():
    ws, h, users, tick = _seeded_workspace()
    ws.cast_vote(h.hypothesis_id, users[1].user_id, "up", now=tick())
    ws.erase_user(users[1].user_id, now=tick())
    points = ws.timeline(h.hypothesis_id)
    assert points[-1].dob.mean == 0.5
    assert points[-1].dob == ws.aggregate(h.hypothesis_id).dob


# -- filter and sort ----------------------------------------------------------


def _feed():
    ws = Workspace()
    clock = [T0]

    def tick(seconds=3600):
        clock[0] += timedelta(seconds=seconds)
        return clock[0]

    author = ws.register_user("author", now=tick())
    voters = [ws.register_user(f"voter-{i}", now=tick(1)) for i in range(12)]
    specs = [
        ("Nursing home elderly patient nutrition documentation needs to be automated", "Nutrition", 5, 0),
        ("Online ads are an effective way to change behaviour in many groups", "Public Health", 2, 0),
        ("We can improve human health and safety through what we eat", "Environment", 9, 1),
    ]
    aggs = []
    for title, tag, up, down in specs:
        h, _ = ws.create_hypothesis(title, f"details for {tag}", tag, author.user_id, now=tick())
        for i in range(up):
            ws.cast_vote(h.hypothesis_id, voters[i].user_id, "up", now=tick(1))
        for i in range(down):
            ws.cast_vote(h.hypothesis_id, voters[up + i].user_id, "down", now=tick(1))
        aggs.append(h.hypothesis_id)
    return ws, aggs


def test_filter_matches_keyword_case_insensitively():
    ws, _ = _feed()
    hits = filter_and_sort(ws.aggregates(), query="NUTRITION")
    assert len(hits) == 1
    assert hits[0].hypothesis.title.startswith("Nursing home")


def test_empty_query_returns_everything():
    ws, _ = _feed()
    assert len(filter_and_sort(ws.aggregates(), query="")) == 3
    assert len(filter_and_sort(ws.aggregates(), query=None)) == 3


def test_sort_by_dob_descending_with_recency_tiebreak():
    ws, _ = _feed()
    ordered = filter_and_sort(ws.aggregates(), sort_key="dob", descending=True)
    means = [round(a.dob.mean, 4) for a in ordered]
    assert means == sorted(means, reverse=True)
    assert ordered[0].dob.display == "0.9"


def test_sort_recency_default_newest_first():
    ws, _ = _feed()
    ordered = filter_and_sort(ws.aggregates())
    added = [a.hypothesis.added_on for a in ordered]
    assert added == sorted(added, reverse=True)


def test_sort_rejects_unknown_key():
    ws, _ = _feed()
    with pytest.raises(ValidationError) as err:
        filter_and_sort(ws.aggregates(), sort_key="magic")
    assert err.value.code == "unknown-sort-key"


def test_sort_stability_ties_broken_by_recency_then_id():
    ws = Workspace()
    clock = [T0]

    def tick(seconds=60):
        clock[0] += timedelta(seconds=seconds)
        return clock[0]

    author = ws.register_user("author", now=tick())
    a, _ = ws.create_hypothesis("First idea should be considered by all", "", "t", author.user_id, now=tick())
    b, _ = ws.create_hypothesis("Second idea should be considered by all", "", "t", author.user_id, now=tick())
    ordered = filter_and_sort(ws.aggregates(), sort_key="dob", descending=True)
    # Equal DoB: newer hypothesis first.
    assert [e.hypothesis.hypothesis_id for e in ordered] == [b.hypothesis_id, a.hypothesis_id]


def test_prior_must_be_positive():
    with pytest.raises(ValidationError):
        BetaParams(0.0, 1.0)
