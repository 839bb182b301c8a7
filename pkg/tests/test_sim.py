"""Simulation determinism, agent behaviours, majority-accuracy experiment."""

import math

import pytest

from credence.errors import ValidationError
from credence.sim import (
    AgentSpec,
    SimConfig,
    benchmark_config,
    cjt_experiment,
    config_from_dict,
    config_to_dict,
    detector_benchmark,
    roc_auc,
    simulate,
    spawn_seeds,
)
from credence.store import replay


def _tiny_config(seed=1, **overrides):
    base = dict(
        agents=(AgentSpec(kind="competent", count=6, p=0.7),),
        n_hypotheses=4,
        ground_truth=(True, False, True, True),
        n_rounds=2,
        seed=seed,
    )
    base.update(overrides)
    return SimConfig(**base)


def test_identical_seeds_give_byte_identical_logs(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    simulate(_tiny_config(seed=99), path=a)
    simulate(_tiny_config(seed=99), path=b)
    assert a.read_bytes() == b.read_bytes()


def test_different_seeds_differ(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    simulate(_tiny_config(seed=1), path=a)
    simulate(_tiny_config(seed=2), path=b)
    assert a.read_bytes() != b.read_bytes()


def test_all_competent_certain_voters_vote_up_on_true_hypothesis():
    config = SimConfig(
        agents=(AgentSpec(kind="competent", count=10, p=1.0),),
        n_hypotheses=1,
        ground_truth=(True,),
        n_rounds=1,
        seed=5,
    )
    result = simulate(config)
    agg = result.workspace.aggregate(result.hypothesis_ids[0])
    assert (agg.up_votes, agg.down_votes) == (10, 0)


def test_certain_voters_vote_down_on_false_hypothesis():
    config = SimConfig(
        agents=(AgentSpec(kind="competent", count=10, p=1.0),),
        n_hypotheses=1,
        ground_truth=(False,),
        n_rounds=1,
        seed=5,
    )
    result = simulate(config)
    agg = result.workspace.aggregate(result.hypothesis_ids[0])
    assert (agg.up_votes, agg.down_votes) == (0, 10)


def test_simulated_log_replays_cleanly():
    result = simulate(benchmark_config(3))
    state = replay(result.log.events())
    assert state.head_seq == result.log.head_seq
    assert state.serialize() == result.workspace.state.serialize()


def test_max_events_truncates_exactly():
    result = simulate(benchmark_config(7), max_events=500)
    assert result.log.head_seq == 500


def test_every_simulated_event_validates():
    result = simulate(_tiny_config(seed=11))
    for event in result.log.events():
        assert event.seq >= 1
        assert event.at.tzinfo is not None


def test_config_round_trip():
    config = benchmark_config(7)
    assert config_from_dict(config_to_dict(config)) == config


def test_config_rejects_bad_version():
    doc = config_to_dict(benchmark_config(7))
    doc["config_version"] = 99
    with pytest.raises(ValidationError) as err:
        config_from_dict(doc)
    assert err.value.code == "invalid-config"


def test_config_validation():
    with pytest.raises(ValidationError):
        AgentSpec(kind="psychic", count=1)
    with pytest.raises(ValidationError):
        AgentSpec(kind="competent", count=1, p=0.0)
    with pytest.raises(ValidationError):
        AgentSpec(kind="coup", count=2)
    with pytest.raises(ValidationError):
        AgentSpec(kind="generous_rater", count=1)
    with pytest.raises(ValidationError):
        _tiny_config(ground_truth=(True,))


# -- majority accuracy ----------------------------------------------------------


def binomial_majority_tail(p, n):
    """Exact P(majority correct) for odd n: sum of the upper binomial tail."""
    return sum(math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n // 2 + 1, n + 1))


def test_cjt_high_competence_large_group():
    assert cjt_experiment(0.7, 101, 10_000, seed=1) >= 0.999
    assert binomial_majority_tail(0.7, 101) >= 0.9999


def test_cjt_coin_flippers_are_even():
    assert cjt_experiment(0.5, 51, 20_000, seed=2) == pytest.approx(0.5, abs=0.02)


def test_cjt_single_voter_equals_p():
    assert cjt_experiment(0.62, 1, 40_000, seed=3) == pytest.approx(0.62, abs=0.01)


def test_cjt_matches_exact_binomial_tail():
    for p, n in [(0.6, 11), (0.55, 51), (0.7, 21)]:
        estimate = cjt_experiment(p, n, 40_000, seed=7)
        assert estimate == pytest.approx(binomial_majority_tail(p, n), abs=0.01)


def test_cjt_monotone_in_group_size():
    small = cjt_experiment(0.6, 11, 10_000, seed=11)
    large = cjt_experiment(0.6, 101, 10_000, seed=12)
    mc_se = math.sqrt(0.25 / 10_000)
    assert large - small > 3 * mc_se


def test_cjt_deterministic_given_seed():
    assert cjt_experiment(0.7, 101, 10_000, seed=42) == cjt_experiment(0.7, 101, 10_000, seed=42)


def test_cjt_rejects_bad_params():
    with pytest.raises(ValidationError):
        cjt_experiment(0.0, 11, 100, seed=1)
    with pytest.raises(ValidationError):
        cjt_experiment(0.7, 10, 100, seed=1)  # even group
    with pytest.raises(ValidationError):
        cjt_experiment(0.7, 11, 0, seed=1)


def test_spawn_seeds_are_distinct_and_deterministic():
    seeds = spawn_seeds(7, 8)
    assert len(set(seeds)) == 8
    assert seeds == spawn_seeds(7, 8)


# -- AUC ------------------------------------------------------------------------


def test_roc_auc_perfect_separation():
    assert roc_auc([0.9, 0.8], [0.1, 0.2, 0.3]) == 1.0
    assert roc_auc([0.1], [0.9, 0.8]) == 0.0


def test_roc_auc_all_equal_scores_is_half():
    assert roc_auc([0.5, 0.5], [0.5, 0.5, 0.5]) == 0.5


def test_roc_auc_empty_side_is_undefined():
    assert roc_auc([], [0.5]) is None
    assert roc_auc([0.5], []) is None


def test_roc_auc_matches_pairwise_count():
    pos = [0.9, 0.4, 0.7]
    neg = [0.3, 0.4, 0.8, 0.1]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    assert roc_auc(pos, neg) == pytest.approx(wins / (len(pos) * len(neg)))


def test_detector_benchmark_reports_none_without_planted_agents():
    config = _tiny_config(seed=13)
    auc = detector_benchmark(config)
    assert auc["careless"] is None
    assert auc["coup"] is None


def test_detector_benchmark_default_population():
    auc = detector_benchmark(benchmark_config(7))
    for detector in ("careless", "conformity", "authorship", "coup", "group_bias"):
        assert auc[detector] is not None
        assert auc[detector] >= 0.9
