from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dwsl.services.datagen import collect_dataset, make_behavior_policy, make_dataset
from dwsl.services.distance import (
    expectation_distance,
    fit_tabular,
    limit_temperature,
    load_distance_model,
    logsumexp_distance,
    mean_distance,
    save_distance_model,
    soft_minimum,
    train_classifier,
    train_regression,
)
from dwsl.services.distance.returns import distance_to_return
from dwsl.services.mdp import chain_env, pair_features
from dwsl.services.nn import FitConfig, forward, softmax_cross_entropy
from dwsl.services.relabel import BinningConfig, bin_index, sample_batch
from dwsl.utils.errors import InputDomainError

RIGHT = 1


def _straight_dataset():
    spec = chain_env(3, horizon=2)
    return make_dataset(spec, [((0, 1, 2), (RIGHT, RIGHT))])


def _rational_table(dataset, cfg):
    """Sampler-law bin masses by exhaustive enumeration in exact arithmetic."""
    masses = {}
    n = len(dataset)
    for traj in dataset.trajectories:
        T = traj.horizon
        for i in range(T):
            for j in range(i + 1, T + 1):
                key = (traj.states[i], int(dataset.spec.goal_map[traj.states[j]]))
                bins = masses.setdefault(key, [Fraction(0)] * cfg.num_bins)
                bins[bin_index(j - i, cfg)] += Fraction(1, n * T * (T - i))
    return {key: [m / sum(bins) for m in bins] for key, bins in masses.items()}


def test_stay_dataset_splits_mass(stay_dataset):
    model = fit_tabular(stay_dataset, BinningConfig.for_horizon(2))
    np.testing.assert_allclose(model.probs[0, 1], [0.5, 0.5])
    np.testing.assert_allclose(model.probs[1, 1], [1.0, 0.0])


def test_single_distance_is_point_mass():
    spec = chain_env(4, horizon=3)
    dataset = make_dataset(spec, [((0, 1, 2, 3), (RIGHT,) * 3)])
    model = fit_tabular(dataset, BinningConfig.for_horizon(3))
    np.testing.assert_array_equal(model.probs[0, 3], [0.0, 0.0, 1.0])


def test_unobserved_pair_is_unsupported(stay_dataset):
    model = fit_tabular(stay_dataset, BinningConfig.for_horizon(2))
    assert not model.support[2, 0]
    assert model.distribution(2, 0) is None
    assert logsumexp_distance(model, 2, 0, alpha=1.0) is None
    assert expectation_distance(model, 1, 0) is None
    values, supported = model.estimate(np.array([0, 2]), np.array([1, 0]), 1.0)
    assert supported.tolist() == [True, False]
    assert np.isnan(values[1])


@pytest.mark.parametrize("n_step", [1, 2, 3])
def test_tabular_fit_equals_exact_enumeration(random_chain_dataset, n_step):
    cfg = BinningConfig.for_horizon(random_chain_dataset.spec.horizon, n_step=n_step)
    model = fit_tabular(random_chain_dataset, cfg)
    exact = _rational_table(random_chain_dataset, cfg)
    assert int(model.support.sum()) == len(exact)
    for (s, g), probs in exact.items():
        expected = [float(p) for p in probs]
        np.testing.assert_allclose(model.probs[s, g], expected, atol=1e-12)


def test_point_mass_soft_minimum_any_alpha():
    values = BinningConfig.for_horizon(5).values
    probs = np.eye(5)[3]
    for alpha in (1e-3, 0.1, 1.0, 50.0):
        assert soft_minimum(probs, values, alpha) == pytest.approx(0.8, abs=1e-12)
    assert mean_distance(probs, values) == pytest.approx(0.8)


def test_soft_minimum_reference_value():
    result = soft_minimum(np.array([0.5, 0.5]), np.array([1.0, 3.0]), alpha=1.0)
    expected = -np.log(0.5 * np.exp(-1) + 0.5 * np.exp(-3))
    assert result == pytest.approx(expected, abs=1e-12)
    assert result == pytest.approx(1.5663, abs=1e-3)


def test_expectation_reference_value():
    values = BinningConfig.for_horizon(3).values
    assert mean_distance(np.array([0.5, 0.0, 0.5]), values) == pytest.approx(2 / 3)


def test_soft_minimum_limit_on_dataset(random_chain_dataset):
    cfg = BinningConfig.for_horizon(random_chain_dataset.spec.horizon)
    model = fit_tabular(random_chain_dataset, cfg)
    alpha = limit_temperature(model.probs[model.support], 1e-3, 1e-3)
    assert 0.0 < alpha <= 1e-3
    for s, g in zip(*np.nonzero(model.support)):
        dist = model.distribution(s, g)
        first = np.flatnonzero(dist.support)[0]
        minimum = cfg.values[first]
        gap = logsumexp_distance(model, s, g, alpha=1e-3) - minimum
        assert -1e-12 <= gap <= 1e-3 * np.log(1.0 / dist.probs[first]) + 1e-12
        assert abs(logsumexp_distance(model, s, g, alpha=alpha) - minimum) <= 1e-3


def test_limit_temperature_shrinks_for_thin_minimum():
    values = BinningConfig.for_horizon(4).values
    probs = np.array([[0.01, 0.0, 0.99, 0.0], [1.0, 0.0, 0.0, 0.0]])
    alpha = limit_temperature(probs, 1e-3, 1e-3)
    assert alpha == pytest.approx(0.5e-3 / np.log(100.0))
    assert soft_minimum(probs[0], values, 1e-3) - values[0] > 1e-3
    assert soft_minimum(probs[0], values, alpha) - values[0] <= 1e-3
    assert limit_temperature(probs[1:], 1e-3, 1e-3) == 1e-3


distributions = st.lists(st.floats(0.0, 1.0), min_size=2, max_size=30).filter(
    lambda w: sum(w) > 1e-6
)


@given(distributions, st.floats(1e-4, 10.0), st.floats(1.0, 5.0))
def test_soft_minimum_bounds_and_monotonicity(weights, alpha, factor):
    probs = np.array(weights) / sum(weights)
    values = (np.arange(len(probs)) + 1.0) / len(probs)
    soft = soft_minimum(probs, values, alpha)
    minimum = values[np.flatnonzero(probs > 0)[0]]
    mean = mean_distance(probs, values)
    assert minimum - 1e-9 <= soft <= mean + 1e-9
    assert soft_minimum(probs, values, alpha * factor) >= soft - 1e-9


def test_soft_minimum_rejects_nonpositive_alpha():
    with pytest.raises(InputDomainError):
        soft_minimum(np.array([1.0]), np.array([1.0]), 0.0)


def test_large_bin_count_is_stable():
    B = 1000
    probs = np.full(B, 1.0 / B)
    values = (np.arange(B) + 1.0) / B
    assert np.isfinite(soft_minimum(probs, values, 1e-4))


def test_distance_to_return():
    assert distance_to_return(1, 0.9) == 0.0
    assert distance_to_return(3, 0.9) == pytest.approx(-1.9)
    assert distance_to_return(4, 1.0) == -3.0
    assert distance_to_return(9, 1.0, horizon=5) == -5.0
    returns = distance_to_return(np.arange(1, 52), 0.98)
    assert np.all(np.diff(returns) < 0)
    with pytest.raises(InputDomainError):
        distance_to_return(0, 0.9)
    with pytest.raises(InputDomainError):
        distance_to_return(2, 1.5)


def test_untrained_classifier_is_near_uniform(random_chain_dataset):
    cfg = BinningConfig.for_horizon(random_chain_dataset.spec.horizon)
    model = train_classifier(random_chain_dataset, cfg, FitConfig(steps=0, seed=1))
    batch = sample_batch(random_chain_dataset, cfg, 64, np.random.default_rng(0))
    loss, _ = softmax_cross_entropy(model.logits(batch.states, batch.goals), batch.bins)
    assert loss == pytest.approx(np.log(cfg.num_bins), abs=0.05)


def test_classifier_learns_deterministic_distances():
    dataset = _straight_dataset()
    cfg = BinningConfig.for_horizon(2)
    fit_cfg = FitConfig(
        steps=1500, batch_size=64, learning_rate=1e-2, features="onehot", seed=0
    )
    model = train_classifier(dataset, cfg, fit_cfg)
    probs, _ = model.distributions(np.array([0, 0, 1]), np.array([1, 2, 2]))
    assert probs[0, 0] >= 0.99
    assert probs[1, 1] >= 0.99
    assert probs[2, 0] >= 0.99


def test_regressor_single_pattern():
    spec = chain_env(3, horizon=2)
    dataset = make_dataset(spec, [((0, 1), (RIGHT,))] * 2)
    cfg = BinningConfig.for_horizon(2)
    fit_cfg = FitConfig(
        steps=1500, batch_size=32, learning_rate=1e-2, features="onehot", seed=0
    )
    model = train_regression(dataset, cfg, fit_cfg, mode="mse")
    prediction = model.predict(np.array([0]), np.array([1]))[0]
    assert prediction == pytest.approx(0.5, abs=1e-3)


def test_expectile_regressor_leans_to_short_distances(stay_dataset):
    # (0, 1) sees normalised distances 0.5 and 1.0 with equal probability; the
    # 0.9-expectile with overestimates weighted 0.9 solves
    # 0.9 * (u - 0.5) = 0.1 * (1 - u), u = 0.55
    cfg = BinningConfig.for_horizon(2)
    fit_cfg = FitConfig(
        steps=3000, batch_size=256, learning_rate=5e-3, features="onehot", seed=0
    )
    mean_fit = train_regression(stay_dataset, cfg, fit_cfg, mode="mse")
    expectile_fit = train_regression(stay_dataset, cfg, fit_cfg, "expectile", tau=0.9)
    mean_value = mean_fit.predict(np.array([0]), np.array([1]))[0]
    expectile_value = expectile_fit.predict(np.array([0]), np.array([1]))[0]
    assert mean_value == pytest.approx(0.75, abs=0.03)
    assert expectile_value == pytest.approx(0.55, abs=0.03)


def test_regression_mode_validation(stay_dataset):
    cfg = BinningConfig.for_horizon(2)
    with pytest.raises(InputDomainError):
        train_regression(stay_dataset, cfg, FitConfig(steps=0), mode="huber")
    with pytest.raises(InputDomainError):
        train_regression(stay_dataset, cfg, FitConfig(steps=0), "expectile", tau=0.3)


@pytest.mark.slow
def test_classifier_matches_tabular_fit(chain5):
    policy = make_behavior_policy(chain5, "noisy_expert", epsilon=0.5)
    dataset = collect_dataset(chain5, policy, 8, seed=2)
    cfg = BinningConfig.for_horizon(chain5.horizon)
    tabular = fit_tabular(dataset, cfg)
    fit_cfg = FitConfig(
        steps=10000,
        batch_size=1024,
        learning_rate=2e-3,
        hidden_sizes=(128, 128),
        features="onehot",
        schedule="cosine",
        seed=0,
    )
    classifier = train_classifier(dataset, cfg, fit_cfg)
    states, goals = np.nonzero(tabular.support)
    learned, _ = classifier.distributions(states, goals)
    tv = 0.5 * np.abs(learned - tabular.probs[states, goals]).sum(axis=1)
    assert tv.max() <= 0.05


def test_tabular_checkpoint_roundtrip(tmp_path, random_chain_dataset):
    cfg = BinningConfig.for_horizon(random_chain_dataset.spec.horizon, n_step=2)
    model = fit_tabular(random_chain_dataset, cfg)
    path = save_distance_model(tmp_path / "distance.json", model, {"seed": 1})
    restored = load_distance_model(path)
    assert restored.backend == "tabular"
    assert restored.binning == cfg
    np.testing.assert_array_equal(restored.support, model.support)
    np.testing.assert_array_equal(restored.probs, model.probs)


def test_network_checkpoint_roundtrip(tmp_path, stay_dataset):
    cfg = BinningConfig.for_horizon(2)
    model = train_regression(
        stay_dataset, cfg, FitConfig(steps=5, batch_size=4), "expectile", tau=0.7
    )
    restored = load_distance_model(save_distance_model(tmp_path / "r.json", model))
    assert (restored.mode, restored.tau) == ("expectile", 0.7)
    x = pair_features(stay_dataset.spec, np.array([0, 1]), np.array([1, 1]))
    np.testing.assert_array_equal(forward(restored.net, x), forward(model.net, x))
