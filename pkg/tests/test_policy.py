import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dwsl.services.datagen import make_dataset
from dwsl.services.distance import TabularDistanceModel, fit_tabular, soft_minimum
from dwsl.services.mdp import chain_env
from dwsl.services.oracle import (
    exact_distance_model,
    first_hit_tables,
    goal_persistent_behavior,
    optimal_kl_policy,
    soft_value_iteration,
)
from dwsl.services.policy import (
    MlpPolicy,
    TabularPolicy,
    TrainConfig,
    act,
    advantage,
    extract_tabular_policy,
    load_policy,
    run_algorithm,
    save_policy,
    train_awr_variant,
    train_dwsl,
    train_dwsl_b,
    train_gcsl,
    transition_weights,
    weight,
)
from dwsl.services.policy.bootstrap import bootstrap_targets, shift_distribution
from dwsl.services.relabel import BinningConfig
from dwsl.utils.errors import InputDomainError

LEFT, RIGHT, STAY = 0, 1, 2


def _tv(p, q):
    return 0.5 * np.abs(p - q).sum(axis=-1)


def test_advantage_on_shortest_path(chain5):
    B = 10
    # d(2, 4) = 2 / B, d(3, 4) = 1 / B: one step of progress costs exactly 1 / B
    adv = advantage(chain5, [2 / B], [1 / B], [3], [4], B)
    assert adv[0] == pytest.approx(0.0, abs=1e-15)
    assert weight(adv, 0.05, 10.0)[0] == pytest.approx(1.0)


def test_advantage_goal_step_and_detour(chain5):
    B = 10
    goal_step = advantage(chain5, [1 / B], [1 / B], [4], [4], B)
    assert goal_step[0] == pytest.approx(0.0)
    detour = advantage(chain5, [3 / B], [3 / B], [1], [4], B)
    assert detour[0] == pytest.approx(-1 / B)


def test_weight_values():
    assert weight(0.0, 0.05, 10.0) == 1.0
    assert weight(-1 / 50, 0.05, 10.0) == pytest.approx(np.exp(-0.4))
    assert weight(-1 / 50, 0.05, 10.0) == pytest.approx(0.6703, abs=1e-4)
    assert weight(5.0, 0.05, 10.0) == pytest.approx(10.0)
    assert weight(5.0, 0.05, None) == pytest.approx(np.exp(100.0))
    with pytest.raises(InputDomainError):
        weight(0.0, 0.0, 10.0)


@given(
    st.floats(-1e6, 1e6, allow_nan=False),
    st.floats(1e-4, 10.0),
    st.floats(1.0, 100.0),
)
def test_weights_are_positive_and_clipped(adv, beta, clip):
    w = weight(np.array([adv]), beta, clip)[0]
    assert 0.0 < w <= clip * (1 + 1e-12)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(clip=0.5)
    with pytest.raises(ValueError):
        TrainConfig(beta=0.0)
    with pytest.raises(ValueError):
        TrainConfig(expectile=0.4)
    assert TrainConfig(clip=None).clip is None
    defaults = TrainConfig()
    assert (defaults.alpha, defaults.beta, defaults.clip) == (1.0, 0.05, 10.0)


def test_expert_data_dwsl_equals_gcsl(expert_chain_dataset):
    cfg = TrainConfig()
    model = fit_tabular(expert_chain_dataset, BinningConfig.for_horizon(10))
    dwsl = train_dwsl(expert_chain_dataset, model, cfg)
    gcsl = train_gcsl(expert_chain_dataset, cfg)
    np.testing.assert_array_equal(dwsl.support, gcsl.support)
    np.testing.assert_allclose(dwsl.probs, gcsl.probs, atol=1e-12)
    assert dwsl.training_fallbacks == 0


def _detour_dataset():
    spec = chain_env(5)
    return make_dataset(
        spec,
        [
            ((1, 2, 3), (RIGHT, RIGHT)),
            ((1, 0, 1, 2, 3), (LEFT, RIGHT, RIGHT, RIGHT)),
        ],
    )


def test_small_beta_prefers_shortest_path():
    dataset = _detour_dataset()
    model = fit_tabular(dataset, BinningConfig.for_horizon(dataset.spec.horizon))
    gcsl = train_gcsl(dataset, TrainConfig())
    assert gcsl.probs[1, 3, LEFT] > 0.0
    policy = train_dwsl(dataset, model, TrainConfig(beta=1e-3, clip=None))
    assert policy.probs[1, 3, RIGHT] > 1 - 1e-9
    probs, _ = policy.action_probs(np.array([1]), np.array([3]))
    assert np.argmax(probs[0]) == RIGHT


def test_low_alpha_trusts_the_shortest_observed_route(chain5):
    # Toward goal 4 from state 2: RIGHT reaches 3, usually far from the goal
    # but once in a single step; LEFT reaches 1, always six steps away.
    binning = BinningConfig.for_horizon(chain5.horizon)
    probs = np.zeros((5, 5, binning.num_bins))
    probs[3, 4, [0, 9]] = [0.2, 0.8]
    probs[1, 4, 5] = 1.0
    probs[2, 4, 6] = 1.0
    support = probs.sum(axis=2) > 0
    model = TabularDistanceModel(chain5, binning, probs, support)
    behavior = np.zeros((5, 5, 3))
    behavior[2, 4] = [0.5, 0.3, 0.2]
    rows = np.zeros((5, 5), dtype=bool)
    rows[2, 4] = True

    def greedy(alpha):
        policy = extract_tabular_policy(
            chain5, behavior, rows, model, model, TrainConfig(alpha=alpha)
        )
        return int(np.argmax(policy.probs[2, 4]))

    assert greedy(1.0) == LEFT
    assert greedy(0.1) == RIGHT


def test_large_beta_recovers_gcsl(random_chain_dataset):
    cfg = TrainConfig(beta=1e12, clip=None)
    model = fit_tabular(random_chain_dataset, BinningConfig.for_horizon(10))
    gcsl = train_gcsl(random_chain_dataset, cfg)
    dwsl = train_dwsl(random_chain_dataset, model, cfg)
    awr = train_awr_variant(random_chain_dataset, cfg, model)
    rows = gcsl.support
    assert _tv(dwsl.probs[rows], gcsl.probs[rows]).max() <= 1e-9
    assert _tv(awr.probs[rows], gcsl.probs[rows]).max() <= 1e-9


def test_gcsl_rows_are_normalised(random_chain_dataset):
    policy = train_gcsl(random_chain_dataset, TrainConfig())
    assert isinstance(policy, TabularPolicy)
    np.testing.assert_allclose(policy.probs[policy.support].sum(axis=1), 1.0)
    # A deterministic single-trajectory dataset imitates its own actions
    spec = chain_env(3, horizon=2)
    straight = make_dataset(spec, [((0, 1, 2), (RIGHT, RIGHT))])
    single = train_gcsl(straight, TrainConfig())
    np.testing.assert_array_equal(single.probs[0, 2], [0.0, 1.0, 0.0])


def test_awr_equals_dwsl_on_point_masses():
    spec = chain_env(4, horizon=3)
    dataset = make_dataset(spec, [((0, 1, 2, 3), (RIGHT,) * 3)])
    model = fit_tabular(dataset, BinningConfig.for_horizon(3))
    cfg = TrainConfig()
    np.testing.assert_allclose(
        train_awr_variant(dataset, cfg, model).probs,
        train_dwsl(dataset, model, cfg).probs,
    )


def test_mean_is_less_sharp_than_soft_minimum(random_chain_dataset):
    model = fit_tabular(random_chain_dataset, BinningConfig.for_horizon(10))
    states, goals = np.nonzero(model.support)
    soft, _ = model.estimate(states, goals, 0.05, "logsumexp")
    mean, _ = model.estimate(states, goals, 0.05, "expectation")
    assert np.all(mean >= soft - 1e-12)
    assert np.any(mean > soft + 1e-3)


def test_unsupported_next_state_counts_fallback(stay_dataset):
    spec = stay_dataset.spec
    model = fit_tabular(stay_dataset, BinningConfig.for_horizon(2))
    # Toward goal 1, state 0 has an estimate and state 2 does not
    w, fallback = transition_weights(
        spec,
        model,
        model,
        np.array([0, 0]),
        np.array([0, 2]),
        np.array([1, 1]),
        TrainConfig(),
    )
    assert fallback.tolist() == [False, True]
    assert w[1] == 1.0


def test_goal_reaching_next_state_is_scored_one_step():
    spec = chain_env(3, horizon=2)
    dataset = make_dataset(spec, [((0, 1, 2), (RIGHT, RIGHT))])
    model = fit_tabular(dataset, BinningConfig.for_horizon(2))
    assert not model.support[2, 2]
    w, fallback = transition_weights(
        spec, model, model, np.array([1]), np.array([2]), np.array([2]), TrainConfig()
    )
    assert fallback.tolist() == [False]
    assert w[0] == pytest.approx(1.0)


def test_exact_distances_recover_optimal_policy(chain5):
    behavior = goal_persistent_behavior(chain5)
    horizon = chain5.horizon
    num_bins = horizon + 1
    tables = first_hit_tables(chain5, behavior, horizon)
    alpha = 1.0
    optimal = optimal_kl_policy(
        chain5, soft_value_iteration(chain5, behavior, alpha, 1.0, horizon), behavior
    )
    cfg = TrainConfig(alpha=alpha / num_bins, beta=alpha / num_bins, clip=None)
    for t in range(horizon):
        remaining = horizon - t
        current = exact_distance_model(chain5, behavior, remaining, num_bins, tables)
        following = exact_distance_model(
            chain5, behavior, remaining - 1, num_bins, tables
        )
        extracted = extract_tabular_policy(
            chain5, behavior.probs, behavior.support, current, following, cfg
        )
        rows = extracted.support & optimal.support[t]
        assert rows.any()
        assert _tv(extracted.probs[rows], optimal.probs[t][rows]).max() <= 1e-6


def test_shift_distribution():
    shifted = shift_distribution(np.array([[0.5, 0.25, 0.25], [0.0, 0.0, 1.0]]))
    np.testing.assert_allclose(shifted, [[0.0, 0.5, 0.5], [0.0, 0.0, 1.0]])


def test_bootstrap_target_at_goal_is_bin_zero(chain5):
    from dwsl.services.nn import init_mlp

    net = init_mlp((10, 8, 4), seed=0)
    targets = bootstrap_targets(
        chain5, net, np.array([3, 2]), np.array([3, 3]), 4, "onehot"
    )
    np.testing.assert_array_equal(targets[0], [1.0, 0.0, 0.0, 0.0])
    assert targets[1, 0] == 0.0
    assert targets[1].sum() == pytest.approx(1.0)


def test_dwsl_b_rejects_multi_step_bins(stay_dataset):
    with pytest.raises(InputDomainError):
        train_dwsl_b(stay_dataset, BinningConfig(n_step=2, num_bins=1), TrainConfig())
    with pytest.raises(InputDomainError):
        run_algorithm(
            stay_dataset, "dwsl_b", "tabular", BinningConfig(2, 1), TrainConfig()
        )


def _two_way_dataset():
    spec = chain_env(8, horizon=7)
    return make_dataset(
        spec,
        [
            (tuple(range(8)), (RIGHT,) * 7),
            (tuple(range(7, -1, -1)), (LEFT,) * 7),
        ],
    )


def test_dwsl_b_converges_on_single_trajectory():
    spec = chain_env(5, horizon=4)
    dataset = make_dataset(spec, [((0, 1, 2, 3, 4), (RIGHT,) * 4)])
    binning = BinningConfig.for_horizon(4)
    cfg = TrainConfig(
        steps=6000,
        batch_size=64,
        learning_rate=5e-3,
        hidden_sizes=(64,),
        features="onehot",
        seed=0,
    )
    model = train_dwsl_b(dataset, binning, cfg)
    probs, _ = model.distributions(np.arange(4), np.full(4, 4))
    # From state t the goal 4 is first reached after 4 - t steps
    np.testing.assert_array_equal(np.argmax(probs, axis=1), [3, 2, 1, 0])


@pytest.mark.slow
def test_dwsl_b_matches_tabular_soft_minimum():
    dataset = _two_way_dataset()
    binning = BinningConfig.for_horizon(7)
    cfg = TrainConfig(
        steps=20000,
        batch_size=128,
        learning_rate=5e-3,
        hidden_sizes=(64,),
        features="onehot",
        seed=0,
    )
    bootstrapped = train_dwsl_b(dataset, binning, cfg)
    tabular = fit_tabular(dataset, binning)
    states, goals = np.nonzero(tabular.support)
    expected, _ = tabular.estimate(states, goals, 1.0)
    learned, _ = bootstrapped.estimate(states, goals, 1.0)
    assert np.abs(learned - expected).max() <= 0.05


def test_act_contracts(chain5):
    probs = np.zeros((5, 5, 3))
    probs[:, :, RIGHT] = 1.0
    probs[0, 0] = 1.0 / 3
    support = np.ones((5, 5), dtype=bool)
    support[4, 0] = False
    policy = TabularPolicy(chain5, probs, support)
    rng = np.random.default_rng(0)
    assert act(policy, 2, 4, "greedy", rng) == (RIGHT, False)
    # Ties resolve to the lowest action id
    assert act(policy, 0, 0, "greedy", rng) == (LEFT, False)
    assert act(policy, 4, 0, "greedy", rng) == (LEFT, True)
    with pytest.raises(InputDomainError):
        act(policy, 2, 4, "boltzmann", rng)


def test_sampled_actions_are_reproducible(chain5):
    probs = np.full((5, 5, 3), 1.0 / 3)
    policy = TabularPolicy(chain5, probs, np.ones((5, 5), dtype=bool))
    first = [act(policy, 1, 3, "sample", np.random.default_rng(7))[0] for _ in range(5)]
    rng_a, rng_b = np.random.default_rng(3), np.random.default_rng(3)
    seq_a = [act(policy, 1, 3, "sample", rng_a)[0] for _ in range(20)]
    seq_b = [act(policy, 1, 3, "sample", rng_b)[0] for _ in range(20)]
    assert seq_a == seq_b
    assert len(set(first)) == 1


@given(st.lists(st.floats(0.01, 1.0), min_size=3, max_size=3))
def test_greedy_picks_the_first_most_probable_action(weights):
    spec = chain_env(2)
    row = np.array(weights) / np.sum(weights)
    policy = TabularPolicy(spec, np.tile(row, (2, 2, 1)), np.ones((2, 2), dtype=bool))
    action, fallback = act(policy, 0, 1, "greedy", np.random.default_rng(0))
    assert action == int(np.argmax(row))
    assert not fallback


def test_time_indexed_policy_clamps_time(chain5):
    probs = np.zeros((2, 5, 5, 3))
    probs[0, :, :, LEFT] = 1.0
    probs[1, :, :, STAY] = 1.0
    policy = TabularPolicy(chain5, probs, np.ones((2, 5, 5), dtype=bool))
    rng = np.random.default_rng(0)
    assert act(policy, 2, 2, "greedy", rng, t=0)[0] == LEFT
    assert act(policy, 2, 2, "greedy", rng, t=9)[0] == STAY


def test_policy_checkpoints(tmp_path, random_chain_dataset, chain5):
    tabular = train_gcsl(random_chain_dataset, TrainConfig())
    restored = load_policy(save_policy(tmp_path / "p.json", tabular, {"seed": 0}))
    np.testing.assert_array_equal(restored.probs, tabular.probs)
    np.testing.assert_array_equal(restored.support, tabular.support)

    behavior = goal_persistent_behavior(chain5)
    table = soft_value_iteration(chain5, behavior, 1.0, 1.0, 4)
    timed = optimal_kl_policy(chain5, table, behavior)
    restored = load_policy(save_policy(tmp_path / "t.json", timed))
    assert restored.time_indexed
    np.testing.assert_array_equal(restored.probs, timed.probs)

    mlp = train_gcsl(
        random_chain_dataset, TrainConfig(steps=3, batch_size=8), backend="mlp"
    )
    restored = load_policy(save_policy(tmp_path / "m.json", mlp))
    assert isinstance(restored, MlpPolicy)
    states, goals = np.array([0, 3]), np.array([4, 1])
    np.testing.assert_array_equal(
        restored.action_probs(states, goals)[0], mlp.action_probs(states, goals)[0]
    )


def test_mlp_training_reports_callback_steps(random_chain_dataset):
    seen = []
    model = fit_tabular(random_chain_dataset, BinningConfig.for_horizon(10))
    train_dwsl(
        random_chain_dataset,
        model,
        TrainConfig(steps=4, batch_size=16),
        backend="mlp",
        callback=lambda step, policy: seen.append((step, policy.backend)),
    )
    assert seen == [(1, "mlp"), (2, "mlp"), (3, "mlp"), (4, "mlp")]


def test_run_algorithm_variants(random_chain_dataset):
    binning = BinningConfig.for_horizon(10)
    cfg = TrainConfig(steps=2, batch_size=8)
    data = random_chain_dataset
    distance, policy = run_algorithm(data, "gcsl", "tabular", binning, cfg)
    assert distance is None and isinstance(policy, TabularPolicy)
    distance, _ = run_algorithm(data, "dwsl", "tabular", binning, cfg)
    assert distance.backend == "tabular"
    distance, _ = run_algorithm(data, "expectile", "mlp", binning, cfg)
    assert distance.backend == "mlp-regressor"
    distance, _ = run_algorithm(data, "dwsl", "mlp", binning, cfg)
    assert distance.backend == "mlp-classifier"
    with pytest.raises(InputDomainError):
        run_algorithm(data, "td3", "tabular", binning, cfg)
    with pytest.raises(InputDomainError):
        train_gcsl(random_chain_dataset, cfg, backend="tree")


@pytest.mark.slow
def test_mlp_policy_approaches_tabular(random_chain_dataset):
    binning = BinningConfig.for_horizon(10)
    model = fit_tabular(random_chain_dataset, binning)
    cfg = TrainConfig(
        steps=6000,
        batch_size=512,
        learning_rate=1e-3,
        hidden_sizes=(128, 128),
        features="onehot",
        seed=0,
    )
    tabular = train_dwsl(random_chain_dataset, model, cfg)
    mlp = train_dwsl(random_chain_dataset, model, cfg, backend="mlp")
    states, goals = np.nonzero(tabular.support)
    learned, _ = mlp.action_probs(states, goals)
    assert np.mean(_tv(learned, tabular.probs[states, goals])) <= 0.1


def test_soft_minimum_used_for_dwsl_weights(stay_dataset):
    model = fit_tabular(stay_dataset, BinningConfig.for_horizon(2))
    d, _ = model.estimate(np.array([0]), np.array([1]), 1.0)
    expected = soft_minimum(np.array([0.5, 0.5]), model.binning.values, 1.0)
    assert d[0] == pytest.approx(expected)
