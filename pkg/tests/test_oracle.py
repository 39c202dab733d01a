import math

import numpy as np
import pytest

from dwsl.services.datagen import make_dataset
from dwsl.services.distance import CategoricalDistance
from dwsl.services.mdp import chain_env, grid_env
from dwsl.services.oracle import (
    EmpiricalBehavior,
    behavior_value,
    distance_soft_value,
    empirical_soft_value,
    estimate_behavior,
    first_hit_distribution,
    fixed_point_residual,
    goal_persistent_behavior,
    optimal_kl_policy,
    return_atoms,
    soft_value_iteration,
    truncation_horizon,
    uniform_behavior,
    verify_suite,
    write_report,
)
from dwsl.services.oracle.suite import check_extraction, check_proposition
from dwsl.utils.errors import (
    EnumerationLimitError,
    InputDomainError,
    SolverError,
    SupportError,
)
from dwsl.utils.records import read_lines

LEFT, RIGHT, STAY = 0, 1, 2


def _merged(atoms):
    totals = {}
    for p, ret in atoms:
        totals[round(ret, 12)] = totals.get(round(ret, 12), 0.0) + p
    return totals


def test_enumerates_all_nine_chain_trajectories():
    spec = chain_env(3, horizon=2)
    atoms = return_atoms(spec, uniform_behavior(spec), 0, 2, 1.0, 2)
    totals = _merged(atoms)
    assert totals == pytest.approx({-2.0: 8 / 9, -1.0: 1 / 9})
    expected = math.log(8 / 9 * math.exp(-2) + 1 / 9 * math.exp(-1))
    value = empirical_soft_value(spec, uniform_behavior(spec), 0, 2, 1.0)
    assert value == pytest.approx(expected, abs=1e-12)
    table = soft_value_iteration(spec, uniform_behavior(spec), 1.0)
    assert table.V[0, 0, 2] == pytest.approx(expected, abs=1e-12)


def test_single_action_behavior_has_deterministic_value():
    spec = chain_env(3, horizon=3)
    probs = np.zeros((3, 3, 3))
    probs[:, :, RIGHT] = 1.0
    behavior = EmpiricalBehavior(probs, np.ones((3, 3), dtype=bool))
    for alpha in (0.1, 1.0, 10.0):
        table = soft_value_iteration(spec, behavior, alpha)
        assert table.V[0, 0, 2] == pytest.approx(-1.0, abs=1e-12)
        assert empirical_soft_value(spec, behavior, 0, 2, alpha) == pytest.approx(-1.0)


def test_absorbing_goal_is_finalised():
    spec = chain_env(2, horizon=50)
    atoms = return_atoms(spec, goal_persistent_behavior(spec), 1, 1, 1.0, 50)
    assert atoms == [(1.0, 0.0)]


@pytest.mark.parametrize(
    "spec",
    [chain_env(5, horizon=6), grid_env(3, 3, horizon=4)],
    ids=["chain-5", "grid-3x3"],
)
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_finite_horizon_matches_enumeration(spec, alpha):
    behavior = uniform_behavior(spec)
    table = soft_value_iteration(spec, behavior, alpha)
    for s, g in np.argwhere(behavior.support):
        enumerated = empirical_soft_value(spec, behavior, s, g, alpha)
        assert abs(table.V[0, s, g] - enumerated) <= 1e-9
    assert fixed_point_residual(spec, table, behavior) <= 1e-12


def test_infinite_horizon_fixed_point(chain5):
    behavior = goal_persistent_behavior(chain5)
    table = soft_value_iteration(chain5, behavior, 1.0, gamma=0.9)
    assert not table.finite
    assert table.V.shape == (1, 5, 5)
    assert fixed_point_residual(chain5, table, behavior) <= 1e-12
    np.testing.assert_allclose(np.diagonal(table.V[0]), 0.0, atol=1e-12)


def test_soft_value_limits():
    spec = chain_env(3, horizon=2)
    behavior = uniform_behavior(spec)
    greedy = soft_value_iteration(spec, behavior, 1e-3)
    assert greedy.V[0, 0, 2] == pytest.approx(-1.0, abs=1e-2)
    averaged = soft_value_iteration(spec, behavior, 1e4)
    assert averaged.V[0, 0, 2] == pytest.approx(-17 / 9, abs=1e-3)


def test_soft_value_iteration_rejects_bad_parameters(chain5):
    behavior = uniform_behavior(chain5)
    with pytest.raises(InputDomainError):
        soft_value_iteration(chain5, behavior, 0.0)
    with pytest.raises(InputDomainError):
        soft_value_iteration(chain5, behavior, 1.0, gamma=1.5)
    with pytest.raises(SolverError) as excinfo:
        soft_value_iteration(chain5, behavior, 1.0, gamma=0.99, max_iterations=3)
    assert excinfo.value.iterations == 3


def test_policy_row_without_valid_action_raises():
    spec = chain_env(2, horizon=2)
    probs = np.zeros((2, 2, 3))
    probs[0, 1, RIGHT] = 1.0
    support = np.zeros((2, 2), dtype=bool)
    support[0, 1] = True
    behavior = EmpiricalBehavior(probs, support)
    table = soft_value_iteration(spec, behavior, 1.0)
    with pytest.raises(SupportError):
        optimal_kl_policy(spec, table, behavior)


def test_optimal_policy_shapes(chain5):
    behavior = goal_persistent_behavior(chain5)
    timed = optimal_kl_policy(
        chain5, soft_value_iteration(chain5, behavior, 1.0, horizon=4), behavior
    )
    assert timed.probs.shape == (4, 5, 5, 3)
    stationary = optimal_kl_policy(
        chain5, soft_value_iteration(chain5, behavior, 1.0, gamma=0.9), behavior
    )
    assert stationary.probs.shape == (5, 5, 3)
    # Toward goal 4 the optimal policy favours moving right everywhere
    assert np.all(np.argmax(stationary.probs[:4, 4], axis=1) == RIGHT)
    np.testing.assert_array_equal(stationary.probs[4, 4], [0.0, 0.0, 1.0])


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_proposition_bound_and_tightening(chain5, alpha):
    behavior = goal_persistent_behavior(chain5)
    results = list(check_proposition(chain5, behavior, [alpha], [0.5, 0.9, 0.99]))
    bounds = [r for r in results if r.check_id == "proposition.bound"]
    assert [r.status for r in bounds] == ["pass"] * 3
    monotone = [r for r in results if r.check_id == "proposition.monotone"]
    assert len(monotone) == 1 and monotone[0].status == "pass"
    relative = monotone[0].params["relative_gaps"]
    assert 1.0 > relative[0] > relative[1] > relative[2] >= 0.0
    # The raw gap vanishes at both ends of the discount range
    assert monotone[0].params["mean_gaps"][2] > 0.0


def test_behavior_value_is_mean_return(chain5):
    behavior = goal_persistent_behavior(chain5)
    plain = behavior_value(chain5, behavior, 0.9)
    assert plain[4, 4] == 0.0
    assert plain[3, 4] < -1.0
    for alpha in [0.5, 1.0]:
        soft = soft_value_iteration(chain5, behavior, alpha, gamma=0.9).V[0]
        assert plain[0, 4] <= empirical_soft_value(
            chain5, behavior, 0, 4, alpha, 0.9
        ) <= soft[0, 4]


def test_truncation_horizon():
    assert truncation_horizon(0.5) == math.ceil(math.log(0.5e-10) / math.log(0.5))
    assert truncation_horizon(0.9) == 241
    with pytest.raises(InputDomainError):
        truncation_horizon(1.0)


def test_distance_soft_value_two_point():
    distribution = CategoricalDistance(
        probs=np.array([0.5, 0.0, 0.5]), support=np.array([True, False, True])
    )
    value = distance_soft_value(distribution, 1.0, 0.9)
    assert value == pytest.approx(math.log(0.5 + 0.5 * math.exp(-1.9)), abs=1e-12)
    assert value == pytest.approx(-0.5538, abs=1e-4)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("gamma", [0.9, 1.0])
def test_change_of_variables(chain5, alpha, gamma):
    behavior = goal_persistent_behavior(chain5)
    steps = chain5.horizon if gamma == 1.0 else truncation_horizon(gamma)
    capped = steps if gamma == 1.0 else None
    for s, g in np.argwhere(behavior.support):
        distribution = first_hit_distribution(chain5, behavior, s, g, steps)
        via_distance = distance_soft_value(distribution, alpha, gamma, capped)
        enumerated = empirical_soft_value(chain5, behavior, s, g, alpha, gamma, steps)
        assert abs(via_distance - enumerated) <= 1e-12


def test_first_hit_distribution():
    spec = chain_env(2)
    distribution = first_hit_distribution(
        spec, goal_persistent_behavior(spec), 0, 1, 3
    )
    np.testing.assert_allclose(distribution.probs, [1 / 3, 2 / 9, 4 / 27, 8 / 27])
    assert distribution.probs.sum() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "spec,horizon",
    [(chain_env(5), 10), (grid_env(5, 5), 6)],
    ids=["chain-5", "grid-5x5"],
)
def test_optimal_policy_recovery(spec, horizon):
    results = list(
        check_extraction(spec, goal_persistent_behavior(spec), [0.5, 1.0], horizon)
    )
    assert [r.status for r in results] == ["pass", "pass"]
    assert all(r.residual <= 1e-6 for r in results)


def test_enumeration_limit():
    spec = grid_env(3, 3, horizon=12)
    with pytest.raises(EnumerationLimitError):
        return_atoms(spec, uniform_behavior(spec), 0, 8, 0.9, 12, max_atoms=10)
    empty = EmpiricalBehavior(np.zeros((9, 9, 5)), np.zeros((9, 9), dtype=bool))
    with pytest.raises(InputDomainError):
        empirical_soft_value(spec, empty, 0, 8, 1.0)


def test_estimate_behavior(stay_dataset):
    behavior = estimate_behavior(stay_dataset)
    np.testing.assert_array_equal(behavior.row(0, 1), [0.0, 1.0, 0.0])
    np.testing.assert_array_equal(behavior.row(1, 1), [0.0, 0.0, 1.0])
    assert behavior.row(2, 1) is None
    assert behavior.row(0, 0) is None

    pooled = estimate_behavior(stay_dataset, goal_conditioned=False)
    np.testing.assert_array_equal(pooled.row(0, 2), [0.0, 1.0, 0.0])
    assert pooled.support[:2].all() and not pooled.support[2].any()


def test_estimate_behavior_mixes_actions():
    spec = chain_env(3, horizon=2)
    dataset = make_dataset(
        spec, [((0, 1, 2), (RIGHT, RIGHT)), ((0, 0, 1), (STAY, RIGHT))]
    )
    behavior = estimate_behavior(dataset)
    np.testing.assert_allclose(behavior.row(0, 1).sum(), 1.0)
    assert behavior.row(0, 1)[RIGHT] > 0 and behavior.row(0, 1)[STAY] > 0


def test_verify_suite_with_goal_persistent_dataset(expert_chain_dataset, chain5):
    report = verify_suite(
        chain5,
        dataset=expert_chain_dataset,
        alphas=[1.0],
        gammas=[0.9],
        suites=["corollary", "tabular", "softmin"],
    )
    assert report.passed
    assert {r.status for r in report.results} == {"pass"}
    ids = [r.check_id for r in report.results]
    assert ids == ["corollary", "corollary", "tabular", "softmin"]
    tabular = next(r for r in report.results if r.check_id == "tabular")
    assert tabular.residual <= 1e-12


def test_verify_suite_skips_corollary_for_leaky_dataset(random_chain_dataset, chain5):
    report = verify_suite(
        chain5, dataset=random_chain_dataset, alphas=[1.0], suites=["corollary"]
    )
    (result,) = report.results
    assert result.status == "skipped"
    assert result.reason
    assert report.passed


def test_verify_suite_without_dataset(chain5, tmp_path):
    report = verify_suite(
        chain5, alphas=[1.0], gammas=[0.9], suites=["fixed_point", "tabular"]
    )
    statuses = [(r.check_id, r.status) for r in report.results]
    assert statuses == [
        ("fixed_point", "pass"),
        ("fixed_point", "pass"),
        ("tabular", "skipped"),
    ]
    records = read_lines(write_report(tmp_path / "verify.jsonl", report))
    assert records[0]["kind"] == "verification" and records[0]["passed"]
    assert [r["check_id"] for r in records[1:]] == [r.check_id for r in report.results]
    assert records[-1]["residual"] is None


def test_verify_suite_rejects_large_or_unknown(chain5):
    with pytest.raises(InputDomainError):
        verify_suite(grid_env(15, 15), suites=["fixed_point"])
    with pytest.raises(InputDomainError):
        verify_suite(chain5, suites=["bellman"])
