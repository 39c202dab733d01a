import math

import numpy as np
import pytest

from dwsl.services.datagen import make_dataset
from dwsl.services.evaluation import (
    CURVE_COLUMNS,
    EvalReport,
    aggregate_reports,
    emit_curves,
    evaluate,
    read_curves,
    rollout,
    sample_eval_goal,
)
from dwsl.services.policy import TabularPolicy, TrainConfig, train_gcsl
from dwsl.utils.errors import DatasetFormatError, InputDomainError

LEFT, RIGHT, STAY = 0, 1, 2


def _constant_policy(spec, action):
    probs = np.zeros((spec.num_states, spec.goal_count, spec.num_actions))
    probs[:, :, action] = 1.0
    support = np.ones((spec.num_states, spec.goal_count), dtype=bool)
    return TabularPolicy(spec, probs, support)


def _report(success_rate, steps, first_hit, fallbacks=0):
    return EvalReport(
        episodes=10,
        success_rate=success_rate,
        mean_steps_at_goal=steps,
        mean_first_hit=first_hit,
        fallback_count=fallbacks,
    )


def test_rollout_metrics(chain5):
    policy = _constant_policy(chain5, RIGHT)
    rng = np.random.default_rng(0)
    trajectory, result = rollout(chain5, policy, 0, 3, 6, "greedy", rng)
    assert trajectory.states == (0, 1, 2, 3, 4, 4, 4)
    assert result.first_hit == 3 and result.success
    assert result.steps_at_goal == 1
    _, staying = rollout(chain5, _constant_policy(chain5, STAY), 2, 2, 4, "greedy", rng)
    assert staying.first_hit == 0
    assert staying.steps_at_goal == 4


def test_goal_reached_on_last_step_counts_as_success(chain5):
    rng = np.random.default_rng(0)
    _, result = rollout(chain5, _constant_policy(chain5, RIGHT), 0, 4, 4, "greedy", rng)
    assert result.success and result.first_hit == 4
    assert result.steps_at_goal == 0


def test_report_invariants(random_chain_dataset, chain5):
    policy = train_gcsl(random_chain_dataset, TrainConfig())
    report = evaluate(chain5, policy, 40, seed=2, mode="sample")
    assert 0.0 <= report.success_rate <= 1.0
    assert 0.0 <= report.mean_steps_at_goal <= chain5.horizon
    assert report.episodes == 40
    if report.success_rate > 0:
        assert 0.0 <= report.mean_first_hit <= chain5.horizon


def test_evaluation_is_a_pure_function(random_chain_dataset, chain5):
    policy = train_gcsl(random_chain_dataset, TrainConfig())
    first = evaluate(chain5, policy, 25, seed=5, mode="sample")
    second = evaluate(chain5, policy, 25, seed=5, mode="sample")
    assert first.to_record() == second.to_record()


def test_never_reaching_goal_reports_nan(chain5):
    report = evaluate(chain5, _constant_policy(chain5, LEFT), 5, tasks=[(0, 4)])
    assert report.success_rate == 0.0
    assert math.isnan(report.mean_first_hit)
    assert report.to_record()["mean_first_hit"] is None


def test_unsupported_rows_count_fallbacks(chain5):
    policy = _constant_policy(chain5, RIGHT)
    support = np.ones((5, 5), dtype=bool)
    support[:, 4] = False
    policy = TabularPolicy(chain5, policy.probs, support)
    report = evaluate(chain5, policy, 2, tasks=[(0, 4)], horizon=3)
    assert report.fallback_count == 6


def test_goal_strategies(chain5):
    rng = np.random.default_rng(0)
    start, goal = sample_eval_goal(chain5, "all_reachable", rng)
    assert start in chain5.start_states and 0 <= goal < chain5.goal_count
    dataset = make_dataset(chain5, [((2, 2), (STAY,))])
    for _ in range(10):
        _, goal = sample_eval_goal(chain5, "dataset_states", rng, dataset)
        assert goal == 2
    with pytest.raises(InputDomainError):
        sample_eval_goal(chain5, "dataset_states", rng)
    with pytest.raises(InputDomainError):
        sample_eval_goal(chain5, "hardest", rng)
    with pytest.raises(InputDomainError):
        evaluate(chain5, _constant_policy(chain5, STAY), 0)


def test_curves_round_trip(tmp_path):
    history = [
        (0, _report(0.25, 1.5, 3.0)),
        (2000, _report(1.0 / 3.0, 2.0, float("nan"), 4)),
    ]
    path = emit_curves(history, tmp_path / "curves.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CURVE_COLUMNS)
    frame = read_curves(path)
    assert frame["step"].tolist() == [0, 2000]
    assert frame["success_rate"].iloc[1] == 1.0 / 3.0
    assert math.isnan(frame["mean_first_hit"].iloc[1])


def test_curves_reader_reports_lines(tmp_path):
    bad_header = tmp_path / "header.csv"
    bad_header.write_text("step,success\n0,1.0\n")
    with pytest.raises(DatasetFormatError) as excinfo:
        read_curves(bad_header)
    assert excinfo.value.line == 1

    bad_value = tmp_path / "value.csv"
    bad_value.write_text(
        "step,success_rate,mean_steps_at_goal,mean_first_hit,fallback_count\n"
        "0,0.5,1.0,2.0,0\n"
        "10,high,1.0,2.0,0\n"
    )
    with pytest.raises(DatasetFormatError) as excinfo:
        read_curves(bad_value)
    assert excinfo.value.line == 3


def test_aggregate_reports():
    summary = aggregate_reports([_report(0.5, 2.0, 4.0), _report(0.7, 4.0, 6.0, 2)])
    assert summary["success_rate"]["mean"] == pytest.approx(0.6)
    assert summary["success_rate"]["std"] == pytest.approx(0.1)
    assert summary["mean_steps_at_goal"] == {"mean": 3.0, "std": 1.0}
    assert summary["fallback_count"]["mean"] == 1.0
