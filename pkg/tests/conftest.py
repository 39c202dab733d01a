"""
Shared fixtures for the test suite.
"""

import pytest

from dwsl.services.datagen import collect_dataset, make_behavior_policy, make_dataset
from dwsl.services.mdp import chain_env, grid_env, make_env
from dwsl.utils.logging import setup_logger

setup_logger("dwsl-tests", level="WARNING")


@pytest.fixture
def chain5():
    return chain_env(5)


@pytest.fixture
def grid3():
    return grid_env(3, 3, horizon=4)


@pytest.fixture
def four_rooms():
    return make_env("four-rooms")


@pytest.fixture
def expert_chain_dataset(chain5):
    """Greedy expert trajectories on chain-5 (goal-persistent)."""
    expert = make_behavior_policy(chain5, "noisy_expert", seed=3, epsilon=0.0)
    return collect_dataset(chain5, expert, 20, seed=3)


@pytest.fixture
def random_chain_dataset(chain5):
    return collect_dataset(chain5, make_behavior_policy(chain5, "random"), 30, seed=11)


@pytest.fixture
def stay_dataset():
    """One trajectory s0 -> s1 -> s1 on a 3-state chain."""
    spec = chain_env(3, horizon=2)
    return make_dataset(spec, [((0, 1, 1), (1, 2))])
