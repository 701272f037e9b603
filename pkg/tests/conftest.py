import numpy as np
import pytest

from adcrl.envs.base import EnvSpec
from adcrl.models import AgentConfig, RunConfig
from adcrl.replay.buffers import Transition


@pytest.fixture
def tiny_agent_config():
    """Small networks and a short warmup so learning starts within a few hundred steps."""
    return AgentConfig(
        actor_hidden=[16, 16],
        critic_hidden=[16, 16],
        director_hidden=[16, 16],
        batch_size=16,
        warmup_steps=50,
        director_half_life=200.0,
        main_capacity=10_000,
        high_capacity=5_000,
        low_capacity=5_000,
    )


@pytest.fixture
def tiny_run_config(tmp_path, tiny_agent_config):
    return RunConfig(
        env_id="pointmass",
        seed=0,
        total_steps=400,
        eval_interval=100,
        eval_episodes=2,
        smoothing_window=3,
        output_dir=tmp_path / "run",
        progress=False,
        agent=tiny_agent_config,
    )


@pytest.fixture
def unit_spec():
    return EnvSpec(obs_dim=3, action_dim=2, action_low=(-1.0, -2.0), action_high=(1.0, 2.0),
                   max_episode_steps=50)


@pytest.fixture
def make_transition():
    def _make(rng, obs_dim, action_dim, reward=None, terminal=False, truncated=False):
        return Transition(
            state=rng.normal(size=obs_dim),
            action=rng.uniform(-1.0, 1.0, size=action_dim),
            reward=float(rng.normal()) if reward is None else float(reward),
            next_state=rng.normal(size=obs_dim),
            truncated=truncated,
            terminal=terminal,
        )

    return _make


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
