import numpy as np
import pytest

from adcrl.envs.base import make_env
from adcrl.harness.evaluation import evaluate
from adcrl.services.agent import Ctd3Agent
from adcrl.services.checkpoint import check_compatible, config_hash, load_agent, save_agent
from adcrl.utils.errors import CheckpointError, DimensionError


@pytest.fixture
def saved(tmp_path, tiny_agent_config):
    env = make_env("pendulum")
    agent = Ctd3Agent(env.spec, tiny_agent_config, seed=3)
    agent.t = 1234
    for net in agent.networks().values():
        for p in net.parameters():
            p += 0.01
    path = save_agent(agent, tmp_path / "agent.txt", "pendulum")
    return agent, path


def test_round_trip_restores_every_network(saved):
    agent, path = saved
    loaded, env_id = load_agent(path)
    assert env_id == "pendulum"
    assert loaded.t == 1234
    assert loaded.config.model_dump() == agent.config.model_dump()
    original = agent.networks()
    for name, net in loaded.networks().items():
        assert net.architecture == original[name].architecture
        assert all(np.array_equal(a, b) for a, b in zip(net.parameters(), original[name].parameters()))


def test_round_trip_reproduces_evaluation(saved):
    agent, path = saved
    loaded, _ = load_agent(path)
    env = make_env("pendulum")
    assert evaluate(loaded, env, episodes=2, seed=5) == evaluate(agent, env, episodes=2, seed=5)


def test_header_line(saved):
    agent, path = saved
    head = path.read_text().splitlines()[0].split()
    assert head == ["CTD3", "v1", config_hash(agent.config), "1234", "9"]


def test_config_hash_depends_on_values(tiny_agent_config):
    other = tiny_agent_config.model_copy(update={"tau": 0.01})
    assert config_hash(tiny_agent_config) == config_hash(tiny_agent_config.model_copy())
    assert config_hash(other) != config_hash(tiny_agent_config)


def test_tampered_config_is_rejected(saved):
    _, path = saved
    text = path.read_text().replace('"tau":0.005', '"tau":0.5')
    path.write_text(text)
    with pytest.raises(CheckpointError, match="hash mismatch"):
        load_agent(path)


def test_truncated_checkpoint_is_rejected(saved):
    _, path = saved
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:8]) + "\n")
    with pytest.raises(CheckpointError):
        load_agent(path)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(CheckpointError, match="cannot read"):
        load_agent(tmp_path / "nope.txt")


def test_not_a_checkpoint(tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("hello\nworld\n1\n2\n3\n")
    with pytest.raises(CheckpointError, match="not a CTD3"):
        load_agent(path)


def test_dims_mismatch_names_expected_and_found(saved):
    _, path = saved
    loaded, _ = load_agent(path)
    with pytest.raises(DimensionError, match="expected obs_dim=4 action_dim=2, found obs_dim=3 action_dim=1"):
        check_compatible(loaded, make_env("pointmass").spec)


def test_flags_off_checkpoint_has_fewer_networks(tmp_path, tiny_agent_config):
    env = make_env("pointmass")
    cfg = tiny_agent_config.model_copy(update={"adcf_enabled": False, "idem_enabled": False})
    path = save_agent(Ctd3Agent(env.spec, cfg), tmp_path / "td3.txt", "pointmass")
    loaded, env_id = load_agent(path)
    assert env_id == "pointmass"
    assert loaded.director is None
    assert set(loaded.networks()) == {"actor", "actor_target", "critic1", "critic1_target1",
                                      "critic2", "critic2_target1"}


def _replace_line(path, index, text):
    lines = path.read_text().splitlines()
    lines[index] = text
    path.write_text("\n".join(lines) + "\n")


@pytest.mark.parametrize("bad_line, message", [
    ("LOW abc", "bad action bounds"),
    ("LOW nan", "bad action bounds"),
    ("LOW 2.0", "action_low must be < action_high"),
])
def test_corrupt_action_bounds_are_rejected(saved, bad_line, message):
    _, path = saved
    assert path.read_text().splitlines()[3].startswith("LOW ")
    _replace_line(path, 3, bad_line)
    with pytest.raises(CheckpointError, match=message):
        load_agent(path)
