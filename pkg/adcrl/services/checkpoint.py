"""
Agent checkpoints: a header, the config, the action bounds, then every
member network in the plain-text network format.

    CTD3 v1 <config_hash> <step> <num_networks>
    CONFIG <json>
    ENV <env_id>
    LOW <floats>
    HIGH <floats>
    NET <name>
    MLP v1 ...
    <parameters>
    ...
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from pydantic import ValidationError

from adcrl.envs.base import EnvSpec, make_env
from adcrl.models.agent_config import AgentConfig
from adcrl.nn.checkpoint import dump_mlp, format_floats, parse_mlp
from adcrl.services.agent import Ctd3Agent
from adcrl.utils.errors import CheckpointError, DimensionError

logger = logging.getLogger(__name__)

MAGIC = ("CTD3", "v1")


def config_hash(config: AgentConfig) -> str:
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def save_agent(agent: Ctd3Agent, path: Union[str, Path], env_id: str) -> Path:
    nets = agent.networks()
    config_json = json.dumps(agent.config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    parts = [
        " ".join([*MAGIC, config_hash(agent.config), str(agent.t), str(len(nets))]),
        f"CONFIG {config_json}",
        f"ENV {env_id}",
        f"LOW {format_floats(agent.low)}",
        f"HIGH {format_floats(agent.high)}",
    ]
    for name, net in nets.items():
        parts.append(f"NET {name}")
        parts.append(dump_mlp(net).rstrip("\n"))
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text("\n".join(parts) + "\n", encoding="utf-8")
    logger.info("[OK] Saved checkpoint %s (step %d)", p, agent.t)
    return p


def _field(line: str, tag: str) -> str:
    if not line.startswith(tag + " "):
        raise CheckpointError(f"expected a {tag} line, found {line[:40]!r}")
    return line[len(tag) + 1:]


def load_agent(path: Union[str, Path]) -> Tuple[Ctd3Agent, str]:
    """Rebuild an agent (fresh optimiser state) and return it with its environment id."""
    p = Path(path)
    try:
        lines = p.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {p}: {e}")
    if len(lines) < 5:
        raise CheckpointError(f"{p}: truncated checkpoint")

    head = lines[0].split()
    if tuple(head[:2]) != MAGIC or len(head) != 5:
        raise CheckpointError(f"{p}: not a CTD3 v1 checkpoint")
    stored_hash = head[2]
    try:
        step, num_nets = int(head[3]), int(head[4])
    except ValueError:
        raise CheckpointError(f"{p}: malformed header {lines[0]!r}")

    try:
        config = AgentConfig.model_validate(json.loads(_field(lines[1], "CONFIG")))
    except (json.JSONDecodeError, ValidationError) as e:
        raise CheckpointError(f"{p}: bad CONFIG line: {e}")
    if config_hash(config) != stored_hash:
        raise CheckpointError(f"{p}: config hash mismatch ({stored_hash} stored, {config_hash(config)} computed)")

    env_id = _field(lines[2], "ENV").strip()
    try:
        episode_steps = make_env(env_id).spec.max_episode_steps
    except ValueError as e:
        raise CheckpointError(f"{p}: {e}")
    try:
        low = tuple(float(v) for v in _field(lines[3], "LOW").split())
        high = tuple(float(v) for v in _field(lines[4], "HIGH").split())
        if not np.all(np.isfinite(low + high)):
            raise ValueError(f"non-finite bound in {low} / {high}")
    except ValueError as e:
        raise CheckpointError(f"{p}: bad action bounds: {e}")

    nets = {}
    i = 5
    for _ in range(num_nets):
        if i >= len(lines):
            raise CheckpointError(f"{p}: expected {num_nets} networks, file ends after {len(nets)}")
        name = _field(lines[i], "NET").strip()
        net, used = parse_mlp(lines[i + 1:])
        nets[name] = net
        i += 1 + used

    actor = nets.get("actor")
    if actor is None:
        raise CheckpointError(f"{p}: no actor network")
    try:
        spec = EnvSpec(
            obs_dim=actor.input_dim,
            action_dim=actor.output_dim,
            action_low=low,
            action_high=high,
            max_episode_steps=episode_steps,
        )
    except ValueError as e:
        raise CheckpointError(f"{p}: {e}")
    agent = Ctd3Agent(spec, config)
    expected = agent.networks()
    if set(expected) != set(nets):
        raise CheckpointError(f"{p}: network set {sorted(nets)} does not match config {sorted(expected)}")
    for name, target in expected.items():
        if target.architecture != nets[name].architecture:
            raise CheckpointError(
                f"{p}: {name} architecture {nets[name].architecture}, config expects {target.architecture}")
        target.load_parameters(nets[name].parameters())
    agent.t = step
    return agent, env_id


def check_compatible(agent: Ctd3Agent, spec: EnvSpec) -> None:
    """Raise DimensionError unless the agent's networks fit the environment."""
    found = (agent.actor.input_dim, agent.actor.output_dim)
    expected = (spec.obs_dim, spec.action_dim)
    if found != expected:
        raise DimensionError(
            f"checkpoint dims incompatible: expected obs_dim={expected[0]} action_dim={expected[1]}, "
            f"found obs_dim={found[0]} action_dim={found[1]}")
    if not (np.allclose(agent.low, spec.low) and np.allclose(agent.high, spec.high)):
        raise DimensionError(
            f"checkpoint action bounds [{agent.low}, {agent.high}] differ from environment [{spec.low}, {spec.high}]")
