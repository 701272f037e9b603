"""
Finite-difference checks of the three analytic gradient paths:
critic mean-squared error, director objective V and actor objective J.

Central differences are wrong at a relu kink, so inputs that put any relu
unit within KINK_MARGIN of zero are redrawn before comparing.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from adcrl.envs.base import EnvSpec
from adcrl.models.agent_config import AgentConfig
from adcrl.nn.mlp import finite_diff_grad, max_relative_error, relu_margin
from adcrl.replay.buffers import TransitionBatch
from adcrl.services.agent import Ctd3Agent

logger = logging.getLogger(__name__)

TOLERANCE = 1e-4
KINK_MARGIN = 1e-3
MAX_REDRAWS = 50


@dataclass
class GradCheckResult:
    path: str
    instances: int
    max_rel_error: float

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= TOLERANCE


def random_instance(rng: np.random.Generator, seed: int) -> Ctd3Agent:
    """Small CTD3 agent with random dims, bounds and widths."""
    obs_dim = int(rng.integers(1, 4))
    action_dim = int(rng.integers(1, 3))
    low = rng.uniform(-2.0, -0.5, size=action_dim)
    high = rng.uniform(0.5, 2.0, size=action_dim)
    spec = EnvSpec(obs_dim, action_dim, tuple(low), tuple(high), max_episode_steps=10)
    widths = [int(w) for w in rng.integers(3, 7, size=2)]
    config = AgentConfig(actor_hidden=widths, critic_hidden=widths, director_hidden=widths)
    return Ctd3Agent(spec, config, seed=seed)


def random_batch(agent: Ctd3Agent, rng: np.random.Generator, n: int) -> TransitionBatch:
    return TransitionBatch(
        states=rng.normal(size=(n, agent.obs_dim)),
        actions=rng.uniform(agent.low, agent.high, size=(n, agent.action_dim)),
        rewards=rng.normal(size=n),
        next_states=rng.normal(size=(n, agent.obs_dim)),
        terminals=np.zeros(n, dtype=bool),
        truncated=np.zeros(n, dtype=bool),
    )


def _draw_clear_of_kinks(draw: Callable[[], tuple], margin: Callable[[tuple], float]) -> tuple:
    sample = draw()
    for _ in range(MAX_REDRAWS):
        if margin(sample) >= KINK_MARGIN:
            break
        sample = draw()
    return sample


def _joint(b: TransitionBatch) -> np.ndarray:
    return np.concatenate([b.states, b.actions], axis=-1)


def check_critic_gradients(instances: int = 100, seed: int = 0, batch: int = 4) -> GradCheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(instances):
        agent = random_instance(rng, seed=k)
        i = k % 2
        (b,) = _draw_clear_of_kinks(
            lambda: (random_batch(agent, rng, batch),),
            lambda s: relu_margin(agent.critics[i], _joint(s[0])),
        )
        y = rng.normal(size=batch)
        _, analytic = agent.critic_loss_and_grads(i, b.states, b.actions, y)
        numeric = finite_diff_grad(agent.critics[i], _joint(b), lambda out: np.mean((out[:, 0] - y) ** 2))
        worst = max(worst, max_relative_error(analytic, numeric))
    return GradCheckResult("critic_mse", instances, worst)


def check_director_gradients(instances: int = 100, seed: int = 0, batch: int = 4) -> GradCheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(instances):
        agent = random_instance(rng, seed=k)
        high, low = _draw_clear_of_kinks(
            lambda: (random_batch(agent, rng, batch), random_batch(agent, rng, batch)),
            lambda s: relu_margin(agent.director, np.concatenate([_joint(s[0]), _joint(s[1])])),
        )
        _, analytic = agent.director_objective_and_grads(high, low)
        x = np.concatenate([_joint(high), _joint(low)])
        numeric = finite_diff_grad(
            agent.director, x, lambda out: np.mean(out[:batch, 0]) + np.mean(1.0 - out[batch:, 0]))
        worst = max(worst, max_relative_error(analytic, numeric))
    return GradCheckResult("director_v", instances, worst)


def check_actor_gradients(instances: int = 100, seed: int = 0, batch: int = 4) -> GradCheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(instances):
        agent = random_instance(rng, seed=k)

        def margin(s: tuple) -> float:
            states = s[0]
            x = np.concatenate([states, agent.policy(states)], axis=-1)
            return min(relu_margin(agent.actor, states),
                       relu_margin(agent.critics[0], x),
                       relu_margin(agent.director, x))

        (states,) = _draw_clear_of_kinks(lambda: (rng.normal(size=(batch, agent.obs_dim)),), margin)
        gamma_d = float(rng.uniform(0.1, 1.0))
        _, analytic = agent.actor_objective_and_grads(states, gamma_d)

        def objective(out: np.ndarray) -> float:
            actions = agent.action_center + agent.action_scale * out
            x = np.concatenate([states, actions], axis=-1)
            q = agent.critics[0].forward(x)[:, 0]
            d = agent.director.forward(x)[:, 0]
            return gamma_d * np.mean(d) + np.mean(q)

        numeric = finite_diff_grad(agent.actor, states, objective)
        worst = max(worst, max_relative_error(analytic, numeric))
    return GradCheckResult("actor_j", instances, worst)


def run_all(instances: int = 100, seed: int = 0) -> List[GradCheckResult]:
    results = [
        check_critic_gradients(instances, seed),
        check_director_gradients(instances, seed),
        check_actor_gradients(instances, seed),
    ]
    for r in results:
        logger.info("%-12s instances=%d max_rel_error=%.3e %s",
                    r.path, r.instances, r.max_rel_error, "[OK]" if r.passed else "[FAIL]")
    return results


if __name__ == "__main__":
    from adcrl.utils.logger import setup_logger

    setup_logger()
    run_all()
