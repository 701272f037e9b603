"""
Deterministic policy evaluation and critic overestimation measurement.
Neither function changes the agent, its rng or any buffer.
"""
import numpy as np

from adcrl.envs.base import Env
from adcrl.models.metrics import ValueBias
from adcrl.services.agent import Ctd3Agent


def evaluate(agent: Ctd3Agent, env: Env, episodes: int, seed: int) -> float:
    """Mean undiscounted return of mu_theta over `episodes` episodes seeded seed, seed+1, ..."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    returns = []
    for ep in range(episodes):
        obs = env.reset(seed=seed + ep)
        total = 0.0
        while True:
            result = env.step(agent.select_action(obs, explore=False))
            total += result.reward
            obs = result.observation
            if result.done:
                break
        returns.append(total)
    return float(np.mean(returns))


def estimate_value_bias(agent: Ctd3Agent, env: Env, episodes: int, seed: int) -> ValueBias:
    """Critic 1's estimate at each start state against the discounted return actually collected."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    gamma = agent.config.gamma_q
    estimates, mc_returns = [], []
    for ep in range(episodes):
        obs = env.reset(seed=seed + ep)
        start_action = agent.select_action(obs, explore=False)
        estimates.append(float(agent.q_values(0, obs[None, :], start_action[None, :])[0]))
        discounted, weight = 0.0, 1.0
        action = start_action
        while True:
            result = env.step(action)
            discounted += weight * result.reward
            weight *= gamma
            if result.done:
                break
            obs = result.observation
            action = agent.select_action(obs, explore=False)
        mc_returns.append(discounted)
    q_mean = float(np.mean(estimates))
    mc_mean = float(np.mean(mc_returns))
    return ValueBias(q_estimate=q_mean, mc_return=mc_mean, bias=q_mean - mc_mean)
