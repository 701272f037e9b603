"""
Torque-limited pendulum swing-up.

State (theta, theta_dot), theta = 0 upright. Semi-implicit Euler:
    theta_dot' = clip(theta_dot + (3g/(2l) sin(theta) + 3/(m l^2) u) dt, -8, 8)
    theta'     = theta + theta_dot' dt
Reward -(wrap(theta)^2 + 0.1 theta_dot^2 + 0.001 u^2) on the pre-step state.
"""
from typing import Tuple

import numpy as np

from adcrl.envs.base import Env, EnvSpec

GRAVITY = 10.0
MASS = 1.0
LENGTH = 1.0
DT = 0.05
MAX_SPEED = 8.0
MAX_TORQUE = 2.0
EPISODE_STEPS = 200


def wrap_angle(theta: float) -> float:
    """Map an angle to [-pi, pi)."""
    return ((theta + np.pi) % (2.0 * np.pi)) - np.pi


def pendulum_dynamics(theta: float, theta_dot: float, torque: float, dt: float = DT) -> Tuple[float, float]:
    theta_dot = theta_dot + (3.0 * GRAVITY / (2.0 * LENGTH) * np.sin(theta)
                             + 3.0 / (MASS * LENGTH ** 2) * torque) * dt
    theta_dot = float(np.clip(theta_dot, -MAX_SPEED, MAX_SPEED))
    return float(theta + theta_dot * dt), theta_dot


def pendulum_energy(theta: float, theta_dot: float) -> float:
    """Conserved quantity of the torque-free, unclipped dynamics (per unit inertia)."""
    return 0.5 * theta_dot ** 2 + 3.0 * GRAVITY / (2.0 * LENGTH) * np.cos(theta)


def pendulum_reward(theta: float, theta_dot: float, torque: float) -> float:
    return -(wrap_angle(theta) ** 2 + 0.1 * theta_dot ** 2 + 0.001 * torque ** 2)


class Pendulum(Env):
    env_id = "pendulum"
    spec = EnvSpec(
        obs_dim=3,
        action_dim=1,
        action_low=(-MAX_TORQUE,),
        action_high=(MAX_TORQUE,),
        max_episode_steps=EPISODE_STEPS,
    )

    def __init__(self):
        super().__init__()
        self.theta = 0.0
        self.theta_dot = 0.0

    def reset(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        self.theta = float(rng.uniform(-np.pi, np.pi))
        self.theta_dot = float(rng.uniform(-1.0, 1.0))
        self.steps = 0
        return self.observation()

    def set_state(self, theta: float, theta_dot: float) -> np.ndarray:
        self.theta = float(theta)
        self.theta_dot = float(theta_dot)
        return self.observation()

    def observation(self) -> np.ndarray:
        return np.array([np.cos(self.theta), np.sin(self.theta), self.theta_dot])

    def _transition(self, action: np.ndarray):
        u = float(action[0])
        reward = pendulum_reward(self.theta, self.theta_dot, u)
        self.theta, self.theta_dot = pendulum_dynamics(self.theta, self.theta_dot, u)
        return self.observation(), reward, False
