"""
Planar point mass (double integrator) steered to the origin.

Observation (x, y, vx, vy); action is an acceleration in [-1, 1]^2.
Reward -||p|| - 0.01 ||a||^2 on the pre-step position.
"""
import numpy as np

from adcrl.envs.base import Env, EnvSpec

DT = 0.05
EPISODE_STEPS = 200
GOAL = np.zeros(2)


class PointMass(Env):
    env_id = "pointmass"
    spec = EnvSpec(
        obs_dim=4,
        action_dim=2,
        action_low=(-1.0, -1.0),
        action_high=(1.0, 1.0),
        max_episode_steps=EPISODE_STEPS,
    )

    def __init__(self):
        super().__init__()
        self.position = np.zeros(2)
        self.velocity = np.zeros(2)

    def reset(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        self.position = rng.uniform(-1.0, 1.0, size=2)
        self.velocity = np.zeros(2)
        self.steps = 0
        return self.observation()

    def observation(self) -> np.ndarray:
        return np.concatenate([self.position, self.velocity])

    def _transition(self, action: np.ndarray):
        reward = -float(np.linalg.norm(self.position - GOAL)) - 0.01 * float(action @ action)
        self.velocity = self.velocity + action * DT
        self.position = self.position + self.velocity * DT
        return self.observation(), reward, False
