"""
Environment contract shared by the built-in tasks.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from tqdm import tqdm

from adcrl.utils.errors import DimensionError

ENV_IDS = ("pendulum", "pointmass")


@dataclass(frozen=True)
class EnvSpec:
    obs_dim: int
    action_dim: int
    action_low: Tuple[float, ...]
    action_high: Tuple[float, ...]
    max_episode_steps: int

    def __post_init__(self):
        if self.obs_dim < 1 or self.action_dim < 1:
            raise ValueError("obs_dim and action_dim must be >= 1")
        if len(self.action_low) != self.action_dim or len(self.action_high) != self.action_dim:
            raise DimensionError("action bounds must have action_dim entries")
        if any(lo >= hi for lo, hi in zip(self.action_low, self.action_high)):
            raise ValueError("action_low must be < action_high in every dimension")
        if self.max_episode_steps < 1:
            raise ValueError("max_episode_steps must be >= 1")

    @property
    def low(self) -> np.ndarray:
        return np.asarray(self.action_low, dtype=np.float64)

    @property
    def high(self) -> np.ndarray:
        return np.asarray(self.action_high, dtype=np.float64)


@dataclass(frozen=True)
class StepResult:
    """Outcome of one step. done = terminal or truncated (time limit)."""

    observation: np.ndarray
    reward: float
    done: bool
    terminal: bool = False
    truncated: bool = False


class Env(ABC):
    """Seeded, single-owner continuous-control task."""

    env_id: str = ""
    spec: EnvSpec

    def __init__(self):
        self.steps = 0

    @abstractmethod
    def reset(self, seed: int) -> np.ndarray:
        """Re-initialise state deterministically from seed and zero the step counter."""

    @abstractmethod
    def _transition(self, action: np.ndarray) -> Tuple[np.ndarray, float, bool]:
        """Advance internal state; returns (observation, reward, terminal)."""

    def step(self, action) -> StepResult:
        a = np.asarray(action, dtype=np.float64).reshape(-1)
        if a.shape != (self.spec.action_dim,):
            raise DimensionError(
                f"{self.env_id}: action dimension mismatch, expected {self.spec.action_dim}, got {np.shape(action)}")
        a = np.clip(a, self.spec.low, self.spec.high)
        obs, reward, terminal = self._transition(a)
        self.steps += 1
        truncated = self.steps >= self.spec.max_episode_steps and not terminal
        return StepResult(
            observation=obs,
            reward=float(reward),
            done=bool(terminal or truncated),
            terminal=bool(terminal),
            truncated=bool(truncated),
        )

    def sample_action(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.spec.low, self.spec.high)


def make_env(env_id: str) -> Env:
    """Build a built-in environment by id."""
    from adcrl.envs.pendulum import Pendulum
    from adcrl.envs.pointmass import PointMass

    registry = {"pendulum": Pendulum, "pointmass": PointMass}
    try:
        return registry[env_id]()
    except KeyError:
        raise ValueError(f"unknown environment id {env_id!r}; choose from {', '.join(ENV_IDS)}")


def episode_returns(env: Env, seed: int, episodes: int, progress: bool = False) -> np.ndarray:
    """Undiscounted returns of `episodes` uniform-random episodes."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.default_rng(seed)
    returns = np.empty(episodes)
    for ep in tqdm(range(episodes), desc="random episodes", disable=not progress, leave=False):
        env.reset(seed=int(rng.integers(2**31 - 1)))
        total = 0.0
        while True:
            result = env.step(env.sample_action(rng))
            total += result.reward
            if result.done:
                break
        returns[ep] = total
    return returns


def random_policy_return(env: Env, seed: int, episodes: int) -> float:
    """Mean undiscounted episode return under uniform-random actions."""
    return float(np.mean(episode_returns(env, seed, episodes)))
