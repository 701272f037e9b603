"""
Continuous-control environments.
"""
from adcrl.envs.base import ENV_IDS, Env, EnvSpec, StepResult, make_env, random_policy_return
from adcrl.envs.pendulum import Pendulum
from adcrl.envs.pointmass import PointMass

__all__ = ["ENV_IDS", "Env", "EnvSpec", "StepResult", "make_env", "random_policy_return", "Pendulum", "PointMass"]
