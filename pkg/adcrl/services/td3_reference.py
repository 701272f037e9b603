"""
Plain TD3 written out step by step.

Serves as the reference the CTD3 agent must reproduce exactly when both
the director and the improved double estimator are switched off: same
network build order, same rng consumption, same update order.
"""
from typing import List, Optional

import numpy as np

from adcrl.envs.base import EnvSpec
from adcrl.models.agent_config import AgentConfig
from adcrl.models.metrics import StepReport
from adcrl.nn.mlp import Mlp, soft_update
from adcrl.nn.optim import AdamState, adam_step
from adcrl.replay.buffers import RingBuffer, Transition


class Td3Reference:
    def __init__(self, spec: EnvSpec, config: Optional[AgentConfig] = None, seed: int = 0):
        cfg = config or AgentConfig()
        self.config = cfg
        self.rng = np.random.default_rng(seed)
        self.obs_dim = spec.obs_dim
        self.low = spec.low
        self.high = spec.high
        self.center = (self.high + self.low) / 2.0
        self.scale = (self.high - self.low) / 2.0

        joint = spec.obs_dim + spec.action_dim
        self.actor = Mlp.build(spec.obs_dim, cfg.actor_hidden, spec.action_dim, self.rng, output_activation="tanh")
        self.q1 = Mlp.build(joint, cfg.critic_hidden, 1, self.rng)
        self.q2 = Mlp.build(joint, cfg.critic_hidden, 1, self.rng)
        self.actor_target = self.actor.copy()
        self.q1_target = self.q1.copy()
        self.q2_target = self.q2.copy()

        def adam(net: Mlp) -> AdamState:
            return AdamState.zeros_like(net.parameters(), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)

        self.actor_opt = adam(self.actor)
        self.q1_opt = adam(self.q1)
        self.q2_opt = adam(self.q2)

        self.buffer = RingBuffer(cfg.main_capacity, spec.obs_dim, spec.action_dim)
        self.t = 0
        self.learn_steps = 0

    def select_action(self, obs, explore: bool = True) -> np.ndarray:
        action = self.center + self.scale * self.actor.forward(np.asarray(obs, dtype=np.float64))
        if not explore:
            return action
        noise = self.rng.normal(0.0, 1.0, size=action.shape) * (self.config.exploration_noise * self.scale)
        return np.clip(action + noise, self.low, self.high)

    def random_action(self) -> np.ndarray:
        return self.rng.uniform(self.low, self.high)

    def train_step(self, transition: Transition) -> StepReport:
        cfg = self.config
        self.t += 1
        self.buffer.add(transition)
        n = cfg.batch_size
        if self.t <= cfg.warmup_steps or len(self.buffer) < n:
            return StepReport(step=self.t, gamma_d=0.0)
        self.learn_steps += 1

        b = self.buffer.sample(n, self.rng)

        # target policy smoothing
        noise = self.rng.normal(0.0, 1.0, size=b.actions.shape) * (cfg.target_noise * self.scale)
        c = cfg.noise_clip * self.scale
        noise = np.clip(noise, -c, c)
        next_a = np.clip(self.center + self.scale * self.actor_target.forward(b.next_states) + noise,
                         self.low, self.high)
        xn = np.concatenate([b.next_states, next_a], axis=-1)
        q_next = np.minimum(self.q1_target.forward(xn)[..., 0], self.q2_target.forward(xn)[..., 0])
        y = b.rewards + cfg.gamma_q * (1.0 - b.terminals.astype(np.float64)) * q_next

        # clipped double-Q regression, shared target
        x = np.concatenate([b.states, b.actions], axis=-1)
        losses: List[float] = []
        grads_per_critic = []
        for q in (self.q1, self.q2):
            diff = q.forward(x)[:, 0] - y
            losses.append(float(np.mean(diff * diff)))
            grads, _ = q.backward(x, (2.0 / n) * diff[:, None])
            grads_per_critic.append(grads)
        adam_step(self.q1.parameters(), grads_per_critic[0], self.q1_opt, cfg.critic_lr)
        adam_step(self.q2.parameters(), grads_per_critic[1], self.q2_opt, cfg.critic_lr)

        # delayed deterministic policy gradient
        actor_j = None
        if self.learn_steps % cfg.policy_delay == 0:
            a = self.center + self.scale * self.actor.forward(b.states)
            xa = np.concatenate([b.states, a], axis=-1)
            actor_j = float(np.mean(self.q1.forward(xa)[:, 0]))
            _, gx = self.q1.backward(xa, np.full((n, 1), 1.0 / n))
            grads, _ = self.actor.backward(b.states, gx[:, self.obs_dim:] * self.scale)
            adam_step(self.actor.parameters(), [-g for g in grads], self.actor_opt, cfg.actor_lr)
            soft_update(self.actor_target, self.actor, cfg.tau)

        soft_update(self.q1_target, self.q1, cfg.tau)
        soft_update(self.q2_target, self.q2, cfg.tau)

        return StepReport(
            step=self.t,
            learned=True,
            loss_q1=losses[0],
            loss_q2=losses[1],
            director_v=None,
            actor_j=actor_j,
            gamma_d=0.0,
            director_skipped=False,
            actor_updated=actor_j is not None,
        )
