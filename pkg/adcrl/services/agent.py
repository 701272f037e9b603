"""
CTD3 agent: actor, director, two critics with two target critics each.

Flags reduce it to the ablation arms:
    adcf_enabled  director term in the actor objective
    idem_enabled  two averaged target critics per critic (else one, TD3 style)
"""
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from adcrl.envs.base import EnvSpec
from adcrl.models.agent_config import AgentConfig
from adcrl.models.metrics import StepReport
from adcrl.nn.mlp import Mlp, soft_update
from adcrl.nn.optim import AdamState, adam_step
from adcrl.replay.buffers import Transition, TransitionBatch, TripleReplay
from adcrl.utils.errors import DimensionError, NonFiniteError

logger = logging.getLogger(__name__)


def director_weight(config: AgentConfig, t: int) -> float:
    """gamma_D(t) = gamma_D0 * 2^(-t / half_life)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return config.director_weight_initial * 2.0 ** (-t / config.director_half_life)


def _negate(grads: List[np.ndarray]) -> List[np.ndarray]:
    return [-g for g in grads]


class Ctd3Agent:
    def __init__(self, spec: EnvSpec, config: Optional[AgentConfig] = None, seed: int = 0):
        self.spec = spec
        self.config = config or AgentConfig()
        self.seed = seed
        self.rng = np.random.default_rng(seed)

        self.obs_dim = spec.obs_dim
        self.action_dim = spec.action_dim
        self.low = spec.low
        self.high = spec.high
        self.action_center = (self.high + self.low) / 2.0
        self.action_scale = (self.high - self.low) / 2.0

        cfg = self.config
        joint_dim = self.obs_dim + self.action_dim
        # build order fixes the rng stream: actor, critic 1, critic 2, director
        self.actor = Mlp.build(self.obs_dim, cfg.actor_hidden, self.action_dim, self.rng,
                               output_activation="tanh")
        self.critics = [
            Mlp.build(joint_dim, cfg.critic_hidden, 1, self.rng),
            Mlp.build(joint_dim, cfg.critic_hidden, 1, self.rng),
        ]
        self.director: Optional[Mlp] = None
        if cfg.adcf_enabled:
            self.director = Mlp.build(joint_dim, cfg.director_hidden, 1, self.rng, output_activation="sigmoid")

        self.actor_target = self.actor.copy()
        per_critic = 2 if cfg.idem_enabled else 1
        self.critic_targets: List[List[Mlp]] = [[c.copy() for _ in range(per_critic)] for c in self.critics]

        self.actor_opt = self._adam(self.actor)
        self.critic_opts = [self._adam(c) for c in self.critics]
        self.director_opt = self._adam(self.director) if self.director is not None else None

        self.t = 0
        self.learn_steps = 0
        self.critic_occasions = [0, 0]
        self._updated_critics: List[int] = []

    def _adam(self, net: Mlp) -> AdamState:
        cfg = self.config
        return AdamState.zeros_like(net.parameters(), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps)

    # ------------------------------------------------------------------ acting

    def _check_obs(self, obs) -> np.ndarray:
        arr = np.asarray(obs, dtype=np.float64)
        if arr.shape[-1] != self.obs_dim:
            raise DimensionError(f"observation dimension mismatch: expected {self.obs_dim}, got {arr.shape}")
        return arr

    def policy(self, obs) -> np.ndarray:
        """mu_theta(obs) in environment units."""
        return self.action_center + self.action_scale * self.actor.forward(self._check_obs(obs))

    def target_policy(self, obs) -> np.ndarray:
        return self.action_center + self.action_scale * self.actor_target.forward(self._check_obs(obs))

    def select_action(self, obs, explore: bool = True, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        action = self.policy(obs)
        if not explore:
            return action
        rng = rng if rng is not None else self.rng
        sigma = self.config.exploration_noise * self.action_scale
        noise = rng.normal(0.0, 1.0, size=action.shape) * sigma
        return np.clip(action + noise, self.low, self.high)

    def random_action(self, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        rng = rng if rng is not None else self.rng
        return rng.uniform(self.low, self.high)

    def clip_target_noise(self, noise: np.ndarray) -> np.ndarray:
        c = self.config.noise_clip * self.action_scale
        return np.clip(noise, -c, c)

    def smoothed_target_action(self, next_obs, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        """mu_theta'(s') + clip(N(0, sigma'), -c, c), clamped to the action bounds."""
        rng = rng if rng is not None else self.rng
        base = self.target_policy(next_obs)
        noise = rng.normal(0.0, 1.0, size=base.shape) * (self.config.target_noise * self.action_scale)
        return np.clip(base + self.clip_target_noise(noise), self.low, self.high)

    # ------------------------------------------------------------------ values

    @staticmethod
    def _joint(states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return np.concatenate([states, actions], axis=-1)

    def q_values(self, i: int, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return self.critics[i].forward(self._joint(states, actions))[..., 0]

    def target_value(self, next_states: np.ndarray, next_actions: np.ndarray) -> np.ndarray:
        """Averaged-min over target pairs with IDEM, plain min of the two targets without."""
        x = self._joint(next_states, next_actions)
        if self.config.idem_enabled:
            estimates = [
                (pair[0].forward(x)[..., 0] + pair[1].forward(x)[..., 0]) / 2.0
                for pair in self.critic_targets
            ]
        else:
            estimates = [targets[0].forward(x)[..., 0] for targets in self.critic_targets]
        return np.minimum(estimates[0], estimates[1])

    def compute_target(self, batch: TransitionBatch, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        """y = r + gamma_Q * Q'(s', a~') masked on true terminals (truncation still bootstraps)."""
        next_actions = self.smoothed_target_action(batch.next_states, rng)
        q_next = self.target_value(batch.next_states, next_actions)
        not_terminal = 1.0 - batch.terminals.astype(np.float64)
        return batch.rewards + self.config.gamma_q * not_terminal * q_next

    # ------------------------------------------------------------------ critics

    def critic_loss_and_grads(self, i: int, states: np.ndarray, actions: np.ndarray,
                              y: np.ndarray) -> Tuple[float, List[np.ndarray]]:
        """mean((Q_i(s, a) - y)^2) and its parameter gradient."""
        x = self._joint(states, actions)
        diff = self.critics[i].forward(x)[:, 0] - y
        loss = float(np.mean(diff * diff))
        upstream = (2.0 / diff.shape[0]) * diff[:, None]
        grads, _ = self.critics[i].backward(x, upstream)
        return loss, grads

    def _critic_actions(self, batch: TransitionBatch, rng: Optional[np.random.Generator]) -> np.ndarray:
        if self.config.critic_action == "stored":
            return batch.actions
        return self.select_action(batch.states, explore=True, rng=rng)

    def update_critics(self, batch: TransitionBatch, y: Optional[np.ndarray] = None,
                       rng: Optional[np.random.Generator] = None) -> Tuple[Optional[float], Optional[float]]:
        """One Adam step per updated critic against the shared target y."""
        if y is None:
            y = self.compute_target(batch, rng)
        actions = self._critic_actions(batch, rng)
        if self.config.critic_update == "both":
            which = [0, 1]
        else:
            # critic 1 on odd learning steps, critic 2 on even ones
            which = [0] if self.learn_steps % 2 == 1 else [1]

        results = []
        for i in which:
            loss, grads = self.critic_loss_and_grads(i, batch.states, actions, y)
            if not np.isfinite(loss):
                raise NonFiniteError(f"critic {i + 1}: non-finite loss {loss}")
            results.append((i, loss, grads))

        losses: List[Optional[float]] = [None, None]
        self._updated_critics = []
        for i, loss, grads in results:
            adam_step(self.critics[i].parameters(), grads, self.critic_opts[i], self.config.critic_lr)
            self.critic_occasions[i] += 1
            self._updated_critics.append(i)
            losses[i] = loss
        return losses[0], losses[1]

    # ------------------------------------------------------------------ director

    def director_objective_and_grads(self, high: TransitionBatch,
                                     low: TransitionBatch) -> Tuple[float, List[np.ndarray]]:
        """V = mean(D(s, a_h)) + mean(1 - D(s, a_l)) and dV/dphi."""
        if self.director is None:
            raise ValueError("director is disabled (adcf_enabled = false)")
        xh = self._joint(high.states, high.actions)
        xl = self._joint(low.states, low.actions)
        dh = self.director.forward(xh)[:, 0]
        dl = self.director.forward(xl)[:, 0]
        value = float(np.mean(dh) + np.mean(1.0 - dl))
        gh, _ = self.director.backward(xh, np.full((len(high), 1), 1.0 / len(high)))
        gl, _ = self.director.backward(xl, np.full((len(low), 1), -1.0 / len(low)))
        return value, [a + b for a, b in zip(gh, gl)]

    def update_director(self, high: TransitionBatch, low: TransitionBatch) -> float:
        """One Adam ascent step on V(phi). Returns V before the step."""
        value, grads = self.director_objective_and_grads(high, low)
        adam_step(self.director.parameters(), _negate(grads), self.director_opt, self.config.director_lr)
        return value

    # ------------------------------------------------------------------ actor

    def actor_objective_and_grads(self, states: np.ndarray, gamma_d: float) -> Tuple[float, List[np.ndarray]]:
        """J = gamma_D * mean(D(s, mu(s))) + mean(Q_1(s, mu(s))) and dJ/dtheta."""
        n = states.shape[0]
        actions = self.action_center + self.action_scale * self.actor.forward(states)
        x = self._joint(states, actions)
        q = self.critics[0].forward(x)[:, 0]
        _, grad_x = self.critics[0].backward(x, np.full((n, 1), 1.0 / n))
        grad_a = grad_x[:, self.obs_dim:]
        if self.director is not None:
            d = self.director.forward(x)[:, 0]
            objective = float(gamma_d * np.mean(d) + np.mean(q))
            _, grad_xd = self.director.backward(x, np.full((n, 1), gamma_d / n))
            grad_a = grad_a + grad_xd[:, self.obs_dim:]
        else:
            objective = float(np.mean(q))
        grads, _ = self.actor.backward(states, grad_a * self.action_scale)
        return objective, grads

    def update_actor(self, batch: TransitionBatch, t: int) -> float:
        """Ascent step on J; critics and director are read only. Then theta' <- tau*theta + (1-tau)*theta'."""
        gamma_d = director_weight(self.config, t) if self.director is not None else 0.0
        objective, grads = self.actor_objective_and_grads(batch.states, gamma_d)
        adam_step(self.actor.parameters(), _negate(grads), self.actor_opt, self.config.actor_lr)
        soft_update(self.actor_target, self.actor, self.config.tau)
        return objective

    # ------------------------------------------------------------------ targets

    def update_targets(self, t: int) -> None:
        """
        alternating: each critic's k-th update occasion moves target 1 on odd k, target 2 on even k.
        algorithm:   odd t moves both targets of critic 1, even t both targets of critic 2.
        Without IDEM each updated critic moves its single target.
        """
        tau = self.config.tau
        if not self.config.idem_enabled:
            for i in self._updated_critics:
                soft_update(self.critic_targets[i][0], self.critics[i], tau)
            return
        if self.config.target_schedule == "algorithm":
            i = 0 if t % 2 == 1 else 1
            for target in self.critic_targets[i]:
                soft_update(target, self.critics[i], tau)
            return
        for i in self._updated_critics:
            slot = 0 if self.critic_occasions[i] % 2 == 1 else 1
            soft_update(self.critic_targets[i][slot], self.critics[i], tau)

    # ------------------------------------------------------------------ loop body

    def train_step(self, buffers: TripleReplay, transition: Transition) -> StepReport:
        cfg = self.config
        self.t += 1
        buffers.classify_and_store(transition)
        if buffers.adaptive and self.t % cfg.cutoff_update_interval == 0:
            new_cutoff = buffers.update_cutoff(buffers.take_pending_rewards())
            logger.debug("Step %d: reward cutoff now %.6g", self.t, new_cutoff)

        gamma_d = director_weight(cfg, self.t) if self.director is not None else 0.0
        n = cfg.batch_size
        if self.t <= cfg.warmup_steps or len(buffers.main) < n:
            return StepReport(step=self.t, gamma_d=gamma_d)

        self.learn_steps += 1
        director_v = None
        director_skipped = False
        if self.director is not None:
            if len(buffers.high) >= n and len(buffers.low) >= n:
                high = buffers.high.sample(n, self.rng)
                low = buffers.low.sample(n, self.rng)
                director_v = self.update_director(high, low)
            else:
                director_skipped = True
                logger.debug("Step %d: director update skipped (high=%d, low=%d, need %d)",
                             self.t, len(buffers.high), len(buffers.low), n)

        batch = buffers.main.sample(n, self.rng)
        y = self.compute_target(batch)
        loss_q1, loss_q2 = self.update_critics(batch, y)

        actor_j = None
        if self.learn_steps % cfg.policy_delay == 0:
            actor_j = self.update_actor(batch, self.t)

        self.update_targets(self.learn_steps)

        return StepReport(
            step=self.t,
            learned=True,
            loss_q1=loss_q1,
            loss_q2=loss_q2,
            director_v=director_v,
            actor_j=actor_j,
            gamma_d=gamma_d,
            director_skipped=director_skipped,
            actor_updated=actor_j is not None,
        )

    # ------------------------------------------------------------------ bookkeeping

    def current_director_weight(self) -> float:
        """gamma_D at the current step, 0 when the director is disabled."""
        return director_weight(self.config, self.t) if self.director is not None else 0.0

    def networks(self) -> Dict[str, Mlp]:
        """Every member network by checkpoint name."""
        nets: Dict[str, Mlp] = {"actor": self.actor, "actor_target": self.actor_target}
        for i, critic in enumerate(self.critics, start=1):
            nets[f"critic{i}"] = critic
            for j, target in enumerate(self.critic_targets[i - 1], start=1):
                nets[f"critic{i}_target{j}"] = target
        if self.director is not None:
            nets["director"] = self.director
        return nets
