"""
Hyperparameters of the CTD3 agent and its ablation flags.
"""
from typing import List, Literal, Optional

from pydantic import Field, model_validator

from adcrl.models.base import FileBackedModel


class AgentConfig(FileBackedModel):
    # Value learning
    gamma_q: float = Field(0.99, gt=0.0, lt=1.0, description="Critic discount factor")
    tau: float = Field(0.005, gt=0.0, le=1.0, description="Polyak mixing coefficient for target networks")
    policy_delay: int = Field(2, ge=1, description="Actor updated once per this many learning steps")
    batch_size: int = Field(256, ge=1, description="Minibatch size N for every buffer")

    # Noise, as fractions of the action half-range
    exploration_noise: float = Field(0.1, ge=0.0, description="Exploration noise std (fraction of half-range)")
    target_noise: float = Field(0.2, ge=0.0, description="Target smoothing noise std (fraction of half-range)")
    noise_clip: float = Field(0.5, ge=0.0, description="Target smoothing clip c (fraction of half-range)")

    # Director
    director_weight_initial: float = Field(1.0, ge=0.0, description="Director weight at step 0")
    director_half_life: float = Field(10_000.0, gt=0.0, description="Steps for the director weight to halve")

    # Reward cutoff
    cutoff: Optional[float] = Field(None, description="Reward cutoff R; None uses the environment default")
    cutoff_quantile: Optional[float] = Field(None, gt=0.0, lt=1.0, description="Adaptive cutoff quantile q")
    cutoff_update_interval: int = Field(1000, ge=1, description="Env steps between adaptive cutoff refreshes")
    reservoir_size: int = Field(10_000, ge=1, description="Reward reservoir size for the adaptive cutoff")

    # Optimisation
    actor_lr: float = Field(3e-4, gt=0.0, description="Actor learning rate")
    critic_lr: float = Field(3e-4, gt=0.0, description="Critic learning rate")
    director_lr: float = Field(3e-4, gt=0.0, description="Director learning rate")
    adam_beta1: float = Field(0.9, ge=0.0, lt=1.0)
    adam_beta2: float = Field(0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(1e-8, gt=0.0)

    # Architectures (hidden layer widths)
    actor_hidden: List[int] = Field(default_factory=lambda: [256, 256])
    critic_hidden: List[int] = Field(default_factory=lambda: [256, 256])
    director_hidden: List[int] = Field(default_factory=lambda: [256, 256])

    # Buffers
    main_capacity: int = Field(1_000_000, ge=1)
    high_capacity: int = Field(100_000, ge=1)
    low_capacity: int = Field(100_000, ge=1)

    warmup_steps: int = Field(1000, ge=0, description="Random-action steps before learning starts")

    # Variant flags
    adcf_enabled: bool = Field(True, description="Director term in the actor objective")
    idem_enabled: bool = Field(True, description="Two averaged target critics per critic")
    target_schedule: Literal["alternating", "algorithm"] = Field(
        "alternating", description="Per-critic alternation, or both targets of one critic per step")
    critic_update: Literal["both", "alternate"] = Field(
        "both", description="Update both critics each step, or one critic per step")
    critic_action: Literal["stored", "recomputed"] = Field(
        "stored", description="Critic regression on the stored action or on mu(s)+noise")

    @model_validator(mode="after")
    def _check_hidden(self) -> "AgentConfig":
        for name in ("actor_hidden", "critic_hidden", "director_hidden"):
            if any(width < 1 for width in getattr(self, name)):
                raise ValueError(f"{name} widths must be >= 1")
        return self

    @property
    def variant(self) -> str:
        """Ablation arm name as used in result tables."""
        if self.adcf_enabled and self.idem_enabled:
            return "CTD3"
        if self.adcf_enabled:
            return "TD3+ADCF"
        if self.idem_enabled:
            return "TD3+IDEM"
        return "TD3"
