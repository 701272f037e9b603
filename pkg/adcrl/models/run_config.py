"""
Run-level configuration: environment, budget, evaluation protocol, output.
"""
from pathlib import Path
from typing import Literal

from pydantic import Field, model_validator

from adcrl.models.agent_config import AgentConfig
from adcrl.models.base import FileBackedModel

# Fraction of the training budget used as the default director half-life.
DIRECTOR_HALF_LIFE_FRACTION = 0.2


class RunConfig(FileBackedModel):
    env_id: Literal["pendulum", "pointmass"] = Field("pendulum", description="Built-in environment id")
    seed: int = Field(0, ge=0, description="Seed for networks, noise, sampling and env resets")
    total_steps: int = Field(50_000, ge=1, description="Environment steps T")
    eval_interval: int = Field(1000, ge=1, description="Env steps between evaluation points")
    eval_episodes: int = Field(10, ge=1, description="Deterministic episodes per evaluation point")
    smoothing_window: int = Field(20, ge=1, description="Trailing window (eval points) for smoothing")
    output_dir: Path = Field(Path("./runs"), description="Directory for metrics, checkpoints and echoed config")
    track_value_bias: bool = Field(False, description="Also record critic overestimation per eval point")
    progress: bool = Field(True, description="Show a progress bar while training")
    agent: AgentConfig = Field(default_factory=AgentConfig)

    @model_validator(mode="after")
    def _check_budget(self) -> "RunConfig":
        if self.total_steps < self.agent.warmup_steps:
            raise ValueError(
                f"total_steps ({self.total_steps}) must be >= agent.warmup_steps ({self.agent.warmup_steps})")
        if self.total_steps % self.eval_interval != 0:
            raise ValueError(
                f"eval_interval ({self.eval_interval}) must divide total_steps ({self.total_steps})")
        if "director_half_life" not in self.agent.model_fields_set:
            # never mutate the caller's AgentConfig
            half_life = max(1.0, DIRECTOR_HALF_LIFE_FRACTION * self.total_steps)
            self.agent = self.agent.model_copy(update={"director_half_life": half_life})
        return self

    def sections(self) -> dict:
        """Config-file view: {"run": {...}, "agent": {...}}."""
        run = self.model_dump(exclude={"agent"})
        run["output_dir"] = str(self.output_dir)
        return {"agent": self.agent.model_dump(), "run": run}
