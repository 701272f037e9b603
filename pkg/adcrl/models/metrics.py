"""
Per-step training reports and per-evaluation metrics rows.
"""
from typing import Optional

from pydantic import BaseModel, Field

METRICS_HEADER = (
    "step", "return_raw", "return_smooth", "loss_q1", "loss_q2", "director_v",
    "actor_j", "gamma_d", "buf_main", "buf_high", "buf_low",
)

VALUE_BIAS_HEADER = ("step", "q_estimate", "mc_return", "bias")


class StepReport(BaseModel):
    """Outcome of one train_step. Absent quantities are None, never NaN, so reports compare exactly."""

    step: int = Field(..., description="Environment step counter after this step")
    learned: bool = Field(False, description="Whether any network was updated")
    loss_q1: Optional[float] = None
    loss_q2: Optional[float] = None
    director_v: Optional[float] = None
    actor_j: Optional[float] = None
    gamma_d: float = 0.0
    director_skipped: bool = False
    actor_updated: bool = False


class MetricsRow(BaseModel):
    step: int = Field(..., description="Environment step of this evaluation point")
    return_raw: float = Field(..., description="Mean deterministic evaluation return")
    return_smooth: float = Field(..., description="Trailing-window mean of return_raw")
    loss_q1: Optional[float] = None
    loss_q2: Optional[float] = None
    director_v: Optional[float] = None
    actor_j: Optional[float] = None
    gamma_d: float = 0.0
    buf_main: int = 0
    buf_high: int = 0
    buf_low: int = 0
    learning: bool = Field(False, description="Learning had started by this evaluation point")

    def csv_values(self) -> list:
        return [getattr(self, name) for name in METRICS_HEADER]


class ValueBias(BaseModel):
    q_estimate: float = Field(..., description="Mean critic estimate at episode start states")
    mc_return: float = Field(..., description="Mean discounted Monte-Carlo return from those states")
    bias: float = Field(..., description="q_estimate - mc_return; positive means overestimation")
