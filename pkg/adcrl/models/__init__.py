"""
Data models: experiment configuration, step reports and metrics rows.
"""
from adcrl.models.agent_config import AgentConfig
from adcrl.models.run_config import RunConfig
from adcrl.models.metrics import MetricsRow, StepReport, ValueBias

__all__ = ["AgentConfig", "RunConfig", "MetricsRow", "StepReport", "ValueBias"]
