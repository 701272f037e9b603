"""
Training orchestration, evaluation, metrics files and the ablation runner.
"""
from adcrl.harness.smoothing import smooth
from adcrl.harness.evaluation import evaluate, estimate_value_bias
from adcrl.harness.trainer import RunResult, run_training
from adcrl.harness.ablation import VARIANTS, AblationResult, run_ablation, steps_to_threshold, summarize_ablation

__all__ = [
    "smooth", "evaluate", "estimate_value_bias", "RunResult", "run_training",
    "VARIANTS", "AblationResult", "run_ablation", "steps_to_threshold", "summarize_ablation",
]
